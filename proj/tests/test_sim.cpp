#include "scenerylab/oracle.hpp"
#include "scenerylab/sim.hpp"
#include "scenerylab/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace scenerylab;

TEST(Sim, StayPutIsConstant) {
    const auto gamma = StepDistribution::uniform_on_cycle(7, {0});
    const auto f = Scenery::indicator_on_cycle(7, {0, 3});
    const auto t = simulate(gamma, f, 2000, 5);
    for (std::size_t i = 1; i < t.size(); ++i) {
        EXPECT_EQ(t.positions[i], t.positions[0]);
        EXPECT_EQ(t.observations[i], t.observations[0]);
    }
    const auto b = estimate_b(t, 5);
    for (double x : b.value) EXPECT_EQ(x, b.value[0]);
}

TEST(Sim, DeterministicGivenSeed) {
    const auto gamma = StepDistribution::uniform_on_cycle(7, {1, 2, 4});
    const auto f = Scenery::indicator_on_cycle(7, {0, 1});
    const auto a = simulate(gamma, f, 10000, 42), b = simulate(gamma, f, 10000, 42), c = simulate(gamma, f, 10000, 43);
    EXPECT_EQ(a.positions, b.positions);
    EXPECT_EQ(a.observations, b.observations);
    EXPECT_NE(a.positions, c.positions);
}

TEST(Sim, PinnedPrefix) {
    // Guards the cross-platform reproducibility contract.
    const auto gamma = StepDistribution::uniform_on_cycle(7, {1, 2, 4});
    const auto t = simulate(gamma, Scenery::indicator_on_cycle(7, {0, 1}), 12, 42);
    EXPECT_EQ(t.positions, (std::vector<Rank>{0, 4, 5, 0, 2, 3, 5, 0, 2, 3, 4, 1}));
    std::uint64_t s = 0;
    EXPECT_EQ(splitmix64(s), 0xE220A8397B1DCDAFULL);
}

TEST(Sim, ObservationsFollowScenery) {
    const auto g = GroupSpec::parse("Z3xZ5");
    const auto gamma = StepDistribution::uniform(g, {1, 4, 7});
    const auto f = Scenery::indicator(g, {0, 2, 9, 14});
    const auto t = simulate(gamma, f, 5000, 3);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(t.observations[i], f(t.positions[i]));
}

TEST(Sim, EmpiricalMeanMatchesDensity) {
    const auto gamma = StepDistribution::uniform_on_cycle(7, {1, 2});
    const auto f = Scenery::indicator_on_cycle(7, {0, 1, 3});
    const std::size_t N = 1000000;
    const auto t = simulate(gamma, f, N, 9);
    double mean = 0;
    for (auto o : t.observations) mean += o;
    mean /= N;
    const auto b = estimate_b(t, 0);
    EXPECT_DOUBLE_EQ(b.value[0], mean);
    // Batch-means standard error accounts for correlation.
    EXPECT_NEAR(mean, 3.0 / 7.0, 4 * b.stderr_[0]);
}

TEST(Sim, EstimateBMatchesExact) {
    const std::vector<StepDistribution> walks{
        StepDistribution::uniform_on_cycle(7, {1, 2}),
        StepDistribution::exact(GroupSpec::cycle(7), std::map<Rank, Rational>{{0, Rational(1, 2)}, {3, Rational(1, 3)}, {5, Rational(1, 6)}}),
        StepDistribution::uniform_on_cycle(7, {-1, 1})};
    const auto f = Scenery::indicator_on_cycle(7, {0, 1, 3});
    std::uint64_t seed = 100;
    for (const auto& gamma : walks) {
        const auto t = simulate(gamma, f, 1000000, seed++);
        const auto emp = estimate_b(t, 6);
        const auto exact = temporal_autocorrelation_exact(gamma, f, 6);
        for (std::size_t l = 0; l <= 6; ++l)
            EXPECT_NEAR(emp.value[l], exact[l].get_d(), 4 * emp.stderr_[l] + 1e-12) << "l=" << l;
    }
}

TEST(Sim, TraceTooShort) {
    const auto gamma = StepDistribution::uniform_on_cycle(5, {1});
    const auto t = simulate(gamma, Scenery::ones(GroupSpec::cycle(5)), 500, 1);
    EXPECT_THROW(estimate_b(t, 3), DomainError);
}

TEST(Sim, IncrementsPassChiSquareAndTV) {
    const auto gamma = StepDistribution::exact(GroupSpec::cycle(7), std::map<Rank, Rational>{{1, Rational(1, 2)}, {2, Rational(1, 3)}, {4, Rational(1, 6)}});
    const auto t = simulate(gamma, Scenery::zeros(GroupSpec::cycle(7)), 1000000, 77);
    const auto counts = increment_counts(t);
    const auto probs = step_probs_double(gamma);
    EXPECT_GT(chi_square(counts, probs).p_value, 0.001);
    EXPECT_LT(total_variation(counts, probs), 0.01);
}

TEST(Sim, ChiSquareDetectsWrongLaw) {
    const auto gamma = StepDistribution::uniform_on_cycle(5, {1, 2});
    const auto t = simulate(gamma, Scenery::zeros(GroupSpec::cycle(5)), 100000, 1);
    EXPECT_LT(chi_square(increment_counts(t), {0, 0.6, 0.4, 0, 0}).p_value, 1e-6);
    EXPECT_EQ(chi_square(increment_counts(t), {0.5, 0.5, 0, 0, 0}).p_value, 0);
}

TEST(Sim, ManyTracesMatchSerial) {
    const auto gamma = StepDistribution::uniform_on_cycle(11, {1, 5});
    const auto f = Scenery::indicator_on_cycle(11, {0, 4});
    const auto many = simulate_many(gamma, f, 2000, {1, 2, 3, 4, 5}, 3);
    for (std::size_t i = 0; i < many.size(); ++i) EXPECT_EQ(many[i].positions, simulate(gamma, f, 2000, i + 1).positions);
}

TEST(Coupling, Fig2Cycle) {
    const auto gamma = StepDistribution::uniform_on_cycle(7, {1, 2, 4});
    const auto pair = build_pair_cycle(7, 2);
    const auto c = simulate_coupled_cycle(gamma, pair.f1, pair.f2, 2, 100000, 42);
    EXPECT_EQ(c.trace1.observations, c.trace2.observations);
    for (std::size_t t = 0; t < c.trace1.size(); ++t)
        EXPECT_EQ(c.trace2.positions[t], GroupSpec::cycle(7).scale_rank(2, c.trace1.positions[t]));
    const auto probs = step_probs_double(gamma);
    EXPECT_GT(chi_square(increment_counts(c.trace1), probs).p_value, 0.001);
    EXPECT_GT(chi_square(increment_counts(c.trace2), probs).p_value, 0.001);
}

TEST(Coupling, IdentityMultiplier) {
    const auto gamma = StepDistribution::uniform_on_cycle(7, {1, 3});
    const auto f = Scenery::indicator_on_cycle(7, {2, 3, 5});
    const auto c = simulate_coupled_cycle(gamma, f, f, 1, 1000, 8);
    EXPECT_EQ(c.trace1.positions, c.trace2.positions);
}

TEST(Coupling, CyclePreconditionErrors) {
    const auto pair = build_pair_cycle(7, 2);
    EXPECT_THROW(simulate_coupled_cycle(StepDistribution::uniform_on_cycle(7, {1, 2}), pair.f1, pair.f2, 2, 10, 1), DomainError);
    EXPECT_THROW(simulate_coupled_cycle(StepDistribution::uniform_on_cycle(7, {1, 2, 4}), pair.f1, pair.f1, 2, 10, 1),
                 DomainError);
}

namespace {

StepDistribution collision_walk_z7_squared() {
    // First-coordinate marginal uniform on {1,2,4}: invariant under k1 -> 2 k1.
    const auto g = GroupSpec::parse("Z7^2");
    std::vector<Rank> steps;
    for (std::int64_t a : {1, 2, 4})
        for (std::int64_t b : {0, 1}) steps.push_back(GroupElement(g, {a, b}).rank());
    return StepDistribution::uniform(g, steps);
}

} // namespace

TEST(Coupling, TorusMultiple) {
    const auto gamma = collision_walk_z7_squared();
    const auto& g = gamma.group();
    const GroupElement x(g, {1, 0}), y(g, {2, 0});
    const auto pair = build_pair_torus(x, y);
    ASSERT_TRUE(sceneries_equivalent(gamma, pair.f1, pair.f2).equivalent());
    const auto c = simulate_coupled_product(gamma, pair.f1, pair.f2, x, y, 100000, 5);
    EXPECT_EQ(c.trace1.observations, c.trace2.observations);
    const auto probs = step_probs_double(gamma);
    EXPECT_GT(chi_square(increment_counts(c.trace2), probs).p_value, 0.001);
}

TEST(Coupling, EqualDirectionsAreIdentical) {
    const auto gamma = collision_walk_z7_squared();
    const auto& g = gamma.group();
    const GroupElement x(g, {1, 0});
    const auto f = Scenery::indicator(g, {0, 1});
    // f is not a function of k.x, so use one that is.
    std::vector<Rank> ones;
    for (Rank k = 0; k < g.order(); ++k)
        if (g.coord_of(k, 0) == 3) ones.push_back(k);
    const auto h = Scenery::indicator(g, ones);
    const auto c = simulate_coupled_product(gamma, h, h, x, x, 2000, 4);
    EXPECT_EQ(c.trace1.observations, c.trace2.observations);
    for (std::size_t t = 0; t < c.trace1.size(); ++t)
        EXPECT_EQ(g.coord_of(c.trace1.positions[t], 0), g.coord_of(c.trace2.positions[t], 0));
    EXPECT_THROW(simulate_coupled_product(gamma, f, f, x, x, 10, 1), DomainError);
}

TEST(Coupling, FiberMismatchRaises) {
    const auto g = GroupSpec::parse("Z7^2");
    const auto gamma = StepDistribution::uniform(g, {GroupElement(g, {1, 0}).rank(), GroupElement(g, {0, 1}).rank()});
    const GroupElement x(g, {1, 0}), y(g, {2, 0});
    const auto pair = build_pair_torus(x, y);
    EXPECT_THROW(simulate_coupled_product(gamma, pair.f1, pair.f2, x, y, 10, 1), DomainError);
}

TEST(Coupling, ProductOfCycles) {
    const auto g = GroupSpec::parse("Z7xZ11");
    // Z7 marginal uniform on {1,2,4}, Z11 part arbitrary.
    std::vector<Rank> steps;
    for (std::int64_t a : {1, 2, 4}) steps.push_back(GroupElement(g, {a, 3}).rank());
    const auto gamma = StepDistribution::uniform(g, steps);
    const GroupElement x(g, {1, 0}), y(g, {2, 0});
    const auto pair = build_pair_product(x, y);
    ASSERT_TRUE(sceneries_equivalent(gamma, pair.f1, pair.f2).equivalent());
    const auto c = simulate_coupled_product(gamma, pair.f1, pair.f2, x, y, 20000, 6);
    EXPECT_EQ(c.trace1.observations, c.trace2.observations);
}
