#include "scenerylab/walk.hpp"

#include <gtest/gtest.h>

#include <array>
#include <complex>
#include <random>
#include <set>

using namespace scenerylab;

namespace {

std::set<std::pair<Rank, Rank>> pair_set(const std::vector<std::pair<Rank, Rank>>& v) { return {v.begin(), v.end()}; }

/// Brute-force transform in double precision, independent of the cyclotomic code.
std::vector<std::complex<double>> naive_fourier(const StepDistribution& gamma) {
    const auto& g = gamma.group();
    std::vector<std::complex<double>> out;
    for (Rank x = 0; x < g.order(); ++x) {
        std::complex<double> acc = 0;
        const auto xe = GroupElement::from_rank(g, x);
        for (Rank k = 0; k < g.order(); ++k) {
            const double p = gamma.prob_double(k);
            if (p == 0) continue;
            const auto ke = GroupElement::from_rank(g, k);
            double phase = 0;
            for (std::size_t c = 0; c < g.num_coords(); ++c)
                phase += static_cast<double>(ke[c] * xe[c] % g.coord_modulus(c)) / static_cast<double>(g.coord_modulus(c));
            acc += p * std::polar(1.0, -2.0 * M_PI * phase);
        }
        out.push_back(acc);
    }
    return out;
}

std::complex<double> to_cd(const ComplexReal& z) { return {z.re.convert_to<double>(), z.im.convert_to<double>()}; }

StepDistribution random_rational_walk(std::int64_t p, std::mt19937_64& rng) {
    const std::size_t size = 1 + rng() % 5;
    std::vector<std::int64_t> steps;
    for (std::size_t i = 0; i < size; ++i) steps.push_back(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(p)));
    return StepDistribution::uniform_on_cycle(p, steps);
}

} // namespace

// =============================================================================
// fourier_transform
// =============================================================================

TEST(Fourier, UniformOneTwoFourCollides) {
    const auto t = fourier_transform(StepDistribution::uniform_on_cycle(7, {1, 2, 4}));
    ASSERT_TRUE(t.is_exact());
    EXPECT_EQ(t.exact_at(1), t.exact_at(2));
    EXPECT_EQ(t.exact_at(1), t.exact_at(4));
    EXPECT_FALSE(t.exact_at(1) == t.exact_at(3));
}

TEST(Fourier, PointMassAndFullGroup) {
    const auto point = fourier_transform(StepDistribution::uniform_on_cycle(11, {0}));
    for (Rank x = 0; x < 11; ++x) EXPECT_EQ(point.exact_at(x), CyclotomicNumber(point.exact_at(0).context(), 1));
    std::vector<std::int64_t> all;
    for (std::int64_t k = 0; k < 11; ++k) all.push_back(k);
    const auto full = fourier_transform(StepDistribution::uniform_on_cycle(11, all));
    EXPECT_TRUE(full.exact_at(0).is_rational() && full.exact_at(0).rational_value() == 1);
    for (Rank x = 1; x < 11; ++x) EXPECT_TRUE(full.exact_at(x).is_zero());
}

TEST(Fourier, CompositeModulusNeedsFallback) {
    const auto gamma = StepDistribution::uniform_on_cycle(12, {1, 5});
    EXPECT_THROW(fourier_transform(gamma), FallbackRequiredError);
    const auto t = fourier_transform_any(gamma);
    EXPECT_FALSE(t.is_exact());
}

TEST(Fourier, MatchesNaiveTransformOnProducts) {
    std::mt19937_64 rng(17);
    for (const char* text : {"Z7", "Z5^2", "Z3xZ7", "Z12", "Z4xZ6"}) {
        const auto g = GroupSpec::parse(text);
        std::vector<Rank> ms;
        for (int i = 0; i < 5; ++i) ms.push_back(rng() % g.order());
        const auto gamma = StepDistribution::uniform(g, ms);
        const auto table = fourier_transform_any(gamma);
        const auto naive = naive_fourier(gamma);
        for (Rank x = 0; x < g.order(); ++x)
            EXPECT_LT(std::abs(to_cd(table.numeric_at(x)) - naive[static_cast<std::size_t>(x)]), 1e-12) << text;
    }
}

// =============================================================================
// find_collisions
// =============================================================================

TEST(Collisions, UniformOneTwoFour) {
    const auto scan = find_collisions(fourier_transform(StepDistribution::uniform_on_cycle(7, {1, 2, 4})));
    const auto pairs = pair_set(scan.pairs);
    for (auto p : {std::pair<Rank, Rank>{1, 2}, {1, 4}, {2, 4}}) EXPECT_TRUE(pairs.count(p));
}

TEST(Collisions, SimpleWalkIsConjugateSymmetric) {
    const auto scan = find_collisions(fourier_transform(StepDistribution::uniform_on_cycle(7, {-1, 1})));
    EXPECT_EQ(pair_set(scan.pairs), (std::set<std::pair<Rank, Rank>>{{1, 6}, {2, 5}, {3, 4}}));
}

TEST(Collisions, DeltaWalkHasThreeMinusThree) {
    const auto delta = delta_walk_z7();
    {
        ScopedPrecision guard(256);
        // 1/2 + delta = gamma(1); the hand-computed value is 0.64311.
        EXPECT_NEAR(delta.prob_double(1), 0.64311, 1e-5);
    }
    const auto scan = find_collisions(fourier_transform(delta));
    EXPECT_TRUE(pair_set(scan.pairs).count({3, 4}));
    EXPECT_TRUE(scan.near_ties.empty());
}

TEST(Collisions, NearTieIsFlagged) {
    ScopedPrecision guard(256);
    const Real eps("3e-31");
    std::map<Rank, Real> probs{{1, Real(0.5) + eps}, {6, Real(0.5) - eps}};
    const auto gamma = StepDistribution::floating(GroupSpec::cycle(7), probs, default_tolerance());
    const auto verdict = analyze(gamma);
    EXPECT_FALSE(verdict.near_ties.empty());
    EXPECT_EQ(verdict.verdict, Verdict::unknown);
}

// =============================================================================
// multiplier_of_collision
// =============================================================================

TEST(Multiplier, Examples) {
    const auto g124 = StepDistribution::uniform_on_cycle(7, {1, 2, 4});
    EXPECT_EQ(multiplier_of_collision(g124, 1, 2), std::optional<std::int64_t>(2));
    const auto simple = StepDistribution::uniform_on_cycle(7, {-1, 1});
    EXPECT_EQ(multiplier_of_collision(simple, 3, 4), std::optional<std::int64_t>(6));
    const auto stay = StepDistribution::uniform_on_cycle(7, {0});
    EXPECT_EQ(multiplier_of_collision(stay, 0, 3), std::nullopt);
}

TEST(Multiplier, Errors) {
    EXPECT_THROW(multiplier_of_collision(StepDistribution::uniform_on_cycle(5, {1, 4}), 1, 4), DomainError);
    EXPECT_THROW(multiplier_of_collision(StepDistribution::uniform_on_cycle(9, {1, 8}), 1, 8), DomainError);
    EXPECT_THROW(multiplier_of_collision(StepDistribution::uniform_on_cycle(7, {1, 2}), 1, 2), DomainError);
    EXPECT_THROW(multiplier_of_collision(StepDistribution::uniform_on_cycle(7, {1, 2, 4}), 1, 1), DomainError);
}

// =============================================================================
// drift, drift_verdict, is_symmetric
// =============================================================================

TEST(Drift, Examples) {
    EXPECT_EQ(drift(StepMultiset::on_cycle(7, {1, 2, 4})), 0u);
    EXPECT_EQ(drift(StepMultiset::on_cycle(7, {1, 2})), 3u);
    EXPECT_EQ(drift(StepMultiset::on_cycle(11, {-1, 1})), 0u);
}

TEST(Drift, VerdictExamples) {
    const auto a = drift_verdict(StepMultiset::on_cycle(7, {1, 2}));
    EXPECT_EQ(a.verdict, Verdict::reconstructive);
    EXPECT_EQ(a.decided_by, "drift");
    EXPECT_FALSE(a.table.has_value());

    const auto b = drift_verdict(StepMultiset::on_cycle(7, {1, 2, 4}));
    EXPECT_EQ(b.decided_by, "fourier");
    EXPECT_EQ(b.verdict, Verdict::not_reconstructive);

    const auto c = drift_verdict(StepMultiset::on_cycle(13, {0}));
    EXPECT_EQ(c.verdict, Verdict::not_reconstructive);
    EXPECT_EQ(c.drift, std::optional<Rank>(0));

    EXPECT_THROW(drift_verdict(StepMultiset::on_cycle(5, {1, 2})), DomainError);
    EXPECT_THROW(drift_verdict(StepMultiset::on_cycle(15, {1, 2})), DomainError);
}

TEST(Symmetry, Examples) {
    EXPECT_TRUE(is_symmetric(StepDistribution::uniform_on_cycle(7, {-1, 1})));
    EXPECT_FALSE(is_symmetric(StepDistribution::uniform_on_cycle(7, {1, 2})));
    EXPECT_TRUE(is_symmetric(StepDistribution::uniform_on_cycle(11, {-2, -1, 1, 2})));
    EXPECT_TRUE(is_symmetric(IntegerMultiset{-2, -1, 1, 2}));
    EXPECT_FALSE(is_symmetric(IntegerMultiset{1, 2}));
}

// =============================================================================
// embed_mod_n, bounded_support_N
// =============================================================================

TEST(Embed, Examples) {
    const auto a = embed_mod_n({1, 2}, 7);
    EXPECT_EQ(a.prob(1), Rational(1, 2));
    EXPECT_EQ(a.prob(2), Rational(1, 2));
    EXPECT_EQ(embed_mod_n({1, 8}, 7).prob(1), 1);
    const auto c = embed_mod_n({-1, 1}, 5);
    EXPECT_EQ(c.prob(4), Rational(1, 2));
    EXPECT_EQ(c.prob(1), Rational(1, 2));
    EXPECT_THROW(embed_mod_n({1}, 1), DomainError);
}

TEST(BoundedSupport, Examples) {
    const auto a = bounded_support_N({1, 2});
    EXPECT_EQ(a.gcd, 1);
    EXPECT_EQ(a.b, 2);
    EXPECT_EQ(a.N, 8);
    EXPECT_FALSE(a.symmetric);
    for (std::int64_t n : {11, 13}) EXPECT_EQ(analyze(embed_mod_n({1, 2}, n)).verdict, Verdict::reconstructive);

    const auto b = bounded_support_N({-1, 1});
    EXPECT_TRUE(b.symmetric);
    EXPECT_GT(b.N, 0);

    const auto c = bounded_support_N({2, 4});
    EXPECT_EQ(c.gcd, 2);
    EXPECT_EQ(c.normalized, (IntegerMultiset{1, 2}));
    EXPECT_EQ(c.b, 2);
    EXPECT_EQ(c.N, 8);
    for (std::int64_t n : {11, 13}) EXPECT_EQ(analyze(embed_mod_n({2, 4}, n)).verdict, Verdict::reconstructive);

    const auto e = bounded_support_N({5});
    EXPECT_EQ(e.b, 1);
    EXPECT_EQ(e.N, 5);
    EXPECT_EQ(analyze(embed_mod_n({5}, 5)).verdict, Verdict::unknown);
    EXPECT_EQ(analyze(embed_mod_n({5}, 7)).verdict, Verdict::reconstructive);

    EXPECT_THROW(bounded_support_N({}), DomainError);
}

TEST(BoundedSupport, CertificateIsValid) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 200; ++i) {
        IntegerMultiset gamma;
        const std::size_t size = 1 + rng() % 7;
        for (std::size_t j = 0; j < size; ++j) gamma.push_back(static_cast<std::int64_t>(rng() % 61) - 30);
        const auto r = bounded_support_N(gamma);
        if (r.gcd == 0) continue;
        std::int64_t sum = 0;
        for (std::size_t j = 0; j < r.support.size(); ++j) sum += r.coefficients[j] * r.support[j];
        EXPECT_EQ(sum, 1);
        EXPECT_EQ(r.N, std::max(2 * r.b * r.b, std::abs(r.gcd)));
    }
}

// =============================================================================
// analyze
// =============================================================================

TEST(Analyze, Examples) {
    EXPECT_EQ(analyze(StepDistribution::uniform_on_cycle(7, {1, 2})).verdict, Verdict::reconstructive);

    const auto b = analyze(StepDistribution::uniform_on_cycle(7, {1, 2, 4}));
    EXPECT_EQ(b.verdict, Verdict::not_reconstructive);
    ASSERT_TRUE(b.has_collision(1, 2));
    for (const auto& c : b.collisions)
        if (c.x == 1 && c.y == 2) EXPECT_EQ(c.multiplier, std::optional<std::int64_t>(2));

    const auto d = analyze(delta_walk_z7());
    EXPECT_EQ(d.verdict, Verdict::unknown);
    EXPECT_TRUE(d.has_collision(3, 4));
    EXPECT_NE(d.reason.find("irrational"), std::string::npos);
}

TEST(Analyze, UnknownOutsidePrimesAboveFive) {
    const auto small = analyze(StepDistribution::uniform_on_cycle(5, {-1, 1}));
    EXPECT_EQ(small.verdict, Verdict::unknown);
    EXPECT_NE(small.reason.find("p <= 5"), std::string::npos);
    const auto composite = analyze(StepDistribution::uniform_on_cycle(9, {-1, 1}));
    EXPECT_EQ(composite.verdict, Verdict::unknown);
    EXPECT_NE(composite.reason.find("composite"), std::string::npos);
    EXPECT_EQ(analyze(StepDistribution::uniform_on_cycle(9, {1, 3})).verdict, Verdict::reconstructive);
}

TEST(Analyze, ProductOfPrimes) {
    const auto g = GroupSpec::parse("Z7xZ11");
    const auto gamma = StepDistribution::uniform(g, {GroupElement(g, {1, 0}).rank(), GroupElement(g, {0, 1}).rank()});
    EXPECT_EQ(analyze(gamma).verdict, Verdict::reconstructive);
    const auto sym = StepDistribution::uniform(g, {GroupElement(g, {1, 1}).rank(), GroupElement(g, {-1, -1}).rank()});
    EXPECT_EQ(analyze(sym).verdict, Verdict::not_reconstructive);
}

// =============================================================================
// Properties
// =============================================================================

TEST(WalkProperties, NormalizationAndBound) {
    std::mt19937_64 rng(1);
    for (std::int64_t p : {7, 11, 13}) {
        for (int i = 0; i < 30; ++i) {
            const auto gamma = random_rational_walk(p, rng);
            const auto t = fourier_transform(gamma);
            EXPECT_TRUE(t.exact_at(0).is_rational() && t.exact_at(0).rational_value() == 1);
            ScopedPrecision guard(256);
            for (Rank x = 0; x < t.size(); ++x) EXPECT_LE(t.numeric_at(x).abs(), Real(1) + Real("1e-60"));
        }
    }
}

TEST(WalkProperties, ExactAndFloatCollisionSetsAgree) {
    std::mt19937_64 rng(2);
    for (std::int64_t p : {7, 11, 13}) {
        for (int i = 0; i < 40; ++i) {
            const auto gamma = random_rational_walk(p, rng);
            const auto exact_scan = find_collisions(fourier_transform(gamma));
            const auto float_scan = find_collisions(fourier_transform(gamma.to_floating(256, default_tolerance())));
            EXPECT_EQ(exact_scan.pairs, float_scan.pairs);
            EXPECT_TRUE(float_scan.near_ties.empty());
        }
    }
}

TEST(WalkProperties, SymmetricImpliesConjugateCollisions) {
    std::mt19937_64 rng(3);
    for (std::int64_t p : {7, 11, 13}) {
        for (int i = 0; i < 20; ++i) {
            std::vector<std::int64_t> steps;
            const std::size_t half = 1 + rng() % 3;
            for (std::size_t j = 0; j < half; ++j) {
                const auto s = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(p));
                steps.push_back(s);
                steps.push_back(-s);
            }
            const auto gamma = StepDistribution::uniform_on_cycle(p, steps);
            ASSERT_TRUE(is_symmetric(gamma));
            const auto pairs = pair_set(find_collisions(fourier_transform(gamma)).pairs);
            for (Rank k = 1; k <= static_cast<Rank>(p / 2); ++k) EXPECT_TRUE(pairs.count({k, static_cast<Rank>(p) - k}));
        }
    }
}

TEST(WalkProperties, CollisionImpliesZeroDrift) {
    std::mt19937_64 rng(4);
    int with_collision = 0;
    for (int i = 0; i < 10000; ++i) {
        const std::int64_t p = std::array<std::int64_t, 3>{7, 11, 13}[static_cast<std::size_t>(i % 3)];
        const std::size_t size = 1 + rng() % 6;
        std::vector<std::int64_t> steps;
        for (std::size_t j = 0; j < size; ++j) steps.push_back(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(p)));
        const auto ms = StepMultiset::on_cycle(p, steps);
        const auto scan = find_collisions(fourier_transform(ms.distribution()));
        if (!scan.pairs.empty()) {
            ++with_collision;
            EXPECT_EQ(drift(ms), 0u) << "p=" << p;
        }
    }
    EXPECT_GT(with_collision, 0);
}

TEST(WalkProperties, MultiplierClosure) {
    std::mt19937_64 rng(5);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        const std::int64_t p = (i % 2) ? 7 : 13;
        const auto gamma = random_rational_walk(p, rng);
        for (const auto& [x, y] : find_collisions(fourier_transform(gamma)).pairs) {
            const auto v = multiplier_of_collision(gamma, x, y);
            if (!v) continue;
            ++checked;
            for (Rank k = 0; k < static_cast<Rank>(p); ++k)
                EXPECT_EQ(gamma.prob(gamma.group().scale_rank(*v, k)), gamma.prob(k));
        }
    }
    EXPECT_GT(checked, 0);
}

TEST(WalkProperties, BoundedSupportSoundness) {
    std::mt19937_64 rng(6);
    int tested = 0;
    while (tested < 100) {
        IntegerMultiset gamma;
        const std::size_t size = 1 + rng() % 4;
        for (std::size_t j = 0; j < size; ++j) gamma.push_back(static_cast<std::int64_t>(rng() % 11) - 5);
        const auto r = bounded_support_N(gamma);
        if (r.symmetric || r.gcd == 0) continue;
        ++tested;
        std::int64_t n = r.N;
        for (int j = 0; j < 3; ++j) {
            n = next_prime(n);
            EXPECT_EQ(analyze(embed_mod_n(gamma, n)).verdict, Verdict::reconstructive) << "n=" << n;
        }
    }
}
