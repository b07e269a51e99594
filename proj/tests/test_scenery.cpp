#include "scenerylab/scenery.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace scenerylab;

namespace {

Scenery random_scenery(const GroupSpec& g, std::mt19937_64& rng) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(g.order()));
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1U);
    return Scenery(g, bits);
}

/// Exhaustive shift check, independent of is_shift_of.
bool naive_shift_related(const Scenery& a, const Scenery& b) {
    for (Rank s = 0; s < a.group().order(); ++s)
        if (shift(b, s) == a) return true;
    return false;
}

} // namespace

TEST(Scenery, ShiftExamples) {
    const auto f = Scenery::indicator_on_cycle(7, {0, 1});
    EXPECT_EQ(shift(f, Rank{0}), f);
    EXPECT_EQ(shift(f, Rank{1}), Scenery::indicator_on_cycle(7, {6, 0}));
    EXPECT_EQ(shift(shift(f, Rank{3}), Rank{4}), f);
}

TEST(Scenery, IsShiftOfExamples) {
    const auto f = Scenery::indicator_on_cycle(7, {0, 1});
    EXPECT_EQ(is_shift_of(f, f), std::optional<Rank>(0));
    EXPECT_EQ(is_shift_of(f, Scenery::indicator_on_cycle(7, {0, 2})), std::nullopt);
    const auto parity = Scenery::indicator_on_cycle(12, {1, 3, 5, 7, 9, 11});
    EXPECT_EQ(is_shift_of(shift(parity, Rank{2}), parity), std::optional<Rank>(0));
    const auto g = Scenery::indicator_on_cycle(12, {0, 1, 5});
    EXPECT_EQ(is_shift_of(shift(g, Rank{2}), g), std::optional<Rank>(2));
}

TEST(Scenery, FlipExamples) {
    const auto sym = Scenery::indicator_on_cycle(7, {0, 1, 6});
    EXPECT_TRUE(is_shift_of(flip(sym), sym));
    const auto f = Scenery::indicator_on_cycle(7, {0, 1, 3});
    EXPECT_EQ(flip(f), Scenery::indicator_on_cycle(7, {0, 6, 4}));
    EXPECT_FALSE(is_shift_of(flip(f), f));
    EXPECT_EQ(flip(flip(f)), f);
}

TEST(Scenery, MultiplyCoordsExamples) {
    const auto f = Scenery::indicator_on_cycle(7, {0, 1});
    EXPECT_EQ(multiply_coords(f, 1), f);
    EXPECT_EQ(multiply_coords(f, 2), Scenery::indicator_on_cycle(7, {0, 2}));
    EXPECT_EQ(multiply_coords(f, -1), flip(f));
    EXPECT_THROW(multiply_coords(Scenery::indicator_on_cycle(12, {0}), 2), DomainError);
}

TEST(Scenery, OrbitRepresentatives) {
    // Binary necklaces of length 7: 20; of length 12: 352.
    EXPECT_EQ(orbit_representatives(GroupSpec::cycle(7)).size(), 20u);
    EXPECT_EQ(orbit_representatives(GroupSpec::cycle(12)).size(), 352u);
    EXPECT_EQ(orbit_representatives(GroupSpec::cycle(7), 2).size(), 3u);
    for (const auto& f : orbit_representatives(GroupSpec::cycle(6))) EXPECT_EQ(canonical_shift(f), f);
}

TEST(Pairs, CycleExamples) {
    const auto fig2 = build_pair_cycle(7, 2);
    EXPECT_EQ(fig2.f1, Scenery::indicator_on_cycle(7, {0, 1}));
    EXPECT_EQ(fig2.f2, Scenery::indicator_on_cycle(7, {0, 2}));
    EXPECT_EQ(fig2.kind, PairCase::cycle_multiplier);

    const auto flip_pair = build_pair_cycle(7, -1);
    EXPECT_EQ(flip_pair.f1, Scenery::indicator_on_cycle(7, {0, 1, 3}));
    EXPECT_EQ(flip_pair.f2, Scenery::indicator_on_cycle(7, {0, 6, 4}));
    EXPECT_EQ(flip_pair.kind, PairCase::cycle_flip);

    const auto p11 = build_pair_cycle(11, 3);
    EXPECT_EQ(p11.f2, Scenery::indicator_on_cycle(11, {0, 3}));
    EXPECT_FALSE(naive_shift_related(p11.f1, p11.f2));

    EXPECT_THROW(build_pair_cycle(7, 1), DomainError);
    EXPECT_THROW(build_pair_cycle(7, 0), DomainError);
    EXPECT_THROW(build_pair_cycle(5, 2), DomainError);
}

TEST(Pairs, TorusExamples) {
    const auto g = GroupSpec::parse("Z7^2");
    const auto a = build_pair_torus(GroupElement(g, {1, 0}), GroupElement(g, {2, 0}));
    EXPECT_EQ(a.kind, PairCase::torus_multiple);
    EXPECT_FALSE(naive_shift_related(a.f1, a.f2));

    const auto b = build_pair_torus(GroupElement(g, {1, 0}), GroupElement(g, {0, 1}));
    EXPECT_EQ(b.kind, PairCase::torus_independent);
    for (Rank k = 0; k < g.order(); ++k) {
        const auto e = GroupElement::from_rank(g, k);
        EXPECT_EQ(b.f1(k), e[0] == 0 ? 1 : 0);
        EXPECT_EQ(b.f2(k), e[1] == 0 ? 1 : 0);
    }
    EXPECT_EQ(b.f1.ones_count(), 7u);
    EXPECT_EQ(b.f2.ones_count(), 7u);

    const auto c = build_pair_torus(GroupElement(g, {1, 0}), GroupElement(g, {-1, 0}));
    EXPECT_EQ(c.kind, PairCase::torus_multiple);
    EXPECT_EQ(c.f1.ones_count(), 21u);
    EXPECT_FALSE(naive_shift_related(c.f1, c.f2));
}

TEST(Pairs, ProductExamples) {
    const auto g = GroupSpec::parse("Z7xZ11");
    const auto a = build_pair_product(GroupElement(g, {1, 0}), GroupElement(g, {2, 0}));
    EXPECT_EQ(a.factor, std::optional<std::size_t>(0));
    for (Rank k = 0; k < g.order(); ++k) {
        // Depends only on the Z7 coordinate.
        const auto e = GroupElement::from_rank(g, k);
        EXPECT_EQ(a.f1(k), a.f1(GroupElement(g, {e[0], 0}).rank()));
    }
    const auto b = build_pair_product(GroupElement(g, {1, 3}), GroupElement(g, {1, 5}));
    EXPECT_EQ(b.factor, std::optional<std::size_t>(1));
    EXPECT_THROW(build_pair_product(GroupElement(g, {1, 3}), GroupElement(g, {1, 3})), DomainError);
    const auto d = build_pair_product(GroupElement(g, {0, 3}), GroupElement(g, {2, 3}));
    EXPECT_EQ(d.kind, PairCase::torus_degenerate);
    EXPECT_FALSE(naive_shift_related(d.f1, d.f2));
}

TEST(Pairs, ParityExample) {
    const auto ex = parity_example_Z12();
    EXPECT_EQ(ex.pair.f1.ones_count(), 6u);
    EXPECT_EQ(ex.pair.f2.ones_count(), 6u);
    EXPECT_FALSE(naive_shift_related(ex.pair.f1, ex.pair.f2));
    EXPECT_TRUE(is_symmetric(ex.walk));
}

TEST(Pairs, StayPut) {
    const auto p = build_pair_stay_put(GroupSpec::cycle(13));
    EXPECT_EQ(p.f1.ones_count(), p.f2.ones_count());
    EXPECT_FALSE(naive_shift_related(p.f1, p.f2));
    EXPECT_THROW(build_pair_stay_put(GroupSpec::cycle(2)), DomainError);
}

// =============================================================================
// Properties
// =============================================================================

TEST(SceneryProperties, IsShiftOfMatchesExhaustive) {
    std::mt19937_64 rng(1);
    for (const char* text : {"Z7", "Z12", "Z3^2", "Z2xZ5"}) {
        const auto g = GroupSpec::parse(text);
        for (int i = 0; i < 200; ++i) {
            const auto a = random_scenery(g, rng);
            const auto b = (i % 2) ? shift(a, rng() % g.order()) : random_scenery(g, rng);
            const auto s = is_shift_of(a, b);
            EXPECT_EQ(s.has_value(), naive_shift_related(a, b));
            if (s) EXPECT_EQ(shift(b, *s), a);
        }
    }
}

TEST(SceneryProperties, MultiplyPreservesOnesCount) {
    std::mt19937_64 rng(2);
    for (std::int64_t p : {7, 11, 13}) {
        const auto g = GroupSpec::cycle(p);
        for (int i = 0; i < 50; ++i) {
            const auto f = random_scenery(g, rng);
            const std::int64_t v = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(p - 1));
            EXPECT_EQ(multiply_coords(f, v).ones_count(), f.ones_count());
        }
    }
}

TEST(SceneryProperties, CyclePairIsMultiplyCoords) {
    for (std::int64_t p : {7, 11, 13, 17}) {
        for (std::int64_t v = 2; v < p; ++v) {
            const auto pair = build_pair_cycle(p, v);
            EXPECT_EQ(pair.f2, multiply_coords(pair.f1, v));
            EXPECT_FALSE(naive_shift_related(pair.f1, pair.f2)) << p << " " << v;
        }
    }
}

TEST(SceneryProperties, IndependentTorusPairsAreHyperplanes) {
    for (std::int64_t p : {7, 11}) {
        for (int d : {2, 3}) {
            const auto g = GroupSpec::parse("Z" + std::to_string(p) + "^" + std::to_string(d));
            std::vector<std::int64_t> x(static_cast<std::size_t>(d), 0), y = x;
            x[0] = 1;
            y[1] = 3;
            const auto pair = build_pair_torus(GroupElement(g, x), GroupElement(g, y));
            std::size_t expected = 1;
            for (int i = 0; i < d - 1; ++i) expected *= static_cast<std::size_t>(p);
            EXPECT_EQ(pair.f1.ones_count(), expected);
            EXPECT_EQ(pair.f2.ones_count(), expected);
        }
    }
}
