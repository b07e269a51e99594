#pragma once

/**
 * @file scenery.hpp
 * @brief Binary sceneries on finite abelian groups and the explicit
 * indistinguishable pairs built from Fourier collisions.
 */

#include "scenerylab/errors.hpp"
#include "scenerylab/group.hpp"
#include "scenerylab/walk.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scenerylab {

/// A labeling f: H -> {0,1}, stored densely by element rank.
class Scenery {
public:
    Scenery(GroupSpec g, std::vector<std::uint8_t> bits) : group_(std::move(g)), bits_(std::move(bits)) {
        if (bits_.size() != group_.order())
            throw StructuralError("scenery has " + std::to_string(bits_.size()) + " bits but the group has order " +
                                  std::to_string(group_.order()));
        for (auto& b : bits_)
            if (b > 1) throw DomainError("scenery bits must be 0 or 1");
    }

    static Scenery zeros(GroupSpec g) {
        g.require_enumerable();
        const auto n = static_cast<std::size_t>(g.order());
        return Scenery(std::move(g), std::vector<std::uint8_t>(n, 0));
    }
    static Scenery ones(GroupSpec g) {
        g.require_enumerable();
        const auto n = static_cast<std::size_t>(g.order());
        return Scenery(std::move(g), std::vector<std::uint8_t>(n, 1));
    }
    static Scenery indicator(GroupSpec g, const std::vector<Rank>& positions) {
        Scenery f = zeros(std::move(g));
        for (Rank r : positions) {
            if (r >= f.group_.order()) throw DomainError("position outside the group");
            f.bits_[static_cast<std::size_t>(r)] = 1;
        }
        return f;
    }
    /// Indicator of integer positions on Z_n (taken mod n).
    static Scenery indicator_on_cycle(std::int64_t n, const std::vector<std::int64_t>& positions) {
        std::vector<Rank> ranks;
        for (auto p : positions) ranks.push_back(static_cast<Rank>(mod_floor(p, n)));
        return indicator(GroupSpec::cycle(n), ranks);
    }

    const GroupSpec& group() const noexcept { return group_; }
    std::size_t size() const noexcept { return bits_.size(); }
    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
    std::uint8_t operator()(Rank r) const { return bits_[static_cast<std::size_t>(r)]; }
    std::uint8_t at(const GroupElement& e) const { return bits_.at(static_cast<std::size_t>(e.rank())); }

    std::size_t ones_count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }
    std::vector<Rank> ones_positions() const {
        std::vector<Rank> out;
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) out.push_back(static_cast<Rank>(i));
        return out;
    }

    std::string to_string() const {
        std::string s;
        for (auto b : bits_) s += static_cast<char>('0' + b);
        return s;
    }

    friend bool operator==(const Scenery& a, const Scenery& b) { return a.group_ == b.group_ && a.bits_ == b.bits_; }
    friend bool operator<(const Scenery& a, const Scenery& b) { return a.bits_ < b.bits_; }

private:
    GroupSpec group_;
    std::vector<std::uint8_t> bits_;
};

/// result(k) = f(k + s).
inline Scenery shift(const Scenery& f, Rank s) {
    const auto& g = f.group();
    std::vector<std::uint8_t> out(f.size());
    for (Rank k = 0; k < g.order(); ++k) out[static_cast<std::size_t>(k)] = f(g.add_ranks(k, s));
    return Scenery(g, std::move(out));
}
inline Scenery shift(const Scenery& f, const GroupElement& s) {
    if (!(s.group() == f.group())) throw StructuralError("shift element is not in the scenery's group");
    return shift(f, s.rank());
}

/**
 * Smallest s (by rank, i.e. lexicographically) with f1 = shift(f2, s).
 * Candidates come from matching the first one of f1 (or zero, when ones
 * outnumber zeros) against every one of f2.
 */
inline std::optional<Rank> is_shift_of(const Scenery& f1, const Scenery& f2) {
    if (!(f1.group() == f2.group())) throw StructuralError("sceneries live on different groups");
    const auto& g = f1.group();
    const std::size_t ones = f1.ones_count();
    if (ones != f2.ones_count()) return std::nullopt;
    if (ones == 0 || ones == f1.size()) return Rank{0};
    const std::uint8_t target = ones * 2 <= f1.size() ? 1 : 0;
    std::vector<Rank> p1, p2;
    for (Rank k = 0; k < g.order(); ++k) {
        if (f1(k) == target) p1.push_back(k);
        if (f2(k) == target) p2.push_back(k);
    }
    // f1(k) = f2(k + s): p1 + s = p2 as sets.
    std::vector<Rank> shifts;
    for (Rank q : p2) {
        const Rank s = g.sub_ranks(q, p1.front());
        bool ok = true;
        for (Rank k : p1)
            if (f2(g.add_ranks(k, s)) != target) {
                ok = false;
                break;
            }
        if (ok) shifts.push_back(s);
    }
    if (shifts.empty()) return std::nullopt;
    return *std::min_element(shifts.begin(), shifts.end());
}

/// result(k) = f(-k).
inline Scenery flip(const Scenery& f) {
    const auto& g = f.group();
    std::vector<std::uint8_t> out(f.size());
    for (Rank k = 0; k < g.order(); ++k) out[static_cast<std::size_t>(k)] = f(g.neg_rank(k));
    return Scenery(g, std::move(out));
}

/// g with g(v k) = f(k); v must be a unit modulo every factor.
inline Scenery multiply_coords(const Scenery& f, std::int64_t v) {
    const auto& g = f.group();
    for (const auto& fac : g.factors())
        if (std::gcd(mod_floor(v, fac.modulus), fac.modulus) != 1)
            throw DomainError("multiplier " + std::to_string(v) + " is not invertible modulo " +
                              std::to_string(fac.modulus));
    std::vector<std::uint8_t> out(f.size());
    for (Rank k = 0; k < g.order(); ++k) out[static_cast<std::size_t>(g.scale_rank(v, k))] = f(k);
    return Scenery(g, std::move(out));
}

/// Lexicographically smallest bit string among all shifts of f.
inline Scenery canonical_shift(const Scenery& f) {
    const auto& g = f.group();
    std::vector<std::uint8_t> best = f.bits(), cur(f.size());
    for (Rank s = 1; s < g.order(); ++s) {
        for (Rank k = 0; k < g.order(); ++k) cur[static_cast<std::size_t>(k)] = f(g.add_ranks(k, s));
        if (cur < best) best = cur;
    }
    return Scenery(g, std::move(best));
}

inline bool is_canonical_shift(const Scenery& f) {
    const auto& g = f.group();
    const auto& bits = f.bits();
    for (Rank s = 1; s < g.order(); ++s) {
        for (Rank k = 0; k < g.order(); ++k) {
            const auto a = f(g.add_ranks(k, s)), b = bits[static_cast<std::size_t>(k)];
            if (a < b) return false;
            if (a > b) break;
        }
    }
    return true;
}

/// Shift-orbit representatives (canonical forms), optionally with a fixed ones-count.
inline std::vector<Scenery> orbit_representatives(const GroupSpec& g, std::optional<std::size_t> ones = std::nullopt,
                                                  std::uint64_t max_order = 16) {
    if (g.order() > max_order) throw CapacityError("orbit enumeration needs |H| <= " + std::to_string(max_order));
    const auto n = static_cast<std::size_t>(g.order());
    std::vector<Scenery> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        if (ones && static_cast<std::size_t>(__builtin_popcountll(mask)) != *ones) continue;
        std::vector<std::uint8_t> bits(n);
        // Bit n-1-i of the mask is position i, so masks ascend in lexicographic bit-string order.
        for (std::size_t i = 0; i < n; ++i) bits[i] = static_cast<std::uint8_t>((mask >> (n - 1 - i)) & 1U);
        Scenery f(g, std::move(bits));
        if (is_canonical_shift(f)) out.push_back(std::move(f));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Indistinguishable pairs
// ---------------------------------------------------------------------------

enum class PairCase { cycle_multiplier, cycle_flip, stay_put, torus_multiple, torus_independent, torus_degenerate, parity_z12 };

inline const char* to_string(PairCase c) {
    switch (c) {
    case PairCase::cycle_multiplier: return "cycle-multiplier";
    case PairCase::cycle_flip: return "cycle-flip";
    case PairCase::stay_put: return "stay-put";
    case PairCase::torus_multiple: return "torus-multiple";
    case PairCase::torus_independent: return "torus-independent";
    case PairCase::torus_degenerate: return "torus-degenerate";
    case PairCase::parity_z12: return "parity-z12";
    }
    return "?";
}

/**
 * Two sceneries that no walk exhibiting the witnessed collision can tell
 * apart. `witness_map[k] = T(k)` with f1(k) = f2(T(k)); it is empty for the
 * parity example, whose argument is distributional.
 */
struct IndistinguishablePair {
    Scenery f1;
    Scenery f2;
    PairCase kind;
    std::optional<Rank> x;
    std::optional<Rank> y;
    std::optional<std::int64_t> multiplier;
    std::optional<std::size_t> factor;
    std::vector<Rank> witness_map;
    std::string transform;
};

namespace detail {

inline void verify_pair(const IndistinguishablePair& p) {
    if (is_shift_of(p.f1, p.f2)) throw InconsistencyError("constructed pair is shift-related");
    if (p.f1.ones_count() != p.f2.ones_count()) throw InconsistencyError("constructed pair has unequal ones-counts");
    for (Rank k = 0; k < p.witness_map.size(); ++k)
        if (p.f1(k) != p.f2(p.witness_map[static_cast<std::size_t>(k)]))
            throw InconsistencyError("witness transform fails at k=" + std::to_string(k));
}

inline bool is_unit_multiple(const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y, std::int64_t p,
                             std::int64_t& ell) {
    // x = ell * y with y != 0.
    std::size_t j = 0;
    while (j < y.size() && y[j] == 0) ++j;
    if (j == y.size()) return false;
    ell = mod_floor(x[j] * inverse_mod(y[j], p), p);
    for (std::size_t i = 0; i < y.size(); ++i)
        if (mod_floor(ell * y[i] - x[i], p) != 0) return false;
    return true;
}

} // namespace detail

/// f1 = indicator{0,1}, f2 = indicator{0,v}; v = -1 uses f1 = indicator{0,1,3} and f2 = flip(f1).
inline IndistinguishablePair build_pair_cycle(std::int64_t p, std::int64_t v) {
    if (!is_prime(static_cast<std::uint64_t>(p)) || p <= 5)
        throw DomainError("build_pair_cycle needs a prime p > 5, got " + std::to_string(p));
    v = mod_floor(v, p);
    if (v == 0 || v == 1) throw DomainError("multiplier " + std::to_string(v) + " yields no pair");
    const auto g = GroupSpec::cycle(p);
    const bool is_flip = v == p - 1;
    Scenery f1 = is_flip ? Scenery::indicator(g, {0, 1, 3}) : Scenery::indicator(g, {0, 1});
    Scenery f2 = multiply_coords(f1, v);
    IndistinguishablePair out{f1, f2, is_flip ? PairCase::cycle_flip : PairCase::cycle_multiplier,
                              Rank{1}, static_cast<Rank>(v), v, std::size_t{0}, {}, ""};
    for (Rank k = 0; k < g.order(); ++k) out.witness_map.push_back(g.scale_rank(v, k));
    out.transform = "T(k) = " + std::to_string(v) + " k";
    detail::verify_pair(out);
    return out;
}

/**
 * Pair for a walk with gamma(0) = 1: two sceneries with two ones each that
 * are not shifts of one another.
 */
inline IndistinguishablePair build_pair_stay_put(const GroupSpec& g) {
    g.require_enumerable(1u << 16);
    const Scenery base = Scenery::indicator(g, {0, 1});
    for (Rank b = 2; b < g.order(); ++b) {
        Scenery other = Scenery::indicator(g, {0, b});
        if (is_shift_of(base, other)) continue;
        IndistinguishablePair out{base, other, PairCase::stay_put, std::nullopt, std::nullopt, std::nullopt,
                                  std::nullopt, {}, "any two sceneries with equal ones-count"};
        detail::verify_pair(out);
        return out;
    }
    throw DomainError("every two-point scenery on " + g.to_string() + " is a shift of {0,1}");
}

namespace detail {

/**
 * Pair on the factor Z_p^d at `factor`, lifted to the whole group. xs and ys
 * are the factor coordinates of the collision; sceneries depend only on them.
 */
inline IndistinguishablePair build_factor_pair(const GroupSpec& g, std::size_t factor, const std::vector<std::int64_t>& xs,
                                               const std::vector<std::int64_t>& ys, Rank x, Rank y) {
    const auto p = g.factors()[factor].modulus;
    const std::size_t off = g.factor_offset(factor), dim = xs.size();
    auto is_zero_vec = [](const std::vector<std::int64_t>& v) {
        return std::all_of(v.begin(), v.end(), [](std::int64_t c) { return c == 0; });
    };
    const bool x0 = is_zero_vec(xs), y0 = is_zero_vec(ys);
    auto dot_with = [&](const std::vector<std::int64_t>& w, Rank k) {
        std::int64_t s = 0;
        for (std::size_t i = 0; i < dim; ++i) s += w[i] * g.coord_of(k, off + i);
        return mod_floor(s, p);
    };

    std::vector<std::uint8_t> h1(static_cast<std::size_t>(p), 0), h2(static_cast<std::size_t>(p), 0);
    std::vector<std::int64_t> u1, u2;  // the functionals fed to h1, h2
    PairCase kind;
    std::string desc;
    if (x0 || y0) {
        // One side is constant on the factor: the walk cannot move along the other functional.
        const auto& w = x0 ? ys : xs;
        u1 = w;
        u2 = w;
        h1[0] = h1[1] = 1;
        h2[0] = h2[2] = 1;
        kind = PairCase::torus_degenerate;
        desc = "f1(k) = h1(w.k), f2(k) = h2(w.k) with h1 = {0,1}, h2 = {0,2}, w the nonzero collision coordinate";
    } else {
        std::int64_t ell = 0;
        u1 = xs;
        u2 = ys;
        if (is_unit_multiple(xs, ys, p, ell)) {
            if (ell == p - 1) {
                h1[0] = h1[1] = h1[3] = 1;
            } else {
                h1[0] = h1[1] = 1;
            }
            kind = PairCase::torus_multiple;
            desc = "x = " + std::to_string(ell) + " y; f1(k) = g(x.k), f2(k) = g(y.k) with g = " +
                   (ell == p - 1 ? std::string("{0,1,3}") : std::string("{0,1}"));
        } else {
            h1[0] = 1;
            kind = PairCase::torus_independent;
            desc = "x not a multiple of y; f1, f2 are the indicators of the hyperplanes x.k = 0 and y.k = 0";
        }
        h2 = h1;
    }

    std::vector<std::uint8_t> b1(static_cast<std::size_t>(g.order())), b2(b1.size());
    for (Rank k = 0; k < g.order(); ++k) {
        b1[static_cast<std::size_t>(k)] = h1[static_cast<std::size_t>(dot_with(u1, k))];
        b2[static_cast<std::size_t>(k)] = h2[static_cast<std::size_t>(dot_with(u2, k))];
    }

    // T(k) = k + c(k) z on the factor, with u2 . z = 1 and u2 . T(k) = m(k) where h1(u1.k) = h2(m(k)).
    std::vector<std::int64_t> z(dim, 0);
    {
        std::size_t j = 0;
        while (u2[j] == 0) ++j;
        z[j] = inverse_mod(u2[j], p);
    }
    IndistinguishablePair out{Scenery(g, std::move(b1)), Scenery(g, std::move(b2)), kind, x, y, std::nullopt, factor,
                              {}, desc};
    std::vector<std::int64_t> coords(g.num_coords());
    for (Rank k = 0; k < g.order(); ++k) {
        const std::int64_t a = dot_with(u1, k), b = dot_with(u2, k);
        const std::int64_t target = kind == PairCase::torus_degenerate ? mod_floor(2 * a, p) : a;
        const std::int64_t c = mod_floor(target - b, p);
        g.unrank_into(k, coords);
        for (std::size_t i = 0; i < dim; ++i) coords[off + i] = mod_floor(coords[off + i] + c * z[i], p);
        out.witness_map.push_back(g.rank(coords));
    }
    out.transform = "T(k) = k + (" + std::string(kind == PairCase::torus_degenerate ? "2 w.k" : "x.k") +
                    " - y.k) z on factor " + std::to_string(factor) + ", y.z = 1";
    if (kind == PairCase::torus_multiple && g.num_coords() == 1) {
        std::int64_t ell = 0;
        is_unit_multiple(xs, ys, p, ell);
        out.multiplier = inverse_mod(ell, p);
    }
    verify_pair(out);
    return out;
}

} // namespace detail

/// Pair on Z_p^d from a collision (x, y), both nonzero and distinct.
inline IndistinguishablePair build_pair_torus(const GroupElement& x, const GroupElement& y) {
    const auto& g = x.group();
    if (!(g == y.group())) throw StructuralError("collision elements are in different groups");
    if (g.num_factors() != 1) throw DomainError("build_pair_torus needs a single factor Z_p^d");
    const auto p = g.factors()[0].modulus;
    if (!is_prime(static_cast<std::uint64_t>(p)) || p <= 5) throw DomainError("build_pair_torus needs prime p > 5");
    if (x == y) throw DomainError("build_pair_torus needs x != y");
    if (x.is_zero() || y.is_zero()) return build_pair_stay_put(g);
    const std::vector<std::int64_t> xs(x.coords().begin(), x.coords().end()), ys(y.coords().begin(), y.coords().end());
    return detail::build_factor_pair(g, 0, xs, ys, x.rank(), y.rank());
}

/// Pair on a product of distinct primes > 5, built on the first factor where x and y differ.
inline IndistinguishablePair build_pair_product(const GroupElement& x, const GroupElement& y) {
    const auto& g = x.group();
    if (!(g == y.group())) throw StructuralError("collision elements are in different groups");
    for (const auto& f : g.factors())
        if (!is_prime(static_cast<std::uint64_t>(f.modulus)) || f.modulus <= 5)
            throw DomainError("build_pair_product needs every factor to be Z_p^d with p > 5 prime");
    if (x == y) throw DomainError("build_pair_product needs x != y");
    if (x.is_zero() || y.is_zero()) return build_pair_stay_put(g);
    for (std::size_t j = 0; j < g.num_factors(); ++j) {
        const auto xspan = x.factor_coords(j), yspan = y.factor_coords(j);
        const std::vector<std::int64_t> xs(xspan.begin(), xspan.end()), ys(yspan.begin(), yspan.end());
        if (xs != ys) return detail::build_factor_pair(g, j, xs, ys, x.rank(), y.rank());
    }
    throw InconsistencyError("x != y but no factor differs");
}

/// Pair for a collision reported by analyze(), dispatched on group shape.
inline IndistinguishablePair build_pair_for_collision(const GroupSpec& g, Rank x, Rank y) {
    const auto ex = GroupElement::from_rank(g, x), ey = GroupElement::from_rank(g, y);
    if (x == 0 || y == 0) return build_pair_stay_put(g);
    if (g.is_cycle()) {
        const auto p = g.factors()[0].modulus;
        return build_pair_cycle(p, mod_floor(inverse_mod(static_cast<std::int64_t>(x), p) * static_cast<std::int64_t>(y), p));
    }
    if (g.num_factors() == 1) return build_pair_torus(ex, ey);
    return build_pair_product(ex, ey);
}

struct ParityExample {
    IndistinguishablePair pair;
    StepDistribution walk;
};

/// f1 = 1 on odd k, f2 = 1 on k mod 6 in {3,4,5}, on Z_12 under uniform{-2,-1,1,2}.
inline ParityExample parity_example_Z12() {
    const auto g = GroupSpec::cycle(12);
    std::vector<Rank> odd, high;
    for (Rank k = 0; k < 12; ++k) {
        if (k % 2 == 1) odd.push_back(k);
        if (k % 6 >= 3) high.push_back(k);
    }
    IndistinguishablePair pair{Scenery::indicator(g, odd), Scenery::indicator(g, high), PairCase::parity_z12,
                               std::nullopt, std::nullopt, std::nullopt, std::nullopt, {},
                               "observations are i.i.d. fair bits under both sceneries"};
    detail::verify_pair(pair);
    return {pair, StepDistribution::uniform_on_cycle(12, {-2, -1, 1, 2})};
}

} // namespace scenerylab
