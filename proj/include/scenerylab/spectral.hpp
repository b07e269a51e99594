#pragma once

/**
 * @file spectral.hpp
 * @brief Autocorrelations, multispectra and the exact recovery of a scenery
 * (up to shift) from the temporal statistics of a walk with distinct
 * Fourier coefficients.
 *
 * Conventions:
 *
 *     a_f(l)            = sum_k f(k) f(k+l)
 *     b_f(l)            = (1/n) sum_x gamma^(l)(x) a_f(x)
 *                       = (1/n^2) sum_x gamma_hat(x)^l a_hat_f(x)     (unnormalized transform)
 *     A_f(l_1..l_m)     = sum_k f(k) f(k+l_1) ... f(k+l_1+...+l_m),   m = n-1
 *     B_f(l_1..l_m)     = (1/n) sum_x gamma^(l_1)(x_1)...gamma^(l_m)(x_m) A_f(x_1..x_m)
 *
 * Tuples of group elements are packed into a 64-bit key, 8 bits per
 * entry (first entry most significant), so multispectra need n <= 8 here.
 */

#include "scenerylab/cyclotomic.hpp"
#include "scenerylab/errors.hpp"
#include "scenerylab/group.hpp"
#include "scenerylab/linalg.hpp"
#include "scenerylab/scenery.hpp"
#include "scenerylab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

namespace scenerylab {

inline constexpr std::uint64_t kMultispectrumMaxOrder = 8;
inline constexpr std::uint64_t kDenseTensorMaxOrder = 6;

using TupleKey = std::uint64_t;

inline TupleKey pack_tuple(const std::vector<Rank>& t) {
    TupleKey k = 0;
    for (Rank r : t) k = (k << 8U) | (r & 0xFFU);
    return k;
}

inline std::vector<Rank> unpack_tuple(TupleKey k, std::size_t arity) {
    std::vector<Rank> t(arity);
    for (std::size_t i = arity; i-- > 0;) {
        t[i] = k & 0xFFU;
        k >>= 8U;
    }
    return t;
}

// ---------------------------------------------------------------------------
// Autocorrelations
// ---------------------------------------------------------------------------

/// a_f indexed by rank.
using SpatialAutocorrelation = std::vector<std::int64_t>;

/// b_f(0..L).
using TemporalAutocorrelation = std::vector<Rational>;

inline SpatialAutocorrelation spatial_autocorrelation(const Scenery& f) {
    const auto& g = f.group();
    g.require_enumerable(1u << 16);
    const auto ones = f.ones_positions();
    SpatialAutocorrelation a(f.size(), 0);
    for (Rank k : ones)
        for (Rank q : ones) ++a[static_cast<std::size_t>(g.sub_ranks(q, k))];
    return a;
}

/// (u * w)(z) = sum_k u(k) w(z - k).
inline std::vector<Rational> convolve(const GroupSpec& g, const std::vector<Rational>& u, const std::vector<Rational>& w) {
    std::vector<Rational> out(u.size(), Rational(0));
    for (Rank k = 0; k < g.order(); ++k) {
        if (sgn(u[static_cast<std::size_t>(k)]) == 0) continue;
        for (Rank j = 0; j < g.order(); ++j) {
            if (sgn(w[static_cast<std::size_t>(j)]) == 0) continue;
            out[static_cast<std::size_t>(g.add_ranks(k, j))] += u[static_cast<std::size_t>(k)] * w[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

/// gamma^(0), ..., gamma^(L): laws of the sum of l increments.
inline std::vector<std::vector<Rational>> convolution_powers(const StepDistribution& gamma, std::size_t L) {
    const auto& g = gamma.group();
    const auto probs = gamma.exact_probs();
    const std::vector<Rational> step(probs.begin(), probs.end());
    std::vector<std::vector<Rational>> out;
    std::vector<Rational> cur(static_cast<std::size_t>(g.order()), Rational(0));
    cur[0] = 1;
    out.push_back(cur);
    for (std::size_t l = 1; l <= L; ++l) {
        cur = convolve(g, cur, step);
        out.push_back(cur);
    }
    return out;
}

inline TemporalAutocorrelation temporal_autocorrelation_exact(const StepDistribution& gamma, const Scenery& f,
                                                              std::size_t L) {
    if (!(gamma.group() == f.group())) throw StructuralError("walk and scenery live on different groups");
    const auto a = spatial_autocorrelation(f);
    const auto powers = convolution_powers(gamma, L);
    const Rational inv_n(1, static_cast<unsigned long>(f.size()));
    TemporalAutocorrelation b;
    for (const auto& gl : powers) {
        Rational s = 0;
        for (std::size_t x = 0; x < gl.size(); ++x)
            if (a[x] != 0) s += gl[x] * a[x];
        b.push_back(s * inv_n);
    }
    return b;
}

/// Exact a_hat(x) = sum_l a(l) w^{l.x} in the cyclotomic field of the group's primes.
inline std::vector<CyclotomicNumber> exact_transform(const SpatialAutocorrelation& a, const GroupSpec& g,
                                                     const CyclotomicContext& ctx) {
    std::vector<CyclotomicNumber> out;
    for (Rank x = 0; x < g.order(); ++x) {
        CyclotomicPolynomial poly(ctx);
        for (Rank l = 0; l < g.order(); ++l)
            if (a[static_cast<std::size_t>(l)] != 0) poly.add_term(character_exponents(g, l, x), a[static_cast<std::size_t>(l)]);
        out.push_back(reduce(poly));
    }
    return out;
}

/// b_f(0..L) from the Fourier side, (1/n^2) sum_x gamma_hat(x)^l a_hat(x), exactly.
inline TemporalAutocorrelation temporal_autocorrelation_fourier(const StepDistribution& gamma, const Scenery& f,
                                                                std::size_t L) {
    const FourierTable table = fourier_transform(gamma);
    const auto& g = gamma.group();
    const auto& ctx = table.exact_at(0).context();
    const auto ahat = exact_transform(spatial_autocorrelation(f), g, ctx);
    std::vector<CyclotomicNumber> power(static_cast<std::size_t>(g.order()), CyclotomicNumber(ctx, 1));
    const Rational inv_n2(1, static_cast<unsigned long>(g.order() * g.order()));
    TemporalAutocorrelation b;
    for (std::size_t l = 0; l <= L; ++l) {
        CyclotomicNumber s(ctx);
        for (std::size_t x = 0; x < power.size(); ++x) s += power[x] * ahat[x];
        if (!s.is_rational()) throw InconsistencyError("temporal autocorrelation is not rational at lag " + std::to_string(l));
        b.push_back(s.rational_value() * inv_n2);
        for (std::size_t x = 0; x < power.size(); ++x) power[x] = power[x] * table.exact_at(static_cast<Rank>(x));
    }
    return b;
}

namespace detail {

inline std::vector<std::int64_t> to_nonnegative_integers(const std::vector<Rational>& v, const char* what) {
    std::vector<std::int64_t> out;
    for (const auto& q : v) {
        if (q.get_den() != 1 || sgn(q) < 0 || !q.get_num().fits_slong_p())
            throw InconsistencyError(std::string(what) + " entry " + q.get_str() + " is not a nonnegative integer");
        out.push_back(q.get_num().get_si());
    }
    return out;
}

inline void require_distinct(const StepDistribution& gamma) {
    const auto scan = find_collisions(fourier_transform_any(gamma));
    if (!scan.pairs.empty() || !scan.near_ties.empty()) {
        const auto& p = scan.pairs.empty() ? scan.near_ties.front() : scan.pairs.front();
        throw SingularSystemError("Fourier coefficients collide at (" + std::to_string(p.first) + ", " +
                                  std::to_string(p.second) + "); the Vandermonde system is singular");
    }
}

} // namespace detail

/**
 * Solves b(l) = (1/n^2) sum_x gamma_hat(x)^l a_hat(x), l = 0..n-1, over the
 * cyclotomic field, then inverts the transform. Needs an exact walk on a
 * group whose moduli are prime.
 */
inline SpatialAutocorrelation vandermonde_recover_af(const StepDistribution& gamma, const TemporalAutocorrelation& b) {
    const auto& g = gamma.group();
    const auto n = static_cast<std::size_t>(g.order());
    if (b.size() < n) throw DomainError("need b_f at lags 0.." + std::to_string(n - 1));
    detail::require_distinct(gamma);
    const FourierTable table = fourier_transform(gamma);
    const auto& ctx = table.exact_at(0).context();
    Matrix<CyclotomicNumber> v(n, std::vector<CyclotomicNumber>(n, CyclotomicNumber(ctx)));
    for (std::size_t x = 0; x < n; ++x) {
        CyclotomicNumber p(ctx, 1);
        for (std::size_t l = 0; l < n; ++l) {
            v[l][x] = p;
            p = p * table.exact_at(static_cast<Rank>(x));
        }
    }
    std::vector<CyclotomicNumber> rhs;
    const Rational n2(static_cast<long>(n * n));
    for (std::size_t l = 0; l < n; ++l) rhs.emplace_back(ctx, b[l] * n2);
    const auto ahat = solve(std::move(v), std::move(rhs));
    // a(l) = (1/n) sum_x a_hat(x) w^{-l.x}
    std::vector<Rational> a;
    for (Rank l = 0; l < n; ++l) {
        CyclotomicNumber s(ctx);
        for (Rank x = 0; x < n; ++x) {
            const auto e = character_exponents(g, g.neg_rank(l), x);
            s += ahat[static_cast<std::size_t>(x)] * CyclotomicNumber::monomial(ctx, e);
        }
        if (!s.is_rational()) throw InconsistencyError("recovered autocorrelation is not rational");
        a.push_back(s.rational_value() / Rational(static_cast<long>(n)));
    }
    return detail::to_nonnegative_integers(a, "recovered autocorrelation");
}

/**
 * Rational route to the same answer: G[l][x] = gamma^(l)(x), b = (1/n) G a.
 * G is invertible exactly when the Fourier coefficients are distinct.
 */
inline SpatialAutocorrelation rational_recover_af(const StepDistribution& gamma, const TemporalAutocorrelation& b) {
    const auto n = static_cast<std::size_t>(gamma.group().order());
    if (b.size() < n) throw DomainError("need b_f at lags 0.." + std::to_string(n - 1));
    const auto powers = convolution_powers(gamma, n - 1);
    Matrix<Rational> gm(powers.begin(), powers.end());
    std::vector<Rational> rhs;
    for (std::size_t l = 0; l < n; ++l) rhs.push_back(b[l] * Rational(static_cast<long>(n)));
    return detail::to_nonnegative_integers(solve(std::move(gm), std::move(rhs)), "recovered autocorrelation");
}

// ---------------------------------------------------------------------------
// Multispectra
// ---------------------------------------------------------------------------

/// Sparse multispectrum over H^m; absent tuples are zero.
template <class V>
struct Multispectrum {
    GroupSpec group;
    std::size_t arity = 0;
    std::map<TupleKey, V> entries;

    V at(const std::vector<Rank>& t) const {
        auto it = entries.find(pack_tuple(t));
        return it == entries.end() ? V(0) : it->second;
    }
    V at_key(TupleKey k) const {
        auto it = entries.find(k);
        return it == entries.end() ? V(0) : it->second;
    }
    friend bool operator==(const Multispectrum& a, const Multispectrum& b) {
        return a.group == b.group && a.arity == b.arity && a.entries == b.entries;
    }
};

using SpatialMultispectrum = Multispectrum<std::int64_t>;
using TemporalMultispectrum = Multispectrum<Rational>;

namespace detail {

inline void require_multispectrum_order(const GroupSpec& g) {
    if (g.order() > kMultispectrumMaxOrder)
        throw CapacityError("multispectra need |H| <= " + std::to_string(kMultispectrumMaxOrder) + ", got " +
                            std::to_string(g.order()));
}

/// Jumps l_i = p_i - p_{i-1} of the walk that visits the given positions in order, padded with zeros.
inline std::vector<Rank> visiting_tuple(const GroupSpec& g, const std::vector<Rank>& positions, std::size_t arity) {
    std::vector<Rank> t(arity, 0);
    for (std::size_t i = 1; i < positions.size() && i <= arity; ++i) t[i - 1] = g.sub_ranks(positions[i], positions[i - 1]);
    return t;
}

} // namespace detail

inline SpatialMultispectrum spatial_multispectrum(const Scenery& f) {
    const auto& g = f.group();
    detail::require_multispectrum_order(g);
    const std::size_t m = f.size() - 1;
    SpatialMultispectrum out{g, m, {}};
    const auto ones = f.ones_positions();
    if (ones.empty()) return out;
    std::unordered_map<TupleKey, std::int64_t> acc;
    // Odometer over (p_1..p_m) in ones^m; the tuple is the successive differences.
    std::vector<std::size_t> idx(m, 0);
    for (Rank start : ones) {
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            TupleKey key = 0;
            Rank prev = start;
            for (std::size_t i = 0; i < m; ++i) {
                const Rank cur = ones[idx[i]];
                key = (key << 8U) | g.sub_ranks(cur, prev);
                prev = cur;
            }
            ++acc[key];
            std::size_t i = m;
            while (i > 0 && idx[i - 1] + 1 == ones.size()) idx[--i] = 0;
            if (i == 0) break;
            ++idx[i - 1];
        }
    }
    out.entries.insert(acc.begin(), acc.end());
    return out;
}

/// A_f(t) for one tuple, computed directly.
inline std::int64_t spatial_multispectrum_entry(const Scenery& f, const std::vector<Rank>& t) {
    const auto& g = f.group();
    std::int64_t s = 0;
    for (Rank k : f.ones_positions()) {
        Rank p = k;
        bool all = true;
        for (Rank l : t) {
            p = g.add_ranks(p, l);
            if (!f(p)) {
                all = false;
                break;
            }
        }
        s += all;
    }
    return s;
}

/// f_hat(x) = sum_k f(k) w^{k.x} in double precision.
inline std::vector<std::complex<double>> scenery_fourier(const Scenery& f) {
    const auto& g = f.group();
    std::vector<std::complex<double>> out;
    for (Rank x = 0; x < g.order(); ++x) {
        std::complex<double> s = 0;
        for (Rank k : f.ones_positions()) {
            double phase = 0;
            for (std::size_t i = 0; i < g.num_factors(); ++i)
                phase += static_cast<double>(g.dot_ranks(k, x, i)) / static_cast<double>(g.factors()[i].modulus);
            s += std::polar(1.0, -2.0 * M_PI * phase);
        }
        out.push_back(s);
    }
    return out;
}

/// Dense A_hat over H^m from f_hat: conj(f_hat(x_1)) f_hat(x_m) prod f_hat(x_i - x_{i+1}); index is the packed tuple in odometer order.
inline std::vector<std::complex<double>> multispectrum_fourier(const Scenery& f) {
    const auto& g = f.group();
    if (g.order() > kDenseTensorMaxOrder)
        throw CapacityError("dense multispectrum transform needs |H| <= " + std::to_string(kDenseTensorMaxOrder));
    const auto n = static_cast<std::size_t>(g.order());
    const std::size_t m = n - 1;
    const auto fh = scenery_fourier(f);
    std::size_t total = 1;
    for (std::size_t i = 0; i < m; ++i) total *= n;
    std::vector<std::complex<double>> out(total);
    std::vector<Rank> x(m, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t r = idx;
        for (std::size_t i = m; i-- > 0;) {
            x[i] = r % n;
            r /= n;
        }
        std::complex<double> v = std::conj(fh[static_cast<std::size_t>(x[0])]) * fh[static_cast<std::size_t>(x[m - 1])];
        for (std::size_t i = 0; i + 1 < m; ++i) v *= fh[static_cast<std::size_t>(g.sub_ranks(x[i], x[i + 1]))];
        out[idx] = v;
    }
    return out;
}

namespace detail {

/// u <- (u * w) pointwise-times f.
inline std::vector<Rational> propagate(const GroupSpec& g, const std::vector<Rational>& u, const std::vector<Rational>& w,
                                       const Scenery& f) {
    auto out = convolve(g, u, w);
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!f(static_cast<Rank>(i))) out[i] = 0;
    return out;
}

} // namespace detail

/// B_f at the requested tuples, by forward propagation of f/n through gamma^(l_i).
inline TemporalMultispectrum temporal_multispectrum_exact(const StepDistribution& gamma, const Scenery& f,
                                                          const std::vector<std::vector<Rank>>& tuples) {
    const auto& g = f.group();
    if (!(gamma.group() == g)) throw StructuralError("walk and scenery live on different groups");
    detail::require_multispectrum_order(g);
    const std::size_t m = f.size() - 1;
    std::size_t max_lag = 0;
    for (const auto& t : tuples) {
        if (t.size() != m) throw StructuralError("tuple arity must be |H| - 1");
        for (Rank l : t) max_lag = std::max<std::size_t>(max_lag, l);
    }
    const auto powers = convolution_powers(gamma, max_lag);
    std::vector<Rational> u0(f.size(), Rational(0));
    for (Rank k : f.ones_positions()) u0[static_cast<std::size_t>(k)] = Rational(1, static_cast<unsigned long>(f.size()));
    TemporalMultispectrum out{g, m, {}};
    for (const auto& t : tuples) {
        auto u = u0;
        for (Rank l : t) u = detail::propagate(g, u, powers[static_cast<std::size_t>(l)], f);
        Rational s = 0;
        for (const auto& q : u) s += q;
        if (sgn(s) != 0) out.entries[pack_tuple(t)] = s;
    }
    return out;
}

/// B_f on the full grid {0..n-1}^m (lags as integers), sharing prefixes.
inline std::vector<Rational> temporal_multispectrum_grid(const StepDistribution& gamma, const Scenery& f) {
    const auto& g = f.group();
    const std::size_t n = f.size(), m = n - 1;
    const auto powers = convolution_powers(gamma, n - 1);
    std::size_t total = 1;
    for (std::size_t i = 0; i < m; ++i) total *= n;
    std::vector<Rational> out(total, Rational(0));
    std::vector<Rational> u0(n, Rational(0));
    for (Rank k : f.ones_positions()) u0[static_cast<std::size_t>(k)] = Rational(1, static_cast<unsigned long>(n));
    // Depth-first over prefixes: level i holds u after i lags.
    std::vector<std::vector<Rational>> stack(m + 1);
    stack[0] = u0;
    std::vector<std::size_t> lag(m, 0);
    std::size_t depth = 0;
    while (true) {
        if (depth == m) {
            std::size_t idx = 0;
            for (std::size_t i = 0; i < m; ++i) idx = idx * n + lag[i];
            Rational s = 0;
            for (const auto& q : stack[m]) s += q;
            out[idx] = s;
            while (depth > 0 && lag[depth - 1] + 1 == n) lag[--depth] = 0;
            if (depth == 0) break;
            ++lag[depth - 1];
            stack[depth] = detail::propagate(g, stack[depth - 1], powers[lag[depth - 1]], f);
            continue;
        }
        stack[depth + 1] = detail::propagate(g, stack[depth], powers[lag[depth]], f);
        ++depth;
    }
    return out;
}

/**
 * The scenery (canonical shift) whose spatial multispectrum is A. Candidates
 * are the shift-orbit representatives with A(0) ones; a candidate must have
 * a positive entry at the tuple visiting all its ones and agree with A on
 * A's support, and A's total mass must be s^n.
 */
inline Scenery recover_scenery(const SpatialMultispectrum& a) {
    const auto& g = a.group;
    detail::require_multispectrum_order(g);
    const std::size_t n = static_cast<std::size_t>(g.order()), m = n - 1;
    if (a.arity != m) throw DomainError("multispectrum arity must be |H| - 1");
    const std::int64_t s = a.at(std::vector<Rank>(m, 0));
    if (s < 0 || s > static_cast<std::int64_t>(n)) throw DomainError("invalid multispectrum: bad ones-count");
    std::int64_t mass = 0, expected = 1;
    for (const auto& [k, v] : a.entries) {
        if (v < 0 || v > s) throw DomainError("invalid multispectrum: entry out of range");
        mass += v;
    }
    for (std::size_t i = 0; i < n; ++i) expected *= s;
    if (mass != expected) throw DomainError("invalid multispectrum: total mass is not (ones-count)^n");
    std::optional<Scenery> found;
    for (const auto& cand : orbit_representatives(g, static_cast<std::size_t>(s))) {
        const auto visit = detail::visiting_tuple(g, cand.ones_positions(), m);
        if (s > 0 && a.at(visit) <= 0) continue;
        bool match = true;
        for (const auto& [k, v] : a.entries)
            if (spatial_multispectrum_entry(cand, unpack_tuple(k, m)) != v) {
                match = false;
                break;
            }
        if (!match) continue;
        if (found) throw InconsistencyError("two non-shift-equivalent sceneries share a multispectrum");
        found = cand;
    }
    if (!found) throw DomainError("no scenery has this multispectrum");
    return *found;
}

namespace detail {

/// Applies the square matrix M along one axis of a dense n^m tensor (odometer order, axis 0 most significant).
inline std::vector<Rational> apply_along_axis(const Matrix<Rational>& mat, const std::vector<Rational>& t, std::size_t n,
                                              std::size_t m, std::size_t axis) {
    std::size_t stride = 1;
    for (std::size_t i = axis + 1; i < m; ++i) stride *= n;
    std::vector<Rational> out(t.size(), Rational(0));
    for (std::size_t base = 0; base < t.size(); ++base) {
        if ((base / stride) % n != 0) continue;
        for (std::size_t r = 0; r < n; ++r) {
            Rational s = 0;
            for (std::size_t c = 0; c < n; ++c)
                if (sgn(mat[r][c]) != 0 && sgn(t[base + c * stride]) != 0) s += mat[r][c] * t[base + c * stride];
            out[base + r * stride] = s;
        }
    }
    return out;
}

} // namespace detail

/// A = n (G^{-1})^{(x) m} B, applied one axis at a time.
inline std::vector<Rational> invert_temporal_grid(const StepDistribution& gamma, const std::vector<Rational>& b) {
    const std::size_t n = static_cast<std::size_t>(gamma.group().order()), m = n - 1;
    const auto powers = convolution_powers(gamma, n - 1);
    const Matrix<Rational> gm(powers.begin(), powers.end());
    const Matrix<Rational> ginv = invert(gm, Rational(0), Rational(1));
    std::vector<Rational> t = b;
    for (std::size_t axis = 0; axis < m; ++axis) t = detail::apply_along_axis(ginv, t, n, m, axis);
    for (auto& q : t) q *= Rational(static_cast<long>(n));
    return t;
}

struct PipelineResult {
    Scenery recovered;
    std::optional<Rank> shift;  ///< s with hidden = shift(recovered, s), when a hidden scenery was given
};

/**
 * Exact statistics -> scenery. Computes B_f on {0..n-1}^m from (gamma, f),
 * inverts the tensor system axis by axis to get A_f, then recovers f up to shift.
 */
inline PipelineResult full_pipeline(const StepDistribution& gamma, const Scenery& hidden) {
    const auto& g = hidden.group();
    if (!(gamma.group() == g)) throw StructuralError("walk and scenery live on different groups");
    if (!gamma.is_exact()) throw DomainError("full_pipeline needs an exact walk");
    detail::require_distinct(gamma);
    if (g.order() > kDenseTensorMaxOrder)
        throw CapacityError("full_pipeline needs |H| <= " + std::to_string(kDenseTensorMaxOrder));
    const std::size_t n = hidden.size(), m = n - 1;
    const auto b = temporal_multispectrum_grid(gamma, hidden);
    const auto a_dense = detail::to_nonnegative_integers(invert_temporal_grid(gamma, b), "recovered multispectrum");
    SpatialMultispectrum a{g, m, {}};
    for (std::size_t idx = 0; idx < a_dense.size(); ++idx) {
        if (a_dense[idx] == 0) continue;
        std::vector<Rank> t(m);
        std::size_t r = idx;
        for (std::size_t i = m; i-- > 0;) {
            t[i] = r % n;
            r /= n;
        }
        a.entries[pack_tuple(t)] = a_dense[idx];
    }
    Scenery rec = recover_scenery(a);
    return {rec, is_shift_of(hidden, rec)};
}

} // namespace scenerylab
