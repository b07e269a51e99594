#pragma once

/**
 * @file sim.hpp
 * @brief Seeded simulation of labeled walks, the two couplings, and empirical
 * temporal autocorrelation.
 *
 * Randomness: one std::mt19937_64 per stream, seeded from SplitMix64 applied
 * to the user seed. Only raw 64-bit outputs are consumed (no std
 * distributions), so traces are bit-identical across platforms.
 */

#include "scenerylab/errors.hpp"
#include "scenerylab/group.hpp"
#include "scenerylab/number.hpp"
#include "scenerylab/scenery.hpp"
#include "scenerylab/walk.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace scenerylab {

/// SplitMix64 step; used only to derive stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Independent generator for stream `id` of `seed`.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t id) {
    std::uint64_t s = seed;
    std::uint64_t out = 0;
    for (std::uint64_t i = 0; i <= id; ++i) out = splitmix64(s);
    return std::mt19937_64(out);
}

/// Uniform integer in [0, n) by multiply-shift.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Walker/Vose alias table over arbitrary labels.
class AliasTable {
public:
    AliasTable() = default;

    AliasTable(std::vector<Rank> labels, const std::vector<double>& weights) : labels_(std::move(labels)) {
        const std::size_t n = labels_.size();
        if (n == 0 || weights.size() != n) throw DomainError("alias table needs matching non-empty labels and weights");
        double total = 0;
        for (double w : weights) {
            if (w < 0) throw DomainError("alias table: negative weight");
            total += w;
        }
        if (!(total > 0)) throw DomainError("alias table: zero total weight");
        prob_.assign(n, 1.0);
        alias_.resize(n);
        std::vector<double> scaled(n);
        std::vector<std::size_t> small, large;
        for (std::size_t i = 0; i < n; ++i) {
            scaled[i] = weights[i] * static_cast<double>(n) / total;
            alias_[i] = i;
            (scaled[i] < 1.0 ? small : large).push_back(i);
        }
        while (!small.empty() && !large.empty()) {
            const auto s = small.back();
            small.pop_back();
            const auto l = large.back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
    }

    Rank draw(std::mt19937_64& rng) const {
        const auto col = static_cast<std::size_t>(uniform_below(rng, prob_.size()));
        return uniform_unit(rng) < prob_[col] ? labels_[col] : labels_[alias_[col]];
    }

    std::size_t size() const noexcept { return labels_.size(); }

private:
    std::vector<Rank> labels_;
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

inline AliasTable step_alias(const StepDistribution& gamma) {
    std::vector<Rank> labels;
    std::vector<double> w;
    for (Rank r = 0; r < gamma.group().order(); ++r) {
        const double p = gamma.prob_double(r);
        if (p > 0) {
            labels.push_back(r);
            w.push_back(p);
        }
    }
    return AliasTable(std::move(labels), w);
}

struct WalkTrace {
    std::uint64_t seed = 0;
    GroupSpec group;
    std::vector<Rank> positions;
    std::vector<std::uint8_t> observations;

    std::size_t size() const noexcept { return positions.size(); }
    GroupElement position(std::size_t t) const { return GroupElement::from_rank(group, positions.at(t)); }
};

struct CoupledTraces {
    WalkTrace trace1, trace2;
    std::string transform;
};

/// Stream ids: 0 start and increments of walk 1, 1 walk 2 conditional draws, 2 walk 2 free start coordinates.
inline WalkTrace simulate(const StepDistribution& gamma, const Scenery& f, std::size_t steps, std::uint64_t seed) {
    const auto& g = gamma.group();
    if (!(g == f.group())) throw StructuralError("walk and scenery live on different groups");
    if (steps < 1) throw DomainError("steps must be >= 1");
    auto rng = make_stream(seed, 0);
    const auto table = step_alias(gamma);
    WalkTrace t{seed, g, {}, {}};
    t.positions.reserve(steps);
    t.observations.reserve(steps);
    Rank v = uniform_below(rng, g.order());
    for (std::size_t i = 0; i < steps; ++i) {
        if (i) v = g.add_ranks(v, table.draw(rng));
        t.positions.push_back(v);
        t.observations.push_back(f(v));
    }
    return t;
}

/// Runs one trace per seed, spread over `threads` workers; output order follows `seeds`.
inline std::vector<WalkTrace> simulate_many(const StepDistribution& gamma, const Scenery& f, std::size_t steps,
                                            const std::vector<std::uint64_t>& seeds, unsigned threads = 1) {
    std::vector<std::optional<WalkTrace>> slots(seeds.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(seeds.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < seeds.size(); i += workers) slots[i] = simulate(gamma, f, steps, seeds[i]);
        });
    for (auto& t : pool) t.join();
    std::vector<WalkTrace> out;
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

/**
 * Multiplier coupling on a cycle: walk 2 is v times walk 1. Requires
 * f1(k) = f2(vk) and gamma(vk) = gamma(k) for every k.
 */
inline CoupledTraces simulate_coupled_cycle(const StepDistribution& gamma, const Scenery& f1, const Scenery& f2,
                                            std::int64_t v, std::size_t steps, std::uint64_t seed) {
    const auto& g = gamma.group();
    if (!g.is_cycle()) throw DomainError("cycle coupling needs a cyclic group, got " + g.to_string());
    if (!(f1.group() == g) || !(f2.group() == g)) throw StructuralError("sceneries must live on the walk's group");
    const auto n = static_cast<std::int64_t>(g.order());
    if (std::gcd(mod_floor(v, n), n) != 1) throw DomainError("multiplier " + std::to_string(v) + " is not a unit mod " + std::to_string(n));
    for (Rank k = 0; k < g.order(); ++k) {
        const Rank vk = g.scale_rank(v, k);
        if (f1(k) != f2(vk))
            throw DomainError("coupling precondition fails at k = " + std::to_string(k) + ": f1(k) != f2(v k)");
        const bool same = gamma.is_exact() ? gamma.prob(k) == gamma.prob(vk)
                                           : boost::multiprecision::abs(gamma.prob_real(k) - gamma.prob_real(vk)) <
                                                 gamma.tolerance();
        if (!same) throw DomainError("coupling precondition fails at k = " + std::to_string(k) + ": gamma(v k) != gamma(k)");
    }
    CoupledTraces out{simulate(gamma, f1, steps, seed), WalkTrace{seed, g, {}, {}}, ""};
    out.transform = "v2(t) = " + std::to_string(v) + " * v1(t)";
    for (std::size_t t = 0; t < steps; ++t) {
        const Rank p2 = g.scale_rank(v, out.trace1.positions[t]);
        out.trace2.positions.push_back(p2);
        out.trace2.observations.push_back(f2(p2));
        if (out.trace2.observations[t] != out.trace1.observations[t])
            throw InconsistencyError("coupled observations differ at t = " + std::to_string(t));
    }
    return out;
}

namespace detail {

/// Mixed-radix code of (k . z restricted to factor i)_i.
inline std::uint64_t fiber_code(const GroupSpec& g, Rank k, Rank z) {
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < g.num_factors(); ++i)
        code = code * static_cast<std::uint64_t>(g.factors()[i].modulus) + static_cast<std::uint64_t>(g.dot_ranks(k, z, i));
    return code;
}

} // namespace detail

/**
 * Dot-product coupling on a product of cycles: v2(t) . y = v1(t) . x on every
 * factor. Walk 2's increment is drawn from gamma conditioned on the fiber of
 * walk 1's increment, so its marginal is gamma whenever the fiber masses of x
 * and y agree (checked exactly for rational walks).
 */
inline CoupledTraces simulate_coupled_product(const StepDistribution& gamma, const Scenery& f1, const Scenery& f2,
                                              const GroupElement& x, const GroupElement& y, std::size_t steps,
                                              std::uint64_t seed) {
    const auto& g = gamma.group();
    if (!(x.group() == g) || !(y.group() == g)) throw StructuralError("x and y must be elements of the walk's group");
    if (!(f1.group() == g) || !(f2.group() == g)) throw StructuralError("sceneries must live on the walk's group");
    if (steps < 1) throw DomainError("steps must be >= 1");
    const Rank xr = x.rank(), yr = y.rank();
    for (std::size_t i = 0; i < g.num_factors(); ++i) {
        auto zero = [&](const GroupElement& e) {
            for (auto c : e.factor_coords(i))
                if (c != 0) return false;
            return true;
        };
        if (zero(x) != zero(y))
            throw DomainError("product coupling needs x_i = 0 <=> y_i = 0 on every factor; factor " + std::to_string(i) +
                              " violates it");
    }

    // Fiber masses of gamma and fiber sizes of the position space.
    std::map<std::uint64_t, Rational> mass_x, mass_y;
    std::map<std::uint64_t, Real> rmass_x, rmass_y;
    std::map<std::uint64_t, std::size_t> size_x, size_y;
    std::map<std::uint64_t, std::vector<Rank>> pos_fiber_y, step_fiber_y;
    std::map<std::uint64_t, std::vector<double>> step_weight_y;
    std::map<std::uint64_t, int> value_x, value_y;
    for (Rank k = 0; k < g.order(); ++k) {
        const auto cx = detail::fiber_code(g, k, xr), cy = detail::fiber_code(g, k, yr);
        ++size_x[cx];
        ++size_y[cy];
        pos_fiber_y[cy].push_back(k);
        auto check_const = [&](std::map<std::uint64_t, int>& m, std::uint64_t c, int val, const char* which) {
            auto [it, fresh] = m.emplace(c, val);
            if (!fresh && it->second != val)
                throw DomainError(std::string(which) + " is not constant on dot-product fibers (k = " + std::to_string(k) + ")");
        };
        check_const(value_x, cx, f1(k), "f1");
        check_const(value_y, cy, f2(k), "f2");
        if (gamma.is_exact()) {
            mass_x[cx] += gamma.prob(k);
            mass_y[cy] += gamma.prob(k);
        } else {
            rmass_x[cx] += gamma.prob_real(k);
            rmass_y[cy] += gamma.prob_real(k);
        }
        const double p = gamma.prob_double(k);
        if (p > 0) {
            step_fiber_y[cy].push_back(k);
            step_weight_y[cy].push_back(p);
        }
    }
    if (size_x != size_y) throw DomainError("fiber sizes of x and y differ");
    if (value_x != value_y) throw DomainError("f1 and f2 disagree on matching fibers");
    if (gamma.is_exact()) {
        for (const auto& [c, m] : mass_x) {
            const auto it = mass_y.find(c);
            const Rational my = it == mass_y.end() ? Rational(0) : it->second;
            if (m != my)
                throw DomainError("fiber mass mismatch at fiber " + std::to_string(c) + ": " + m.get_str() + " vs " + my.get_str() +
                                  " (gamma lacks the collision)");
        }
    } else {
        for (const auto& [c, m] : rmass_x)
            if (boost::multiprecision::abs(m - rmass_y[c]) >= gamma.tolerance())
                throw DomainError("fiber mass mismatch at fiber " + std::to_string(c) + " (gamma lacks the collision)");
    }
    std::map<std::uint64_t, AliasTable> tables;
    for (auto& [c, labels] : step_fiber_y) tables.emplace(c, AliasTable(labels, step_weight_y[c]));

    CoupledTraces out{simulate(gamma, f1, steps, seed), WalkTrace{seed, g, {}, {}}, ""};
    out.transform = "v2(t) . y = v1(t) . x per factor, x = " + x.to_string() + ", y = " + y.to_string();
    auto draw_rng = make_stream(seed, 1);
    auto start_rng = make_stream(seed, 2);
    const auto& start_fiber = pos_fiber_y.at(detail::fiber_code(g, out.trace1.positions[0], xr));
    Rank v2 = start_fiber[uniform_below(start_rng, start_fiber.size())];
    for (std::size_t t = 0; t < steps; ++t) {
        if (t) {
            const Rank inc1 = g.sub_ranks(out.trace1.positions[t], out.trace1.positions[t - 1]);
            v2 = g.add_ranks(v2, tables.at(detail::fiber_code(g, inc1, xr)).draw(draw_rng));
        }
        out.trace2.positions.push_back(v2);
        out.trace2.observations.push_back(f2(v2));
        if (detail::fiber_code(g, v2, yr) != detail::fiber_code(g, out.trace1.positions[t], xr))
            throw InconsistencyError("coupled positions leave the fiber at t = " + std::to_string(t));
        if (out.trace2.observations[t] != out.trace1.observations[t])
            throw InconsistencyError("coupled observations differ at t = " + std::to_string(t));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

struct EmpiricalB {
    std::vector<double> value;
    std::vector<double> stderr_;
};

inline constexpr std::size_t kMinTraceSurplus = 1000;
inline constexpr std::size_t kBatchCount = 50;

/// b_hat(l) = mean_t f(v(t)) f(v(t+l)); standard errors by batch means.
inline EmpiricalB estimate_b(const WalkTrace& trace, std::size_t L) {
    const auto& o = trace.observations;
    if (o.size() < L + kMinTraceSurplus)
        throw DomainError("trace too short: need at least " + std::to_string(L + kMinTraceSurplus) + " steps, have " +
                          std::to_string(o.size()));
    const std::size_t T = o.size() - L;
    const std::size_t batch = T / kBatchCount;
    EmpiricalB out;
    for (std::size_t l = 0; l <= L; ++l) {
        std::vector<double> means(kBatchCount, 0.0);
        std::uint64_t total = 0;
        for (std::size_t t = 0; t < T; ++t) {
            const unsigned prod = o[t] & o[t + l];
            total += prod;
            const std::size_t b = t / batch;
            if (b < kBatchCount) means[b] += prod;
        }
        double mu = 0;
        for (auto& m : means) {
            m /= static_cast<double>(batch);
            mu += m;
        }
        mu /= kBatchCount;
        double var = 0;
        for (double m : means) var += (m - mu) * (m - mu);
        var /= kBatchCount - 1;
        out.value.push_back(static_cast<double>(total) / static_cast<double>(T));
        out.stderr_.push_back(std::sqrt(var / kBatchCount));
    }
    return out;
}

/// Counts of each increment v(t+1) - v(t), indexed by rank.
inline std::vector<std::uint64_t> increment_counts(const WalkTrace& trace) {
    std::vector<std::uint64_t> c(static_cast<std::size_t>(trace.group.order()), 0);
    for (std::size_t t = 1; t < trace.positions.size(); ++t)
        ++c[static_cast<std::size_t>(trace.group.sub_ranks(trace.positions[t], trace.positions[t - 1]))];
    return c;
}

struct ChiSquare {
    double statistic = 0;
    double dof = 0;
    double p_value = 1;
};

/// Pearson goodness of fit; cells with zero expected mass must be empty.
inline ChiSquare chi_square(const std::vector<std::uint64_t>& counts, const std::vector<double>& probs) {
    if (counts.size() != probs.size()) throw StructuralError("chi-square: size mismatch");
    double n = 0;
    for (auto c : counts) n += static_cast<double>(c);
    ChiSquare out;
    int cells = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (probs[i] <= 0) {
            if (counts[i]) {
                out.statistic = std::numeric_limits<double>::infinity();
                out.p_value = 0;
                return out;
            }
            continue;
        }
        const double e = n * probs[i];
        out.statistic += (static_cast<double>(counts[i]) - e) * (static_cast<double>(counts[i]) - e) / e;
        ++cells;
    }
    out.dof = cells - 1;
    if (out.dof < 1) return out;
    out.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(out.dof), out.statistic));
    return out;
}

inline double total_variation(const std::vector<std::uint64_t>& counts, const std::vector<double>& probs) {
    double n = 0;
    for (auto c : counts) n += static_cast<double>(c);
    double tv = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) tv += std::abs(static_cast<double>(counts[i]) / n - probs[i]);
    return tv / 2;
}

inline std::vector<double> step_probs_double(const StepDistribution& gamma) {
    std::vector<double> p;
    for (Rank r = 0; r < gamma.group().order(); ++r) p.push_back(gamma.prob_double(r));
    return p;
}

} // namespace scenerylab
