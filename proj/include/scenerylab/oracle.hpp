#pragma once

/**
 * @file oracle.hpp
 * @brief Exact decision of whether two labeled walks produce identically
 * distributed observation sequences, and brute-force equivalence classes.
 *
 * A labeled walk is a hidden Markov model with states H, uniform initial law
 * pi, transition T[i][j] = gamma(j - i) and deterministic emission f. Since pi
 * is stationary, P(o_1..o_t) = pi (T D_{o_1}) ... (T D_{o_t}) 1 with D_o the
 * diagonal mask {f = o}. Two models agree on every word iff the functional
 * [1; -1] vanishes on the span of the forward vectors of the direct sum; that
 * span is closed under u -> u T D_o and has dimension <= |H_1| + |H_2|.
 */

#include "scenerylab/errors.hpp"
#include "scenerylab/group.hpp"
#include "scenerylab/linalg.hpp"
#include "scenerylab/number.hpp"
#include "scenerylab/scenery.hpp"
#include "scenerylab/spectral.hpp"
#include "scenerylab/walk.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace scenerylab {

inline constexpr std::uint64_t kClassEnumerationMaxOrder = 12;

struct ObservationProcess {
    StepDistribution walk;
    Scenery scenery;

    ObservationProcess(StepDistribution w, Scenery f) : walk(std::move(w)), scenery(std::move(f)) {
        if (!(walk.group() == scenery.group())) throw StructuralError("walk and scenery live on different groups");
    }
    const GroupSpec& group() const { return scenery.group(); }
};

enum class Equivalence { equivalent, not_equivalent, unknown };

inline const char* to_string(Equivalence e) {
    switch (e) {
    case Equivalence::equivalent: return "equivalent";
    case Equivalence::not_equivalent: return "not_equivalent";
    case Equivalence::unknown: return "unknown";
    }
    return "?";
}

struct EquivalenceResult {
    Equivalence status = Equivalence::unknown;
    bool heuristic = false;              ///< float mode: "equivalent" means no distinction found at tolerance
    std::optional<std::string> certificate;  ///< observation word with different probabilities
    std::size_t basis_dim = 0;

    bool equivalent() const noexcept { return status == Equivalence::equivalent; }
};

namespace detail {

/// Step laws as (offset, probability) pairs over the support.
template <class T>
struct SparseStep {
    std::vector<Rank> offsets;
    std::vector<T> probs;
};

inline SparseStep<Rational> exact_step(const StepDistribution& gamma) {
    SparseStep<Rational> s;
    for (Rank r : gamma.support()) {
        s.offsets.push_back(r);
        s.probs.push_back(gamma.prob(r));
    }
    return s;
}

inline SparseStep<Real> real_step(const StepDistribution& gamma) {
    SparseStep<Real> s;
    for (Rank r = 0; r < gamma.group().order(); ++r) {
        const Real p = gamma.prob_real(r);
        if (p != 0) {
            s.offsets.push_back(r);
            s.probs.push_back(p);
        }
    }
    return s;
}

/// out[block + j] = f(j) == o ? sum_k u[block + j - k] gamma(k) : 0
template <class T>
void step_block(const GroupSpec& g, const SparseStep<T>& step, const Scenery& f, int o, const std::vector<T>& u,
                std::size_t base, std::vector<T>& out) {
    const auto n = static_cast<std::size_t>(g.order());
    for (std::size_t j = 0; j < n; ++j) out[base + j] = T(0);
    for (std::size_t i = 0; i < n; ++i) {
        if (u[base + i] == 0) continue;
        for (std::size_t s = 0; s < step.offsets.size(); ++s) {
            const auto j = static_cast<std::size_t>(g.add_ranks(static_cast<Rank>(i), step.offsets[s]));
            if (f(static_cast<Rank>(j)) == o) out[base + j] += u[base + i] * step.probs[s];
        }
    }
}

inline std::string word_string(const std::vector<int>& w) {
    std::string s;
    for (int o : w) s += static_cast<char>('0' + o);
    return s;
}

} // namespace detail

/// P(first |word| observations = word), by the forward algorithm, exactly.
inline Rational word_probability(const ObservationProcess& p, const std::string& word) {
    const auto& g = p.group();
    const auto n = static_cast<std::size_t>(g.order());
    const auto step = detail::exact_step(p.walk);
    std::vector<Rational> alpha(n, Rational(0));
    for (std::size_t k = 0; k < n; ++k) alpha[k] = Rational(1, static_cast<unsigned long>(n));
    std::vector<Rational> next(n);
    for (std::size_t t = 0; t < word.size(); ++t) {
        const int o = word[t] - '0';
        if (t == 0) {
            for (std::size_t k = 0; k < n; ++k)
                if (p.scenery(static_cast<Rank>(k)) != o) alpha[k] = 0;
            continue;
        }
        detail::step_block(g, step, p.scenery, o, alpha, 0, next);
        std::swap(alpha, next);
    }
    Rational s = 0;
    for (const auto& a : alpha) s += a;
    return s;
}

/// Compares every word of length <= horizon; returns the first differing word.
inline std::optional<std::string> bounded_horizon_difference(const ObservationProcess& a, const ObservationProcess& b,
                                                             std::size_t horizon) {
    for (std::size_t len = 1; len <= horizon; ++len)
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << len); ++mask) {
            std::string w;
            for (std::size_t i = 0; i < len; ++i) w += static_cast<char>('0' + ((mask >> (len - 1 - i)) & 1U));
            if (word_probability(a, w) != word_probability(b, w)) return w;
        }
    return std::nullopt;
}

namespace detail {

inline EquivalenceResult equivalent_exact(const ObservationProcess& a, const ObservationProcess& b) {
    const auto& g1 = a.group();
    const auto& g2 = b.group();
    const auto n1 = static_cast<std::size_t>(g1.order()), n2 = static_cast<std::size_t>(g2.order());
    const std::size_t dim = n1 + n2;
    const auto s1 = exact_step(a.walk), s2 = exact_step(b.walk);
    IncrementalBasis<Rational> basis(dim);
    std::deque<std::pair<std::vector<Rational>, std::vector<int>>> queue;
    std::vector<Rational> start(dim);
    for (std::size_t i = 0; i < n1; ++i) start[i] = Rational(1, static_cast<unsigned long>(n1));
    for (std::size_t i = 0; i < n2; ++i) start[n1 + i] = Rational(1, static_cast<unsigned long>(n2));
    basis.insert(start);
    queue.emplace_back(std::move(start), std::vector<int>{});
    EquivalenceResult out;
    std::vector<Rational> v(dim);
    while (!queue.empty()) {
        auto [u, word] = std::move(queue.front());
        queue.pop_front();
        for (int o = 0; o < 2; ++o) {
            step_block(g1, s1, a.scenery, o, u, 0, v);
            std::vector<Rational> u2(u.begin() + static_cast<std::ptrdiff_t>(n1), u.end()), v2(n2);
            step_block(g2, s2, b.scenery, o, u2, 0, v2);
            std::copy(v2.begin(), v2.end(), v.begin() + static_cast<std::ptrdiff_t>(n1));
            if (!basis.insert(v)) continue;
            auto w = word;
            w.push_back(o);
            Rational diff = 0;
            for (std::size_t i = 0; i < n1; ++i) diff += v[i];
            for (std::size_t i = 0; i < n2; ++i) diff -= v[n1 + i];
            if (sgn(diff) != 0) {
                out.status = Equivalence::not_equivalent;
                out.certificate = word_string(w);
                out.basis_dim = basis.size();
                return out;
            }
            queue.emplace_back(v, std::move(w));
        }
    }
    out.status = Equivalence::equivalent;
    out.basis_dim = basis.size();
    return out;
}

/**
 * Float version: modified Gram-Schmidt with a relative tolerance. Never
 * returns a hard "equivalent"; the result is flagged heuristic.
 */
inline EquivalenceResult equivalent_float(const ObservationProcess& a, const ObservationProcess& b, unsigned bits,
                                          const Real& tol) {
    ScopedPrecision guard(bits);
    const auto& g1 = a.group();
    const auto& g2 = b.group();
    const auto n1 = static_cast<std::size_t>(g1.order()), n2 = static_cast<std::size_t>(g2.order());
    const std::size_t dim = n1 + n2;
    const auto s1 = real_step(a.walk), s2 = real_step(b.walk);
    std::vector<std::vector<Real>> ortho;
    auto norm = [](const std::vector<Real>& x) -> Real {
        Real s = 0;
        for (const auto& c : x) s += c * c;
        return boost::multiprecision::sqrt(s);
    };
    auto try_insert = [&](std::vector<Real> x) {
        const Real n0 = norm(x);
        if (n0 == 0) return false;
        for (const auto& q : ortho) {
            Real d = 0;
            for (std::size_t i = 0; i < dim; ++i) d += q[i] * x[i];
            for (std::size_t i = 0; i < dim; ++i) x[i] -= d * q[i];
        }
        const Real r = norm(x);
        if (r <= tol * n0) return false;
        for (auto& c : x) c /= r;
        ortho.push_back(std::move(x));
        return true;
    };
    std::deque<std::pair<std::vector<Real>, std::vector<int>>> queue;
    std::vector<Real> start(dim);
    for (std::size_t i = 0; i < n1; ++i) start[i] = Real(1) / Real(static_cast<long>(n1));
    for (std::size_t i = 0; i < n2; ++i) start[n1 + i] = Real(1) / Real(static_cast<long>(n2));
    try_insert(start);
    queue.emplace_back(std::move(start), std::vector<int>{});
    EquivalenceResult out;
    out.heuristic = true;
    bool near_tie = false;
    while (!queue.empty()) {
        auto [u, word] = std::move(queue.front());
        queue.pop_front();
        for (int o = 0; o < 2; ++o) {
            std::vector<Real> u1(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(n1)), v1(n1);
            std::vector<Real> u2(u.begin() + static_cast<std::ptrdiff_t>(n1), u.end()), v2(n2);
            step_block(g1, s1, a.scenery, o, u1, 0, v1);
            step_block(g2, s2, b.scenery, o, u2, 0, v2);
            std::vector<Real> v(v1);
            v.insert(v.end(), v2.begin(), v2.end());
            Real diff = 0, mass = 0;
            for (std::size_t i = 0; i < n1; ++i) diff += v[i];
            for (std::size_t i = 0; i < n2; ++i) diff -= v[n1 + i];
            for (const auto& c : v) mass += boost::multiprecision::abs(c);
            if (!try_insert(v)) continue;
            auto w = word;
            w.push_back(o);
            const Real ad = boost::multiprecision::abs(diff);
            if (ad >= 10 * tol * mass) {
                out.status = Equivalence::not_equivalent;
                out.certificate = word_string(w);
                out.basis_dim = ortho.size();
                return out;
            }
            if (ad >= tol * mass) near_tie = true;
            queue.emplace_back(std::move(v), std::move(w));
            if (ortho.size() > dim) throw InconsistencyError("basis dimension exceeded |H1| + |H2|");
        }
    }
    out.status = near_tie ? Equivalence::unknown : Equivalence::equivalent;
    out.basis_dim = ortho.size();
    return out;
}

} // namespace detail

/// Exact when both walks are exact; otherwise the heuristic float procedure.
inline EquivalenceResult processes_equivalent(const ObservationProcess& a, const ObservationProcess& b,
                                              unsigned bits = kDefaultPrecisionBits) {
    if (a.walk.is_exact() && b.walk.is_exact()) return detail::equivalent_exact(a, b);
    const Real& tol = !a.walk.is_exact() ? a.walk.tolerance() : b.walk.tolerance();
    return detail::equivalent_float(a, b, bits, tol);
}

inline EquivalenceResult sceneries_equivalent(const StepDistribution& gamma, const Scenery& f1, const Scenery& f2) {
    return processes_equivalent(ObservationProcess(gamma, f1), ObservationProcess(gamma, f2));
}

// ---------------------------------------------------------------------------
// Class enumeration
// ---------------------------------------------------------------------------

struct EquivalenceClassReport {
    GroupSpec group;
    std::vector<std::vector<Scenery>> classes;  ///< canonical shift representatives
    bool minimal = true;
    bool heuristic = false;
    std::size_t unknown_pairs = 0;
    std::size_t tests_run = 0;
};

namespace detail {

/// Cheap necessary invariant: ones-count plus b_f(1..3) for exact walks.
inline std::vector<Rational> class_key(const StepDistribution& gamma, const Scenery& f) {
    if (!gamma.is_exact()) return {Rational(static_cast<long>(f.ones_count()))};
    return temporal_autocorrelation_exact(gamma, f, 3);
}

} // namespace detail

/**
 * Partitions shift-orbit representatives by processes_equivalent. Within a
 * bucket of equal invariants each scenery is compared with class leaders
 * only. Buckets are independent and spread over `threads` workers when the
 * walk is exact (float mode uses a process-wide precision and stays serial).
 */
inline EquivalenceClassReport enumerate_classes(const StepDistribution& gamma, unsigned threads = 1,
                                                std::uint64_t max_order = kClassEnumerationMaxOrder) {
    const auto& g = gamma.group();
    if (g.order() > max_order)
        throw CapacityError("class enumeration needs |H| <= " + std::to_string(max_order) + ", got " +
                            std::to_string(g.order()));
    const auto reps = orbit_representatives(g, std::nullopt, max_order);
    std::map<std::vector<Rational>, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < reps.size(); ++i) buckets[detail::class_key(gamma, reps[i])].push_back(i);
    std::vector<const std::vector<std::size_t>*> work;
    for (const auto& [k, v] : buckets) work.push_back(&v);

    struct BucketResult {
        std::vector<std::vector<std::size_t>> classes;
        std::size_t unknown = 0, tests = 0;
    };
    std::vector<BucketResult> results(work.size());
    auto run_bucket = [&](std::size_t b) {
        auto& r = results[b];
        for (std::size_t idx : *work[b]) {
            bool placed = false;
            for (auto& cls : r.classes) {
                ++r.tests;
                const auto e = sceneries_equivalent(gamma, reps[cls.front()], reps[idx]);
                if (e.status == Equivalence::unknown) ++r.unknown;
                if (e.equivalent()) {
                    cls.push_back(idx);
                    placed = true;
                    break;
                }
            }
            if (!placed) r.classes.push_back({idx});
        }
    };
    const unsigned workers = gamma.is_exact() ? std::max(1u, threads) : 1u;
    if (workers == 1) {
        for (std::size_t b = 0; b < work.size(); ++b) run_bucket(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (std::size_t b = next++; b < work.size(); b = next++) run_bucket(b);
            });
        for (auto& t : pool) t.join();
    }

    EquivalenceClassReport out{g, {}, true, !gamma.is_exact(), 0, 0};
    std::vector<std::vector<std::size_t>> all;
    for (auto& r : results) {
        out.unknown_pairs += r.unknown;
        out.tests_run += r.tests;
        for (auto& c : r.classes) all.push_back(std::move(c));
    }
    for (auto& c : all) std::sort(c.begin(), c.end());
    std::sort(all.begin(), all.end());
    for (const auto& c : all) {
        std::vector<Scenery> cls;
        for (auto i : c) cls.push_back(reps[i]);
        if (cls.size() > 1) out.minimal = false;
        out.classes.push_back(std::move(cls));
    }
    return out;
}

struct VerifyReport {
    Verdict verdict;
    bool oracle_minimal = false;
    bool heuristic = false;
    std::string resolution;
};

/// Cross-checks an analyze() verdict against class enumeration; a contradiction throws.
inline VerifyReport verify_verdict(const AnalysisVerdict& verdict, const StepDistribution& gamma, unsigned threads = 1) {
    const auto report = enumerate_classes(gamma, threads);
    VerifyReport out{verdict.verdict, report.minimal, report.heuristic, ""};
    const std::string oracle = report.minimal ? "classes are shift orbits" : "a class contains non-shift-equivalent sceneries";
    switch (verdict.verdict) {
    case Verdict::reconstructive:
        if (!report.minimal) throw InconsistencyError("verdict Reconstructive but the oracle found " + oracle);
        out.resolution = "confirmed: " + oracle;
        break;
    case Verdict::not_reconstructive:
        if (report.minimal) throw InconsistencyError("verdict NotReconstructive but the oracle found " + oracle);
        out.resolution = "confirmed: " + oracle;
        break;
    case Verdict::unknown:
        out.resolution = std::string(report.minimal ? "oracle resolves to Reconstructive: " : "oracle resolves to NotReconstructive: ") +
                         oracle + (report.heuristic ? " (heuristic, float mode)" : "");
        break;
    }
    return out;
}

} // namespace scenerylab
