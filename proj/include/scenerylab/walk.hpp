#pragma once

/**
 * @file walk.hpp
 * @brief Step distributions, their Fourier transforms, and reconstructibility verdicts.
 *
 * The Fourier transform of a step distribution gamma on
 * H = Z_{n_1}^{d_1} x ... x Z_{n_m}^{d_m} is
 *
 *     gamma_hat(x) = sum_k prod_i w_{n_i}^{k_i . x_i} gamma(k),   w_n = exp(-2 pi i / n).
 *
 * Distinct coefficients imply the walk is reconstructive on any finite abelian
 * group. When every n_i is a prime larger than 5 and gamma is rational, a
 * repeated coefficient implies the walk is not reconstructive. Exact
 * (cyclotomic) arithmetic is used whenever the moduli are prime; everything
 * else goes through MPFR with an explicit tolerance and decision margin.
 */

#include "scenerylab/cyclotomic.hpp"
#include "scenerylab/errors.hpp"
#include "scenerylab/group.hpp"
#include "scenerylab/number.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

namespace scenerylab {

enum class WalkMode { exact, floating };

inline const Real& default_tolerance() {
    static const Real tol = [] {
        ScopedPrecision guard(kDefaultPrecisionBits);
        return Real("1e-30");
    }();
    return tol;
}

/**
 * Law of the increments v(t+1) - v(t).
 *
 * Probabilities are stored densely by element rank. Exact distributions hold
 * Rationals that sum to exactly 1. Floating distributions hold MPFR values at
 * a fixed working precision together with the tolerance used for every
 * equality decision made about them.
 */
class StepDistribution {
public:
    static StepDistribution exact(GroupSpec g, const std::map<Rank, Rational>& probs) {
        g.require_enumerable();
        StepDistribution d(std::move(g), WalkMode::exact);
        d.exact_.assign(static_cast<std::size_t>(d.group_.order()), Rational(0));
        Rational total = 0;
        for (auto [r, p] : probs) {
            p.canonicalize();
            if (r >= d.group_.order()) throw DomainError("probability assigned to an element outside the group");
            if (sgn(p) < 0) throw DomainError("negative probability " + p.get_str());
            d.exact_[static_cast<std::size_t>(r)] += p;
            total += p;
        }
        if (total != 1) throw DomainError("probabilities sum to " + total.get_str() + ", not 1");
        return d;
    }

    static StepDistribution exact(GroupSpec g, const std::map<GroupElement, Rational>& probs) {
        std::map<Rank, Rational> by_rank;
        for (const auto& [e, p] : probs) {
            if (!(e.group() == g)) throw StructuralError("element " + e.to_string() + " is not in " + g.to_string());
            by_rank[e.rank()] += p;
        }
        return exact(std::move(g), by_rank);
    }

    /// Uniform over a multiset of ranks (repeats add mass).
    static StepDistribution uniform(GroupSpec g, const std::vector<Rank>& multiset) {
        if (multiset.empty()) throw DomainError("step multiset is empty");
        std::map<Rank, Rational> probs;
        const Rational w(1, static_cast<unsigned long>(multiset.size()));
        for (Rank r : multiset) probs[r] += w;
        return exact(std::move(g), probs);
    }

    /// Uniform over integer steps on a cycle Z_n.
    static StepDistribution uniform_on_cycle(std::int64_t n, const std::vector<std::int64_t>& steps) {
        std::vector<Rank> ranks;
        for (auto s : steps) ranks.push_back(static_cast<Rank>(mod_floor(s, n)));
        return uniform(GroupSpec::cycle(n), ranks);
    }

    /// Floating-point law; values must have been created at `precision_bits`.
    static StepDistribution floating(GroupSpec g, const std::map<Rank, Real>& probs, Real tolerance,
                                     unsigned precision_bits = kDefaultPrecisionBits) {
        g.require_enumerable();
        ScopedPrecision guard(precision_bits);
        StepDistribution d(std::move(g), WalkMode::floating);
        d.precision_bits_ = precision_bits;
        d.tolerance_ = std::move(tolerance);
        d.approx_.assign(static_cast<std::size_t>(d.group_.order()), Real(0));
        Real total = 0;
        for (const auto& [r, p] : probs) {
            if (r >= d.group_.order()) throw DomainError("probability assigned to an element outside the group");
            if (p < -d.tolerance_) throw DomainError("negative probability");
            d.approx_[static_cast<std::size_t>(r)] += p;
            total += p;
        }
        if (boost::multiprecision::abs(total - 1) > d.tolerance_)
            throw DomainError("floating probabilities do not sum to 1 within tolerance");
        return d;
    }

    const GroupSpec& group() const noexcept { return group_; }
    WalkMode mode() const noexcept { return mode_; }
    bool is_exact() const noexcept { return mode_ == WalkMode::exact; }
    unsigned precision_bits() const noexcept { return precision_bits_; }
    const Real& tolerance() const noexcept { return tolerance_; }

    const Rational& prob(Rank r) const {
        if (!is_exact()) throw DomainError("exact probability requested from a floating walk");
        return exact_.at(static_cast<std::size_t>(r));
    }

    /// Probability as an MPFR value (call under a ScopedPrecision).
    Real prob_real(Rank r) const {
        return is_exact() ? to_real(exact_.at(static_cast<std::size_t>(r))) : approx_.at(static_cast<std::size_t>(r));
    }

    /// Probability as a double, for simulation.
    double prob_double(Rank r) const {
        return is_exact() ? exact_.at(static_cast<std::size_t>(r)).get_d()
                          : approx_.at(static_cast<std::size_t>(r)).convert_to<double>();
    }

    std::span<const Rational> exact_probs() const {
        if (!is_exact()) throw DomainError("exact probabilities requested from a floating walk");
        return exact_;
    }

    bool in_support(Rank r) const {
        return is_exact() ? sgn(exact_[static_cast<std::size_t>(r)]) != 0
                          : approx_[static_cast<std::size_t>(r)] > tolerance_;
    }

    std::vector<Rank> support() const {
        std::vector<Rank> out;
        for (Rank r = 0; r < group_.order(); ++r)
            if (in_support(r)) out.push_back(r);
        return out;
    }

    /// Smallest multiset whose uniform law is this distribution (exact mode).
    std::vector<Rank> minimal_multiset() const {
        Integer lcm = 1;
        for (const auto& p : exact_probs())
            if (sgn(p) != 0) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), p.get_den().get_mpz_t());
        std::vector<Rank> out;
        for (Rank r = 0; r < group_.order(); ++r) {
            const Rational scaled = exact_[static_cast<std::size_t>(r)] * Rational(lcm);
            const Integer count = scaled.get_num();
            if (count > 1'000'000) throw CapacityError("multiset representation too large");
            for (long i = 0; i < count.get_si(); ++i) out.push_back(r);
        }
        return out;
    }

    /// Same law as a floating distribution at the given precision.
    StepDistribution to_floating(unsigned precision_bits, const Real& tolerance) const {
        if (!is_exact()) return *this;
        ScopedPrecision guard(precision_bits);
        std::map<Rank, Real> probs;
        for (Rank r = 0; r < group_.order(); ++r)
            if (sgn(exact_[static_cast<std::size_t>(r)]) != 0) probs[r] = to_real(exact_[static_cast<std::size_t>(r)]);
        return floating(group_, probs, tolerance, precision_bits);
    }

    std::string describe() const {
        std::string s = group_.to_string() + " {";
        bool first = true;
        for (Rank r = 0; r < group_.order(); ++r) {
            if (!in_support(r)) continue;
            if (!first) s += ", ";
            first = false;
            s += GroupElement::from_rank(group_, r).to_string() + ": ";
            if (is_exact()) s += exact_[static_cast<std::size_t>(r)].get_str();
            else {
                ScopedPrecision guard(precision_bits_);
                s += approx_[static_cast<std::size_t>(r)].str(20);
            }
        }
        return s + "}";
    }

private:
    StepDistribution(GroupSpec g, WalkMode m) : group_(std::move(g)), mode_(m), tolerance_(default_tolerance()) {}

    GroupSpec group_;
    WalkMode mode_;
    std::vector<Rational> exact_;
    std::vector<Real> approx_;
    Real tolerance_;
    unsigned precision_bits_ = kDefaultPrecisionBits;
};

/// Multiset of steps in a group; induces the uniform law.
struct StepMultiset {
    GroupSpec group;
    std::vector<Rank> elements;

    static StepMultiset on_cycle(std::int64_t n, const std::vector<std::int64_t>& steps) {
        StepMultiset m{GroupSpec::cycle(n), {}};
        for (auto s : steps) m.elements.push_back(static_cast<Rank>(mod_floor(s, n)));
        return m;
    }

    StepDistribution distribution() const { return StepDistribution::uniform(group, elements); }
};

/// Multiset of integer steps on Z.
using IntegerMultiset = std::vector<std::int64_t>;

/// The irrational walk on Z_7 with gamma_hat(3) = gamma_hat(-3) that is still reconstructive.
inline StepDistribution delta_walk_z7(unsigned precision_bits = kDefaultPrecisionBits) {
    ScopedPrecision guard(precision_bits);
    const Real c = boost::multiprecision::cos(6 * pi_real() / 7);
    const Real delta = (c + Real(0.5)) / (2 * c - 1);
    std::map<Rank, Real> probs{{1, Real(0.5) + delta}, {2, Real(0.5) - delta}};
    return StepDistribution::floating(GroupSpec::cycle(7), probs, default_tolerance(), precision_bits);
}

// ---------------------------------------------------------------------------
// Fourier transform
// ---------------------------------------------------------------------------

class FourierTable {
public:
    FourierTable(GroupSpec g, std::vector<CyclotomicNumber> exact)
        : group_(std::move(g)), mode_(WalkMode::exact), exact_(std::move(exact)) {}
    FourierTable(GroupSpec g, std::vector<ComplexReal> approx, Real tolerance, unsigned bits)
        : group_(std::move(g)), mode_(WalkMode::floating), approx_(std::move(approx)),
          tolerance_(std::move(tolerance)), precision_bits_(bits) {}

    const GroupSpec& group() const noexcept { return group_; }
    WalkMode mode() const noexcept { return mode_; }
    bool is_exact() const noexcept { return mode_ == WalkMode::exact; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(group_.order()); }
    const Real& tolerance() const noexcept { return tolerance_; }
    unsigned precision_bits() const noexcept { return precision_bits_; }

    const CyclotomicNumber& exact_at(Rank x) const { return exact_.at(static_cast<std::size_t>(x)); }
    const ComplexReal& approx_at(Rank x) const { return approx_.at(static_cast<std::size_t>(x)); }
    const std::vector<CyclotomicNumber>& exact_values() const { return exact_; }

    /// Numeric value in either mode (exact entries are evaluated).
    ComplexReal numeric_at(Rank x) const {
        return is_exact() ? numeric_eval(exact_at(x), precision_bits_) : approx_at(x);
    }

private:
    GroupSpec group_;
    WalkMode mode_;
    std::vector<CyclotomicNumber> exact_;
    std::vector<ComplexReal> approx_;
    Real tolerance_{0};
    unsigned precision_bits_ = kDefaultPrecisionBits;
};

/// The cyclotomic context for a group whose moduli are all prime, or the first composite modulus.
inline std::variant<CyclotomicContext, std::int64_t> cyclotomic_context_for(const GroupSpec& g) {
    std::vector<std::int64_t> primes;
    for (const auto& f : g.factors()) {
        if (!is_prime(static_cast<std::uint64_t>(f.modulus))) return f.modulus;
        primes.push_back(f.modulus);
    }
    return CyclotomicContext(primes);
}

/// Exponent vector of the character value at (k, x): per factor, k_i . x_i mod p_i.
inline std::vector<std::int64_t> character_exponents(const GroupSpec& g, Rank k, Rank x) {
    std::vector<std::int64_t> e(g.num_factors());
    for (std::size_t i = 0; i < g.num_factors(); ++i) e[i] = g.dot_ranks(k, x, i);
    return e;
}

inline FourierTable exact_fourier(const StepDistribution& gamma, const CyclotomicContext& ctx) {
    const auto& g = gamma.group();
    const auto support = gamma.support();
    std::vector<CyclotomicNumber> values;
    values.reserve(static_cast<std::size_t>(g.order()));
    for (Rank x = 0; x < g.order(); ++x) {
        CyclotomicPolynomial poly(ctx);
        for (Rank k : support) poly.add_term(character_exponents(g, k, x), gamma.prob(k));
        values.push_back(reduce(poly));
    }
    return FourierTable(g, std::move(values));
}

inline FourierTable floating_fourier(const StepDistribution& gamma, unsigned bits, const Real& tol) {
    ScopedPrecision guard(bits);
    const auto& g = gamma.group();
    const auto support = gamma.support();
    // Per factor, the roots w_{n_i}^e for e in [0, n_i).
    std::vector<std::vector<ComplexReal>> roots(g.num_factors());
    for (std::size_t i = 0; i < g.num_factors(); ++i) {
        const auto n = g.factors()[i].modulus;
        for (std::int64_t e = 0; e < n; ++e) roots[i].push_back(root_of_unity(n, e));
    }
    std::vector<Real> probs;
    for (Rank k : support) probs.push_back(gamma.prob_real(k));
    std::vector<ComplexReal> values;
    values.reserve(static_cast<std::size_t>(g.order()));
    for (Rank x = 0; x < g.order(); ++x) {
        ComplexReal acc;
        for (std::size_t s = 0; s < support.size(); ++s) {
            ComplexReal term(probs[s]);
            for (std::size_t i = 0; i < g.num_factors(); ++i) {
                const auto e = g.dot_ranks(support[s], x, i);
                if (e != 0) term = term * roots[i][static_cast<std::size_t>(e)];
            }
            acc += term;
        }
        values.push_back(std::move(acc));
    }
    return FourierTable(g, std::move(values), tol, bits);
}

/**
 * Fourier table of gamma. Exact walks need every modulus prime (the moduli
 * are distinct after canonicalization); otherwise FallbackRequiredError names
 * the offending factor. Floating walks work on any group.
 */
inline FourierTable fourier_transform(const StepDistribution& gamma) {
    gamma.group().require_enumerable();
    if (!gamma.is_exact()) return floating_fourier(gamma, gamma.precision_bits(), gamma.tolerance());
    auto ctx = cyclotomic_context_for(gamma.group());
    if (auto* bad = std::get_if<std::int64_t>(&ctx))
        throw FallbackRequiredError("exact Fourier transform needs prime moduli; factor Z" + std::to_string(*bad) +
                                    " is composite");
    return exact_fourier(gamma, std::get<CyclotomicContext>(ctx));
}

/// Fourier transform that silently falls back to MPFR when a modulus is composite.
inline FourierTable fourier_transform_any(const StepDistribution& gamma,
                                          unsigned bits = kDefaultPrecisionBits) {
    if (gamma.is_exact()) {
        auto ctx = cyclotomic_context_for(gamma.group());
        if (auto* c = std::get_if<CyclotomicContext>(&ctx)) return exact_fourier(gamma, *c);
        return floating_fourier(gamma, bits, default_tolerance());
    }
    return floating_fourier(gamma, gamma.precision_bits(), gamma.tolerance());
}

// ---------------------------------------------------------------------------
// Collisions
// ---------------------------------------------------------------------------

struct CollisionScan {
    std::vector<std::pair<Rank, Rank>> pairs;      ///< x < y with equal coefficients
    std::vector<std::pair<Rank, Rank>> near_ties;  ///< tol <= |difference| < 10 tol (floating only)
};

/**
 * All unordered pairs with equal coefficients. Exact tables bucket the
 * canonical forms; floating tables compare within the tolerance and report
 * differences inside the decision margin separately.
 */
inline CollisionScan find_collisions(const FourierTable& table) {
    CollisionScan out;
    const std::size_t n = table.size();
    std::vector<Rank> order(n);
    std::iota(order.begin(), order.end(), Rank{0});
    if (table.is_exact()) {
        std::stable_sort(order.begin(), order.end(),
                         [&](Rank a, Rank b) { return table.exact_at(a) < table.exact_at(b); });
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i + 1;
            while (j < n && table.exact_at(order[j]) == table.exact_at(order[i])) ++j;
            std::vector<Rank> bucket(order.begin() + static_cast<std::ptrdiff_t>(i),
                                     order.begin() + static_cast<std::ptrdiff_t>(j));
            std::sort(bucket.begin(), bucket.end());
            for (std::size_t a = 0; a < bucket.size(); ++a)
                for (std::size_t b = a + 1; b < bucket.size(); ++b) out.pairs.emplace_back(bucket[a], bucket[b]);
            i = j;
        }
    } else {
        ScopedPrecision guard(table.precision_bits());
        const Real& tol = table.tolerance();
        const Real margin = 10 * tol;
        std::sort(order.begin(), order.end(),
                  [&](Rank a, Rank b) { return table.approx_at(a).re < table.approx_at(b).re; });
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const auto& a = table.approx_at(order[i]);
                const auto& b = table.approx_at(order[j]);
                if (b.re - a.re >= margin) break;
                const Real d = (a - b).abs();
                auto p = std::minmax(order[i], order[j]);
                if (d < tol) out.pairs.emplace_back(p.first, p.second);
                else if (d < margin) out.near_ties.emplace_back(p.first, p.second);
            }
        }
    }
    std::sort(out.pairs.begin(), out.pairs.end());
    std::sort(out.near_ties.begin(), out.near_ties.end());
    return out;
}

/// gamma(k) = gamma(-k) for every k (within tolerance for floating walks).
inline bool is_symmetric(const StepDistribution& gamma) {
    const auto& g = gamma.group();
    if (gamma.is_exact()) {
        for (Rank k = 0; k < g.order(); ++k)
            if (gamma.prob(k) != gamma.prob(g.neg_rank(k))) return false;
        return true;
    }
    ScopedPrecision guard(gamma.precision_bits());
    for (Rank k = 0; k < g.order(); ++k)
        if (boost::multiprecision::abs(gamma.prob_real(k) - gamma.prob_real(g.neg_rank(k))) >= gamma.tolerance())
            return false;
    return true;
}

inline void require_prime_cycle_above_5(const GroupSpec& g, const char* what) {
    if (!g.is_cycle()) throw DomainError(std::string(what) + " needs a cycle Z_p, got " + g.to_string());
    const auto p = g.factors()[0].modulus;
    if (!is_prime(static_cast<std::uint64_t>(p)) || p <= 5)
        throw DomainError(std::string(what) + " needs a prime cycle with p > 5, got Z" + std::to_string(p));
}

/**
 * For a collision gamma_hat(x) = gamma_hat(y) on Z_p (p > 5 prime, exact gamma)
 * returns v = x^{-1} y after checking gamma(k v) = gamma(k) for all k. When x or
 * y is 0 the walk must be the point mass at 0; that is checked and nullopt is
 * returned.
 */
inline std::optional<std::int64_t> multiplier_of_collision(const StepDistribution& gamma, Rank x, Rank y) {
    const auto& g = gamma.group();
    require_prime_cycle_above_5(g, "multiplier_of_collision");
    if (!gamma.is_exact()) throw DomainError("multiplier_of_collision needs an exact rational walk");
    if (x == y) throw DomainError("multiplier_of_collision needs x != y");
    const auto p = g.factors()[0].modulus;
    if (x >= g.order() || y >= g.order()) throw DomainError("element outside the group");
    CyclotomicContext ctx({p});
    auto value_at = [&](Rank z) {
        CyclotomicPolynomial poly(ctx);
        for (Rank k : gamma.support()) poly.add_term(character_exponents(g, k, z), gamma.prob(k));
        return reduce(poly);
    };
    if (!(value_at(x) == value_at(y)))
        throw DomainError("gamma_hat(" + std::to_string(x) + ") != gamma_hat(" + std::to_string(y) + ")");
    if (x == 0 || y == 0) {
        if (gamma.prob(0) != 1)
            throw InconsistencyError("collision with 0 but the walk is not the point mass at 0");
        return std::nullopt;
    }
    const std::int64_t v = mod_floor(inverse_mod(static_cast<std::int64_t>(x), p) * static_cast<std::int64_t>(y), p);
    for (Rank k = 0; k < g.order(); ++k)
        if (gamma.prob(g.scale_rank(v, k)) != gamma.prob(k))
            throw InconsistencyError("collision multiplier " + std::to_string(v) + " does not preserve gamma at k=" +
                                     std::to_string(k));
    return v;
}

// ---------------------------------------------------------------------------
// Drift and bounded support
// ---------------------------------------------------------------------------

/// Sum of the multiset in the group.
inline Rank drift(const StepMultiset& gamma) {
    Rank acc = 0;
    for (Rank k : gamma.elements) acc = gamma.group.add_ranks(acc, k);
    return acc;
}

enum class Verdict { reconstructive, not_reconstructive, unknown };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::reconstructive: return "Reconstructive";
    case Verdict::not_reconstructive: return "NotReconstructive";
    case Verdict::unknown: return "Unknown";
    }
    return "?";
}

struct Collision {
    Rank x;
    Rank y;
    std::optional<std::int64_t> multiplier;
};

struct AnalysisVerdict {
    bool distinct = false;
    std::vector<Collision> collisions;
    std::vector<std::pair<Rank, Rank>> near_ties;
    std::optional<Rank> drift;  ///< cycles with exact walks only
    bool symmetric = false;
    Verdict verdict = Verdict::unknown;
    std::string reason;
    std::string decided_by = "fourier";
    std::optional<FourierTable> table;

    bool has_collision(Rank x, Rank y) const {
        auto p = std::minmax(x, y);
        return std::any_of(collisions.begin(), collisions.end(),
                           [&](const Collision& c) { return c.x == p.first && c.y == p.second; });
    }
};

/**
 * Full pipeline: Fourier table, collision scan, multipliers, drift, symmetry.
 *
 *  - distinct coefficients -> Reconstructive (any finite abelian group);
 *  - repeated coefficients, exact rational walk, every modulus a prime > 5
 *    -> NotReconstructive;
 *  - repeated coefficients otherwise -> Unknown with the reason. Irrational
 *    walks, p <= 5 and composite moduli all have known counterexamples or
 *    open status, so nothing is concluded there.
 */
inline AnalysisVerdict analyze(const StepDistribution& gamma, FourierTable table) {
    const auto& g = gamma.group();
    if (!(table.group() == g)) throw StructuralError("Fourier table and walk live on different groups");
    AnalysisVerdict out;
    const CollisionScan scan = find_collisions(table);
    out.near_ties = scan.near_ties;
    out.distinct = scan.pairs.empty() && scan.near_ties.empty();
    out.symmetric = is_symmetric(gamma);

    const bool exact_table = table.is_exact();
    bool primes_above_5 = true;
    std::int64_t offending = 0;
    for (const auto& f : g.factors()) {
        if (!is_prime(static_cast<std::uint64_t>(f.modulus)) || f.modulus <= 5) {
            primes_above_5 = false;
            offending = f.modulus;
            break;
        }
    }
    const bool prime_cycle_theorem = g.is_cycle() && primes_above_5 && gamma.is_exact();
    for (const auto& [x, y] : scan.pairs) {
        Collision c{x, y, std::nullopt};
        if (prime_cycle_theorem) c.multiplier = multiplier_of_collision(gamma, x, y);
        out.collisions.push_back(c);
    }
    if (g.is_cycle() && gamma.is_exact()) out.drift = drift(StepMultiset{g, gamma.minimal_multiset()});

    if (out.distinct) {
        out.verdict = Verdict::reconstructive;
        out.reason = "Fourier coefficients are distinct";
    } else if (scan.pairs.empty()) {
        out.verdict = Verdict::unknown;
        out.reason = "coefficient differences fall inside the decision margin (tol, 10 tol)";
    } else if (gamma.is_exact() && exact_table && primes_above_5) {
        out.verdict = Verdict::not_reconstructive;
        out.reason = "repeated Fourier coefficient on a product of primes > 5 with rational probabilities";
    } else {
        out.verdict = Verdict::unknown;
        if (!gamma.is_exact())
            out.reason = "repeated coefficient but the walk is irrational; irrational walks with repeated "
                         "coefficients can still be reconstructive (e.g. the delta walk on Z7)";
        else if (!is_prime(static_cast<std::uint64_t>(offending)))
            out.reason = "repeated coefficient on a group with composite factor Z" + std::to_string(offending) +
                         "; necessity of distinctness is open there";
        else
            out.reason = "repeated coefficient with small prime factor Z" + std::to_string(offending) +
                         " (p <= 5); distinctness is not necessary there";
    }
    out.table = std::move(table);
    return out;
}

inline AnalysisVerdict analyze(const StepDistribution& gamma, unsigned precision_bits = kDefaultPrecisionBits) {
    gamma.group().require_enumerable();
    return analyze(gamma, fourier_transform_any(gamma, precision_bits));
}

/**
 * Non-zero drift on Z_p (p > 5 prime) decides Reconstructive without any
 * Fourier work; zero drift defers to analyze().
 */
inline AnalysisVerdict drift_verdict(const StepMultiset& gamma) {
    require_prime_cycle_above_5(gamma.group, "drift_verdict");
    if (gamma.elements.empty()) throw DomainError("step multiset is empty");
    const Rank d = drift(gamma);
    if (d != 0) {
        AnalysisVerdict out;
        out.distinct = true;
        out.drift = d;
        out.symmetric = is_symmetric(gamma.distribution());
        out.verdict = Verdict::reconstructive;
        out.reason = "non-zero drift " + std::to_string(d);
        out.decided_by = "drift";
        return out;
    }
    AnalysisVerdict out = analyze(gamma.distribution());
    out.drift = d;
    return out;
}

/// gamma_n(k) = sum over a = k mod n of gamma(a), for gamma uniform on an integer multiset.
inline StepDistribution embed_mod_n(const IntegerMultiset& gamma, std::int64_t n) {
    if (n < 2) throw DomainError("embed_mod_n needs n >= 2");
    return StepDistribution::uniform_on_cycle(n, gamma);
}

inline bool is_symmetric(const IntegerMultiset& gamma) {
    IntegerMultiset a = gamma, b;
    for (auto x : gamma) b.push_back(-x);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

struct BoundedSupportResult {
    std::int64_t gcd = 0;                    ///< d
    IntegerMultiset normalized;              ///< Gamma / d
    std::vector<std::int64_t> support;       ///< distinct values of Gamma / d
    std::vector<std::int64_t> coefficients;  ///< c, one per support value, sum c_i s_i = 1
    std::int64_t b = 0;
    std::int64_t N = 0;
    bool symmetric = false;
};

namespace detail {

/// max |x| over c(Gamma) = { sum_i c_i t_i : t_i in Gamma }.
inline std::int64_t c_image_bound(const std::vector<std::int64_t>& c, const std::vector<std::int64_t>& support) {
    const auto [lo_it, hi_it] = std::minmax_element(support.begin(), support.end());
    std::int64_t hi = 0, lo = 0;
    for (auto ci : c) {
        hi += std::max(ci * *lo_it, ci * *hi_it);
        lo += std::min(ci * *lo_it, ci * *hi_it);
    }
    return std::max(std::abs(hi), std::abs(lo));
}

/// Extended Euclid over the support: first family with gcd 1, coefficients in input order.
inline std::vector<std::int64_t> bezout_certificate(const std::vector<std::int64_t>& s) {
    std::vector<std::int64_t> c(s.size(), 0);
    std::int64_t g = 0;
    for (std::size_t i = 0; i < s.size() && g != 1; ++i) {
        // Solve u*g + w*s[i] = gcd(g, s[i]); then scale earlier coefficients by u.
        std::int64_t old_r = g, r = s[i], old_u = 1, u = 0, old_w = 0, w = 1;
        while (r != 0) {
            const std::int64_t q = old_r / r;
            std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
            std::tie(old_u, u) = std::make_pair(u, old_u - q * u);
            std::tie(old_w, w) = std::make_pair(w, old_w - q * w);
        }
        if (old_r < 0) {
            old_r = -old_r;
            old_u = -old_u;
            old_w = -old_w;
        }
        for (std::size_t j = 0; j < i; ++j) c[j] *= old_u;
        c[i] = old_w;
        g = old_r;
    }
    if (g != 1) throw InconsistencyError("bezout certificate: gcd is not 1");
    return c;
}

} // namespace detail

/**
 * Explicit N such that for every prime n > N the embedded walk on Z_n is
 * reconstructive, unless the walk is symmetric (then no N works).
 *
 * Gamma is divided by d = gcd(Gamma). A coefficient vector c with
 * sum_i c_i s_i = 1 certifies 1 in c(Gamma/d); b is the largest absolute value
 * in c(Gamma/d) together with Gamma/d itself, and N = max(2 b^2, |d|).
 */
inline BoundedSupportResult bounded_support_N(const IntegerMultiset& gamma) {
    if (gamma.empty()) throw DomainError("bounded_support_N: empty multiset");
    BoundedSupportResult out;
    out.symmetric = is_symmetric(gamma);
    std::int64_t d = 0;
    for (auto a : gamma) d = std::gcd(d, a);
    out.gcd = d;
    if (d == 0) {
        // Gamma = {0, ..., 0}: the walk never moves.
        out.normalized = gamma;
        out.support = {0};
        return out;
    }
    for (auto a : gamma) out.normalized.push_back(a / d);
    out.support = out.normalized;
    std::sort(out.support.begin(), out.support.end());
    out.support.erase(std::unique(out.support.begin(), out.support.end()), out.support.end());
    std::int64_t max_abs = 0;
    for (auto s : out.support) max_abs = std::max(max_abs, std::abs(s));

    const std::size_t m = out.support.size();
    std::vector<std::int64_t> best;
    std::int64_t best_b = std::numeric_limits<std::int64_t>::max();
    auto consider = [&](const std::vector<std::int64_t>& c) {
        const std::int64_t b = std::max(detail::c_image_bound(c, out.support), max_abs);
        if (b < best_b) {
            best_b = b;
            best = c;
        }
    };
    for (std::size_t i = 0; i < m; ++i) {
        if (out.support[i] == 1 || out.support[i] == -1) {
            std::vector<std::int64_t> c(m, 0);
            c[i] = out.support[i];
            consider(c);
        }
    }
    if (best.empty() && m <= 4 && max_abs <= 64) {
        // Exhaustive search over |c_i| <= max_abs minimizing b.
        std::vector<std::int64_t> c(m, -max_abs);
        while (true) {
            std::int64_t sum = 0;
            for (std::size_t i = 0; i < m; ++i) sum += c[i] * out.support[i];
            if (sum == 1) consider(c);
            std::size_t i = 0;
            while (i < m && c[i] == max_abs) c[i++] = -max_abs;
            if (i == m) break;
            ++c[i];
        }
    }
    if (best.empty()) consider(detail::bezout_certificate(out.support));
    out.coefficients = best;
    out.b = best_b;
    out.N = std::max(2 * best_b * best_b, std::abs(d));
    return out;
}

} // namespace scenerylab
