#pragma once

/**
 * @file cyclotomic.hpp
 * @brief Exact arithmetic in Q(w_{p_1}, ..., w_{p_m}) for distinct primes p_j.
 *
 * Elements are stored in the power basis {t_1^{e_1} ... t_m^{e_m} : 0 <= e_j <= p_j - 2}
 * where t_j stands for w_{p_j} = exp(-2 pi i / p_j). Over Q(w_{p_1}, ..., w_{p_{j-1}})
 * the minimal polynomial of w_{p_j} is still 1 + t + ... + t^{p_j - 1}, so every
 * variable can be reduced independently with
 *
 *     t_j^{p_j}     -> 1
 *     t_j^{p_j - 1} -> -(1 + t_j + ... + t_j^{p_j - 2})
 *
 * and the reduced form is canonical. Equality and zero tests are therefore
 * plain coefficient-map comparisons.
 *
 * Exponent vectors are packed into one 64-bit key using radix p_j per variable
 * (first prime most significant), which keeps the coefficient map ordered
 * lexicographically by exponent vector.
 */

#include "scenerylab/errors.hpp"
#include "scenerylab/group.hpp"
#include "scenerylab/linalg.hpp"
#include "scenerylab/number.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace scenerylab {

using ExponentKey = std::uint64_t;

/// Ordered list of distinct primes shared by a family of CyclotomicNumbers.
class CyclotomicContext {
public:
    explicit CyclotomicContext(std::vector<std::int64_t> primes) {
        if (primes.empty()) throw DomainError("cyclotomic context needs at least one prime");
        auto data = std::make_shared<Data>();
        unsigned __int128 radix_product = 1;
        for (std::size_t i = 0; i < primes.size(); ++i) {
            const auto p = primes[i];
            if (p < 2 || !is_prime(static_cast<std::uint64_t>(p)))
                throw DomainError("cyclotomic context: " + std::to_string(p) + " is not prime");
            for (std::size_t j = 0; j < i; ++j)
                if (primes[j] == p) throw DomainError("cyclotomic context: repeated prime " + std::to_string(p));
            radix_product *= static_cast<unsigned __int128>(p);
            if (radix_product > (static_cast<unsigned __int128>(1) << 62))
                throw CapacityError("cyclotomic context: prime product too large");
        }
        data->primes = std::move(primes);
        const std::size_t m = data->primes.size();
        data->radix.assign(m, 1);
        for (std::size_t i = m; i-- > 1;)
            data->radix[i - 1] = data->radix[i] * static_cast<std::uint64_t>(data->primes[i]);
        data->degree = 1;
        for (auto p : data->primes) data->degree *= static_cast<std::uint64_t>(p - 1);
        data_ = std::move(data);
    }

    std::span<const std::int64_t> primes() const noexcept { return data_->primes; }
    std::size_t size() const noexcept { return data_->primes.size(); }
    /// Dimension over Q: product of (p_j - 1).
    std::uint64_t degree() const noexcept { return data_->degree; }

    /// Exponent of variable j inside a packed key.
    std::int64_t exponent(ExponentKey key, std::size_t j) const {
        return static_cast<std::int64_t>((key / data_->radix[j]) % static_cast<std::uint64_t>(data_->primes[j]));
    }

    std::vector<std::int64_t> unpack(ExponentKey key) const {
        std::vector<std::int64_t> e(size());
        for (std::size_t j = 0; j < size(); ++j) e[j] = exponent(key, j);
        return e;
    }

    /// Packs exponents after reducing each modulo its prime.
    ExponentKey pack(std::span<const std::int64_t> exps) const {
        if (exps.size() != size()) throw StructuralError("exponent vector length does not match context");
        ExponentKey key = 0;
        for (std::size_t j = 0; j < size(); ++j)
            key += static_cast<ExponentKey>(mod_floor(exps[j], data_->primes[j])) * data_->radix[j];
        return key;
    }

    /// Key for the sum of two exponent vectors (mod each prime).
    ExponentKey add_keys(ExponentKey a, ExponentKey b) const {
        ExponentKey key = 0;
        for (std::size_t j = 0; j < size(); ++j) {
            const auto p = static_cast<std::uint64_t>(data_->primes[j]);
            key += ((a / data_->radix[j]) % p + (b / data_->radix[j]) % p) % p * data_->radix[j];
        }
        return key;
    }

    ExponentKey with_exponent(ExponentKey key, std::size_t j, std::int64_t e) const {
        return key - static_cast<ExponentKey>(exponent(key, j)) * data_->radix[j] +
               static_cast<ExponentKey>(mod_floor(e, data_->primes[j])) * data_->radix[j];
    }

    /// All reduced basis keys in lexicographic order.
    std::vector<ExponentKey> basis_keys() const {
        std::vector<ExponentKey> keys{0};
        for (std::size_t j = 0; j < size(); ++j) {
            std::vector<ExponentKey> next;
            for (auto k : keys)
                for (std::int64_t e = 0; e + 1 < data_->primes[j]; ++e) next.push_back(with_exponent(k, j, e));
            keys = std::move(next);
        }
        std::sort(keys.begin(), keys.end());
        return keys;
    }

    friend bool operator==(const CyclotomicContext& a, const CyclotomicContext& b) {
        return a.data_ == b.data_ || a.data_->primes == b.data_->primes;
    }

private:
    struct Data {
        std::vector<std::int64_t> primes;
        std::vector<std::uint64_t> radix;
        std::uint64_t degree = 1;
    };
    std::shared_ptr<const Data> data_;
};

/// Unreduced polynomial in t_1..t_m; exponents are taken modulo p_j on insertion.
class CyclotomicPolynomial {
public:
    explicit CyclotomicPolynomial(CyclotomicContext ctx) : ctx_(std::move(ctx)) {}

    void add_term(std::span<const std::int64_t> exps, const Rational& c) { add_term(ctx_.pack(exps), c); }
    void add_term(ExponentKey key, Rational c) {
        c.canonicalize();
        if (sgn(c) == 0) return;
        auto [it, inserted] = terms_.try_emplace(key, std::move(c));
        if (!inserted) {
            it->second += c;
            if (sgn(it->second) == 0) terms_.erase(it);
        }
    }

    const CyclotomicContext& context() const noexcept { return ctx_; }
    const std::map<ExponentKey, Rational>& terms() const noexcept { return terms_; }

private:
    CyclotomicContext ctx_;
    std::map<ExponentKey, Rational> terms_;
};

class CyclotomicNumber;
CyclotomicNumber reduce(const CyclotomicPolynomial& poly);

class CyclotomicNumber {
public:
    explicit CyclotomicNumber(CyclotomicContext ctx) : ctx_(std::move(ctx)) {}
    CyclotomicNumber(CyclotomicContext ctx, const Rational& c) : ctx_(std::move(ctx)) {
        if (sgn(c) != 0) coeffs_.emplace(0, c);
    }

    /// The monomial t^exps, reduced.
    static CyclotomicNumber monomial(const CyclotomicContext& ctx, std::span<const std::int64_t> exps,
                                     const Rational& c = Rational(1)) {
        CyclotomicPolynomial p(ctx);
        p.add_term(exps, c);
        return reduce(p);
    }

    const CyclotomicContext& context() const noexcept { return ctx_; }
    const std::map<ExponentKey, Rational>& coeffs() const noexcept { return coeffs_; }

    bool is_zero() const noexcept { return coeffs_.empty(); }

    /// True when the value lies in Q (only the constant basis element is used).
    bool is_rational() const noexcept { return coeffs_.empty() || (coeffs_.size() == 1 && coeffs_.begin()->first == 0); }
    Rational rational_value() const {
        if (!is_rational()) throw DomainError("cyclotomic number is not rational");
        return coeffs_.empty() ? Rational(0) : coeffs_.begin()->second;
    }

    /// Sum of absolute coefficient values.
    Rational l1_norm() const {
        Rational s = 0;
        for (const auto& [k, c] : coeffs_) s += abs(c);
        return s;
    }

    CyclotomicNumber& operator+=(const CyclotomicNumber& o) {
        require_same(o);
        for (const auto& [k, c] : o.coeffs_) accumulate(coeffs_, k, c);
        return *this;
    }
    CyclotomicNumber& operator-=(const CyclotomicNumber& o) {
        require_same(o);
        for (const auto& [k, c] : o.coeffs_) accumulate(coeffs_, k, -c);
        return *this;
    }
    friend CyclotomicNumber operator+(CyclotomicNumber a, const CyclotomicNumber& b) { return a += b; }
    friend CyclotomicNumber operator-(CyclotomicNumber a, const CyclotomicNumber& b) { return a -= b; }
    friend CyclotomicNumber operator-(CyclotomicNumber a) {
        for (auto& [k, c] : a.coeffs_) c = -c;
        return a;
    }

    friend CyclotomicNumber operator*(const CyclotomicNumber& a, const CyclotomicNumber& b) {
        a.require_same(b);
        if (a.is_zero() || b.is_zero()) return CyclotomicNumber(a.ctx_);
        if (b.is_rational()) return a * b.coeffs_.begin()->second;
        if (a.is_rational()) return b * a.coeffs_.begin()->second;
        CyclotomicPolynomial prod(a.ctx_);
        for (const auto& [ka, ca] : a.coeffs_)
            for (const auto& [kb, cb] : b.coeffs_) prod.add_term(a.ctx_.add_keys(ka, kb), ca * cb);
        return reduce(prod);
    }
    friend CyclotomicNumber operator*(CyclotomicNumber a, const Rational& s) {
        if (sgn(s) == 0) return CyclotomicNumber(a.ctx_);
        for (auto& [k, c] : a.coeffs_) c *= s;
        return a;
    }
    friend CyclotomicNumber operator*(const Rational& s, CyclotomicNumber a) { return std::move(a) * s; }

    friend bool operator==(const CyclotomicNumber& a, const CyclotomicNumber& b) {
        return a.ctx_ == b.ctx_ && a.coeffs_ == b.coeffs_;
    }
    /// Total order on canonical forms; used for bucketing equal values.
    friend bool operator<(const CyclotomicNumber& a, const CyclotomicNumber& b) { return a.coeffs_ < b.coeffs_; }

private:
    friend CyclotomicNumber reduce(const CyclotomicPolynomial& poly);

    static void accumulate(std::map<ExponentKey, Rational>& m, ExponentKey k, const Rational& c) {
        if (sgn(c) == 0) return;
        auto [it, inserted] = m.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (sgn(it->second) == 0) m.erase(it);
        }
    }

    void require_same(const CyclotomicNumber& o) const {
        if (!(ctx_ == o.ctx_)) throw StructuralError("cyclotomic numbers have different contexts");
    }

    CyclotomicContext ctx_;
    std::map<ExponentKey, Rational> coeffs_;
};

/// Canonical reduced form of a polynomial evaluated at the roots of unity.
inline CyclotomicNumber reduce(const CyclotomicPolynomial& poly) {
    const auto& ctx = poly.context();
    std::map<ExponentKey, Rational> cur(poly.terms().begin(), poly.terms().end());
    for (std::size_t j = 0; j < ctx.size(); ++j) {
        const std::int64_t p = ctx.primes()[j];
        std::map<ExponentKey, Rational> next;
        for (const auto& [key, c] : cur) {
            if (ctx.exponent(key, j) != p - 1) {
                CyclotomicNumber::accumulate(next, key, c);
                continue;
            }
            for (std::int64_t e = 0; e <= p - 2; ++e) CyclotomicNumber::accumulate(next, ctx.with_exponent(key, j, e), -c);
        }
        cur = std::move(next);
    }
    CyclotomicNumber out(ctx);
    out.coeffs_ = std::move(cur);
    return out;
}

inline bool is_zero(const CyclotomicNumber& x) { return x.is_zero(); }

inline bool field_is_zero(const CyclotomicNumber& x) { return x.is_zero(); }

/**
 * Multiplicative inverse, found by solving the Q-linear system
 * (multiplication-by-x matrix) * y = 1 in the power basis.
 */
inline CyclotomicNumber field_inverse(const CyclotomicNumber& x) {
    if (x.is_zero()) throw DomainError("inverse of zero cyclotomic number");
    const auto& ctx = x.context();
    if (x.is_rational()) return CyclotomicNumber(ctx, Rational(1) / x.rational_value());
    const auto keys = ctx.basis_keys();
    const std::size_t d = keys.size();
    std::map<ExponentKey, std::size_t> index;
    for (std::size_t i = 0; i < d; ++i) index[keys[i]] = i;
    Matrix<Rational> m(d, std::vector<Rational>(d, Rational(0)));
    for (std::size_t col = 0; col < d; ++col) {
        CyclotomicPolynomial basis(ctx);
        basis.add_term(keys[col], Rational(1));
        const CyclotomicNumber prod = x * reduce(basis);
        for (const auto& [k, c] : prod.coeffs()) m[index.at(k)][col] = c;
    }
    std::vector<Rational> rhs(d, Rational(0));
    rhs[index.at(0)] = 1;
    const auto y = solve(std::move(m), std::move(rhs));
    CyclotomicPolynomial out(ctx);
    for (std::size_t i = 0; i < d; ++i) out.add_term(keys[i], y[i]);
    return reduce(out);
}

/// x / y in the field.
inline CyclotomicNumber divide(const CyclotomicNumber& x, const CyclotomicNumber& y) { return x * field_inverse(y); }

/// Raise to a nonnegative integer power by repeated squaring.
inline CyclotomicNumber pow(CyclotomicNumber base, std::uint64_t e) {
    CyclotomicNumber result(base.context(), Rational(1));
    while (e > 0) {
        if (e & 1U) result = result * base;
        e >>= 1U;
        if (e) base = base * base;
    }
    return result;
}

/**
 * Evaluate at w_{p_j} = exp(-2 pi i / p_j) with MPFR at the given precision.
 * The absolute error is bounded by 2^{3 - bits} (1 + sum |coeff|).
 */
inline ComplexReal numeric_eval(const CyclotomicNumber& x, unsigned precision_bits = kDefaultPrecisionBits) {
    ScopedPrecision guard(precision_bits);
    const auto& ctx = x.context();
    std::vector<std::vector<ComplexReal>> roots(ctx.size());
    for (std::size_t j = 0; j < ctx.size(); ++j) {
        const auto p = ctx.primes()[j];
        roots[j].reserve(static_cast<std::size_t>(p));
        for (std::int64_t e = 0; e < p; ++e) roots[j].push_back(root_of_unity(p, e));
    }
    ComplexReal acc;
    for (const auto& [key, c] : x.coeffs()) {
        ComplexReal term(to_real(c));
        for (std::size_t j = 0; j < ctx.size(); ++j) {
            const auto e = ctx.exponent(key, j);
            if (e != 0) term = term * roots[j][static_cast<std::size_t>(e)];
        }
        acc += term;
    }
    return acc;
}

/// Debug form: list of [exponent-vector, numerator, denominator] triples.
inline nlohmann::json to_json(const CyclotomicNumber& x) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [key, c] : x.coeffs())
        terms.push_back({x.context().unpack(key), c.get_num().get_str(), c.get_den().get_str()});
    return {{"primes", std::vector<std::int64_t>(x.context().primes().begin(), x.context().primes().end())},
            {"terms", terms}};
}

inline CyclotomicNumber cyclotomic_from_json(const nlohmann::json& j) {
    CyclotomicContext ctx(j.at("primes").get<std::vector<std::int64_t>>());
    CyclotomicPolynomial p(ctx);
    for (const auto& t : j.at("terms")) {
        const auto exps = t.at(0).get<std::vector<std::int64_t>>();
        Rational c(Integer(t.at(1).get<std::string>()), Integer(t.at(2).get<std::string>()));
        c.canonicalize();
        p.add_term(exps, c);
    }
    return reduce(p);
}

} // namespace scenerylab
