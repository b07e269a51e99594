#pragma once

/**
 * @file number.hpp
 * @brief Scalar types: exact rationals (GMP) and variable-precision reals (MPFR).
 */

#include "scenerylab/errors.hpp"

#include <gmpxx.h>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cctype>
#include <cmath>
#include <string>
#include <string_view>

namespace scenerylab {

using Rational = mpq_class;
using Integer = mpz_class;
using Real = boost::multiprecision::mpfr_float;

inline constexpr unsigned kDefaultPrecisionBits = 256;

/// Parses "3", "-2/7", "0.125" exactly. Decimals become exact rationals.
inline Rational parse_rational(std::string_view text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw ParseError("empty rational");
    const auto dot = s.find('.');
    if (dot != std::string::npos) {
        if (s.find('/') != std::string::npos) throw ParseError("rational '" + s + "' mixes '.' and '/'");
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        const std::size_t frac_len = s.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+") throw ParseError("bad decimal '" + s + "'");
        if (digits[0] == '+') digits.erase(0, 1);
        for (std::size_t i = (digits[0] == '-') ? 1 : 0; i < digits.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(digits[i]))) throw ParseError("bad decimal '" + s + "'");
        Integer num(digits, 10);
        Integer den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
        Rational q(num, den);
        q.canonicalize();
        return q;
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        const bool sign_ok = (c == '-' || c == '+') && (i == 0 || s[i - 1] == '/');
        if (!std::isdigit(static_cast<unsigned char>(c)) && c != '/' && !sign_ok)
            throw ParseError("bad rational '" + s + "'");
    }
    if (s[0] == '+') s.erase(0, 1);
    Rational q;
    if (q.set_str(s, 10) != 0) throw ParseError("bad rational '" + s + "'");
    if (q.get_den() == 0) throw ParseError("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline unsigned digits10_for_bits(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

/// Sets the MPFR working precision for new Real values (process-wide default).
class ScopedPrecision {
public:
    explicit ScopedPrecision(unsigned bits) : saved_(Real::default_precision()) {
        if (bits < 53) throw DomainError("precision must be at least 53 bits");
        Real::default_precision(digits10_for_bits(bits));
    }
    ~ScopedPrecision() { Real::default_precision(saved_); }
    ScopedPrecision(const ScopedPrecision&) = delete;
    ScopedPrecision& operator=(const ScopedPrecision&) = delete;

private:
    unsigned saved_;
};

inline Real to_real(const Rational& q) {
    Real num(q.get_num().get_mpz_t());
    Real den(q.get_den().get_mpz_t());
    return num / den;
}

inline Real pi_real() { return boost::math::constants::pi<Real>(); }

/// Minimal complex type over Real; std::complex is unspecified for non-builtin types.
struct ComplexReal {
    Real re{0};
    Real im{0};

    ComplexReal() = default;
    ComplexReal(Real r, Real i = Real(0)) : re(std::move(r)), im(std::move(i)) {}

    ComplexReal& operator+=(const ComplexReal& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    ComplexReal& operator-=(const ComplexReal& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    friend ComplexReal operator+(ComplexReal a, const ComplexReal& b) { return a += b; }
    friend ComplexReal operator-(ComplexReal a, const ComplexReal& b) { return a -= b; }
    friend ComplexReal operator-(const ComplexReal& a) { return {-a.re, -a.im}; }
    friend ComplexReal operator*(const ComplexReal& a, const ComplexReal& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend ComplexReal operator*(const Real& s, const ComplexReal& a) { return {s * a.re, s * a.im}; }
    friend ComplexReal operator/(const ComplexReal& a, const ComplexReal& b) {
        Real d = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
    }
    ComplexReal conj() const { return {re, -im}; }
    Real abs() const { return boost::multiprecision::sqrt(re * re + im * im); }
};

/// e^{-2 pi i e / n}, the sign convention used for every Fourier transform here.
inline ComplexReal root_of_unity(std::int64_t n, std::int64_t e) {
    const std::int64_t r = ((e % n) + n) % n;
    Real angle = -2 * pi_real() * Real(r) / Real(n);
    return {boost::multiprecision::cos(angle), boost::multiprecision::sin(angle)};
}

} // namespace scenerylab
