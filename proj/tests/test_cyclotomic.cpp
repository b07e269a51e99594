#include "scenerylab/cyclotomic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

using namespace scenerylab;

namespace {

CyclotomicNumber poly1(const CyclotomicContext& ctx, const std::vector<std::pair<std::int64_t, Rational>>& terms) {
    CyclotomicPolynomial p(ctx);
    for (const auto& [e, c] : terms) p.add_term(std::vector<std::int64_t>{e}, c);
    return reduce(p);
}

/// Direct evaluation of an unreduced polynomial with std::complex<double>; independent of reduce().
std::complex<double> eval_unreduced(const CyclotomicPolynomial& p) {
    std::complex<double> acc = 0;
    const auto& ctx = p.context();
    for (const auto& [key, c] : p.terms()) {
        std::complex<double> term = c.get_d();
        for (std::size_t j = 0; j < ctx.size(); ++j) {
            const double n = static_cast<double>(ctx.primes()[j]);
            term *= std::polar(1.0, -2.0 * M_PI * static_cast<double>(ctx.exponent(key, j)) / n);
        }
        acc += term;
    }
    return acc;
}

std::complex<double> to_cd(const ComplexReal& z) { return {z.re.convert_to<double>(), z.im.convert_to<double>()}; }

CyclotomicPolynomial random_poly(const CyclotomicContext& ctx, std::mt19937_64& rng, int terms) {
    CyclotomicPolynomial p(ctx);
    std::uniform_int_distribution<int> coef(-9, 9), den(1, 6);
    for (int i = 0; i < terms; ++i) {
        std::vector<std::int64_t> e;
        for (auto prime : ctx.primes()) e.push_back(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(prime)));
        p.add_term(e, Rational(coef(rng), den(rng)));
    }
    return p;
}

} // namespace

TEST(Cyclotomic, ContextValidation) {
    EXPECT_THROW(CyclotomicContext({7, 7}), DomainError);
    EXPECT_THROW(CyclotomicContext({9}), DomainError);
    EXPECT_THROW(CyclotomicContext(std::vector<std::int64_t>{}), DomainError);
    EXPECT_EQ(CyclotomicContext({5, 7}).degree(), 24u);
}

TEST(Cyclotomic, ReduceExamples) {
    CyclotomicContext c7({7});
    std::vector<std::pair<std::int64_t, Rational>> q7;
    for (int i = 0; i < 7; ++i) q7.emplace_back(i, 1);
    EXPECT_TRUE(is_zero(poly1(c7, q7)));
    EXPECT_EQ(poly1(c7, {{7, 1}}), CyclotomicNumber(c7, 1));

    // t1^4 t2 in context (5,7) -> -(1 + t1 + t1^2 + t1^3) t2.
    CyclotomicContext c57({5, 7});
    const auto lhs = CyclotomicNumber::monomial(c57, std::vector<std::int64_t>{4, 1});
    CyclotomicPolynomial rhs_poly(c57);
    for (std::int64_t e = 0; e < 4; ++e) rhs_poly.add_term(std::vector<std::int64_t>{e, 1}, -1);
    EXPECT_EQ(lhs, reduce(rhs_poly));
    EXPECT_EQ(lhs.coeffs().size(), 4u);
    const auto numeric = to_cd(numeric_eval(lhs));
    const auto direct = std::polar(1.0, -2.0 * M_PI * 4 / 5) * std::polar(1.0, -2.0 * M_PI / 7);
    EXPECT_LT(std::abs(numeric - direct), 1e-12);
}

TEST(Cyclotomic, FieldOperationExamples) {
    CyclotomicContext c7({7});
    const auto x = poly1(c7, {{1, Rational(3, 2)}, {3, -1}});
    EXPECT_EQ(x + CyclotomicNumber(c7), x);
    EXPECT_EQ(poly1(c7, {{1, 1}}) * poly1(c7, {{6, 1}}), CyclotomicNumber(c7, 1));

    // Quadratic Gauss periods: product of conjugates is (1 + 7) / 4 = 2.
    const auto eta0 = poly1(c7, {{1, 1}, {2, 1}, {4, 1}});
    const auto eta1 = poly1(c7, {{3, 1}, {5, 1}, {6, 1}});
    const auto prod = eta0 * eta1;
    EXPECT_EQ(prod, CyclotomicNumber(c7, 2));
    EXPECT_LT(std::abs(to_cd(numeric_eval(eta0)) * to_cd(numeric_eval(eta1)) - 2.0), 1e-12);
    EXPECT_THROW(eta0 + CyclotomicNumber(CyclotomicContext({11})), StructuralError);
}

TEST(Cyclotomic, IsZeroExamples) {
    CyclotomicContext c7({7});
    EXPECT_FALSE(is_zero(CyclotomicNumber(c7, 1)));
    // P(t) = sum_k (gamma(k x^{-1}) - gamma(k y^{-1})) t^k for the uniform {1,2,4} walk, x = 1, y = 2.
    auto gamma = [](std::int64_t k) { return (k == 1 || k == 2 || k == 4) ? Rational(1, 3) : Rational(0); };
    const std::int64_t xinv = 1, yinv = 4;  // 2^{-1} = 4 mod 7
    std::vector<std::pair<std::int64_t, Rational>> terms;
    for (std::int64_t k = 0; k < 7; ++k) terms.emplace_back(k, gamma(k * xinv % 7) - gamma(k * yinv % 7));
    EXPECT_TRUE(is_zero(poly1(c7, terms)));
}

TEST(Cyclotomic, NumericEvalExamples) {
    CyclotomicContext c7({7});
    std::vector<std::pair<std::int64_t, Rational>> q7;
    for (int i = 0; i < 7; ++i) q7.emplace_back(i, 1);
    // Unreduced Q_7 evaluated numerically is a tiny nonzero float; reduced it is exactly 0.
    EXPECT_LT(std::abs(to_cd(numeric_eval(poly1(c7, q7)))), 1e-12);
    const auto one = to_cd(numeric_eval(CyclotomicNumber(c7, 1)));
    EXPECT_EQ(one, std::complex<double>(1.0, 0.0));

    // Direct summation of w + w^2 + w^4 with w = exp(-2 pi i / 7).
    std::complex<double> direct = 0;
    for (int k : {1, 2, 4}) direct += std::polar(1.0, -2.0 * M_PI * k / 7);
    const auto gauss = to_cd(numeric_eval(poly1(c7, {{1, 1}, {2, 1}, {4, 1}})));
    EXPECT_LT(std::abs(gauss - direct), 1e-12);
    EXPECT_NEAR(gauss.real(), -0.5, 1e-12);
    EXPECT_NEAR(std::abs(gauss.imag()), std::sqrt(7.0) / 2, 1e-12);
    EXPECT_THROW(numeric_eval(CyclotomicNumber(c7, 1), 40), DomainError);
}

TEST(Cyclotomic, InverseAndPow) {
    CyclotomicContext c57({5, 7});
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        const auto x = reduce(random_poly(c57, rng, 5));
        if (x.is_zero()) continue;
        EXPECT_EQ(x * field_inverse(x), CyclotomicNumber(c57, 1));
    }
    CyclotomicContext c7({7});
    const auto w = poly1(c7, {{1, 1}});
    EXPECT_EQ(pow(w, 7), CyclotomicNumber(c7, 1));
    EXPECT_EQ(pow(w, 10), poly1(c7, {{3, 1}}));
}

TEST(Cyclotomic, JsonRoundTrip) {
    CyclotomicContext c57({5, 7});
    std::mt19937_64 rng(11);
    const auto x = reduce(random_poly(c57, rng, 6));
    EXPECT_EQ(cyclotomic_from_json(to_json(x)), x);
}

// =============================================================================
// Properties
// =============================================================================

TEST(CyclotomicProperties, ReducedEvalMatchesUnreduced) {
    std::mt19937_64 rng(2024);
    const std::vector<CyclotomicContext> contexts{CyclotomicContext({7}), CyclotomicContext({11}),
                                                  CyclotomicContext({5, 7}), CyclotomicContext({3, 7, 11})};
    for (int i = 0; i < 1000; ++i) {
        const auto& ctx = contexts[static_cast<std::size_t>(i) % contexts.size()];
        const auto p = random_poly(ctx, rng, 1 + static_cast<int>(rng() % 8));
        const auto reduced = reduce(p);
        EXPECT_LT(std::abs(to_cd(numeric_eval(reduced, 64)) - eval_unreduced(p)), 1e-9);
        // Idempotence: reducing the canonical form again changes nothing.
        CyclotomicPolynomial again(ctx);
        for (const auto& [k, c] : reduced.coeffs()) again.add_term(k, c);
        EXPECT_EQ(reduce(again), reduced);
        for (const auto& [k, c] : reduced.coeffs())
            for (std::size_t j = 0; j < ctx.size(); ++j) EXPECT_LE(ctx.exponent(k, j), ctx.primes()[j] - 2);
    }
}

TEST(CyclotomicProperties, ZeroTestAgreesWithHighPrecisionEval) {
    std::mt19937_64 rng(99);
    CyclotomicContext ctx({7});
    int equal_cases = 0;
    for (int i = 0; i < 300; ++i) {
        const auto x = reduce(random_poly(ctx, rng, 3));
        // Half the time build y as x plus a multiple of Q_7, which is the same field element.
        CyclotomicPolynomial yp = random_poly(ctx, rng, 3);
        if (i % 2 == 0) {
            yp = CyclotomicPolynomial(ctx);
            for (const auto& [k, c] : x.coeffs()) yp.add_term(k, c);
            const Rational m(static_cast<long>(rng() % 5) + 1);
            for (std::int64_t e = 0; e < 7; ++e) yp.add_term(std::vector<std::int64_t>{e}, m);
        }
        const auto y = reduce(yp);
        const bool exact_equal = is_zero(x - y);
        ScopedPrecision guard(256);
        const ComplexReal d = numeric_eval(x, 256) - numeric_eval(y, 256);
        const bool numeric_equal = d.abs() < Real("1e-60");
        EXPECT_EQ(exact_equal, numeric_equal);
        equal_cases += exact_equal;
    }
    EXPECT_GE(equal_cases, 150);
}

TEST(CyclotomicProperties, Multiplicative) {
    std::mt19937_64 rng(5);
    CyclotomicContext ctx({5, 7});
    for (int i = 0; i < 200; ++i) {
        const auto x = reduce(random_poly(ctx, rng, 4));
        const auto y = reduce(random_poly(ctx, rng, 4));
        const auto lhs = to_cd(numeric_eval(x * y, 128));
        const auto rhs = to_cd(numeric_eval(x, 128)) * to_cd(numeric_eval(y, 128));
        EXPECT_LT(std::abs(lhs - rhs), 1e-9);
    }
}
