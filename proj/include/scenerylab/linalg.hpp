#pragma once

/**
 * @file linalg.hpp
 * @brief Exact Gaussian elimination over an arbitrary field type.
 *
 * The field type T must support + - * and unary -, and provide two free
 * functions found by overload resolution:
 *
 *     bool field_is_zero(const T&);
 *     T    field_inverse(const T&);
 *
 * Overloads for Rational live here; CyclotomicNumber provides its own.
 * There is no pivoting strategy beyond "first nonzero", which is exact for
 * exact fields and is all the callers need.
 */

#include "scenerylab/errors.hpp"
#include "scenerylab/number.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace scenerylab {

inline bool field_is_zero(const Rational& x) { return sgn(x) == 0; }
inline Rational field_inverse(const Rational& x) {
    if (sgn(x) == 0) throw DomainError("division by zero rational");
    return Rational(1) / x;
}

template <class T>
using Matrix = std::vector<std::vector<T>>;

/// Solves A x = b. A must be square; throws SingularSystemError otherwise.
template <class T>
std::vector<T> solve(Matrix<T> a, std::vector<T> b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw StructuralError("solve: dimension mismatch");
    for (const auto& row : a)
        if (row.size() != n) throw StructuralError("solve: matrix is not square");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && field_is_zero(a[pivot][col])) ++pivot;
        if (pivot == n) throw SingularSystemError("singular system: no pivot in column " + std::to_string(col));
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            std::swap(b[pivot], b[col]);
        }
        const T inv = field_inverse(a[col][col]);
        for (std::size_t j = col; j < n; ++j) a[col][j] = a[col][j] * inv;
        b[col] = b[col] * inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || field_is_zero(a[r][col])) continue;
            const T factor = a[r][col];
            for (std::size_t j = col; j < n; ++j) a[r][j] = a[r][j] - factor * a[col][j];
            b[r] = b[r] - factor * b[col];
        }
    }
    return b;
}

/// Inverse of a square matrix; `one` and `zero` fix the field context.
template <class T>
Matrix<T> invert(Matrix<T> a, const T& zero, const T& one) {
    const std::size_t n = a.size();
    Matrix<T> inv(n, std::vector<T>(n, zero));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = one;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && field_is_zero(a[pivot][col])) ++pivot;
        if (pivot == n) throw SingularSystemError("singular matrix: no pivot in column " + std::to_string(col));
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            std::swap(inv[pivot], inv[col]);
        }
        const T p = field_inverse(a[col][col]);
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] = a[col][j] * p;
            inv[col][j] = inv[col][j] * p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || field_is_zero(a[r][col])) continue;
            const T factor = a[r][col];
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] = a[r][j] - factor * a[col][j];
                inv[r][j] = inv[r][j] - factor * inv[col][j];
            }
        }
    }
    return inv;
}

template <class T>
std::vector<T> mat_vec(const Matrix<T>& a, const std::vector<T>& x, const T& zero) {
    std::vector<T> y(a.size(), zero);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j)
            if (!field_is_zero(a[i][j]) && !field_is_zero(x[j])) y[i] = y[i] + a[i][j] * x[j];
    return y;
}

template <class T>
Matrix<T> mat_mul(const Matrix<T>& a, const Matrix<T>& b, const T& zero) {
    const std::size_t n = a.size(), k = b.size(), m = k ? b[0].size() : 0;
    Matrix<T> c(n, std::vector<T>(m, zero));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            if (field_is_zero(a[i][l])) continue;
            for (std::size_t j = 0; j < m; ++j) c[i][j] = c[i][j] + a[i][l] * b[l][j];
        }
    return c;
}

/**
 * Row-echelon basis that grows one vector at a time.
 *
 * Each stored row has a leading 1 at its pivot column and zeros in every
 * other stored pivot column, so reducing a candidate is one pass.
 */
template <class T>
class IncrementalBasis {
public:
    explicit IncrementalBasis(std::size_t dim) : dim_(dim) {}

    /// Reduces v against the basis; returns the residual.
    std::vector<T> reduce(std::vector<T> v) const {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const std::size_t p = pivots_[i];
            if (field_is_zero(v[p])) continue;
            const T factor = v[p];
            for (std::size_t j = 0; j < dim_; ++j)
                if (!field_is_zero(rows_[i][j])) v[j] = v[j] - factor * rows_[i][j];
        }
        return v;
    }

    /// Adds v if it is independent of the span; returns whether it was added.
    bool insert(std::vector<T> v) {
        if (v.size() != dim_) throw StructuralError("basis: dimension mismatch");
        v = reduce(std::move(v));
        std::optional<std::size_t> pivot;
        for (std::size_t j = 0; j < dim_; ++j)
            if (!field_is_zero(v[j])) {
                pivot = j;
                break;
            }
        if (!pivot) return false;
        const T inv = field_inverse(v[*pivot]);
        for (auto& x : v)
            if (!field_is_zero(x)) x = x * inv;
        for (auto& row : rows_) {
            if (field_is_zero(row[*pivot])) continue;
            const T factor = row[*pivot];
            for (std::size_t j = 0; j < dim_; ++j)
                if (!field_is_zero(v[j])) row[j] = row[j] - factor * v[j];
        }
        rows_.push_back(std::move(v));
        pivots_.push_back(*pivot);
        return true;
    }

    std::size_t size() const noexcept { return rows_.size(); }
    std::size_t dim() const noexcept { return dim_; }

private:
    std::size_t dim_;
    Matrix<T> rows_;
    std::vector<std::size_t> pivots_;
};

/// Rank of a (not necessarily square) matrix.
template <class T>
std::size_t matrix_rank(const Matrix<T>& a) {
    if (a.empty()) return 0;
    IncrementalBasis<T> basis(a[0].size());
    for (const auto& row : a) basis.insert(row);
    return basis.size();
}

} // namespace scenerylab
