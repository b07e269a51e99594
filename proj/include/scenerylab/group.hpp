#pragma once

/**
 * @file group.hpp
 * @brief Finite abelian groups presented as products of cycles.
 *
 * A GroupSpec is Z_{n_1}^{d_1} x ... x Z_{n_m}^{d_m}. Elements are stored as
 * a flat coordinate vector (factor 1's d_1 coordinates first, then factor 2's,
 * ...). Enumeration is lexicographic with the first coordinate most
 * significant, and the position of an element in that order is its rank.
 * Hot loops throughout the library work on ranks; GroupElement is the
 * checked value type used at API boundaries.
 */

#include "scenerylab/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scenerylab {

using Rank = std::uint64_t;

inline constexpr std::uint64_t kMaxGroupOrder = std::uint64_t{1} << 40;
inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

// ---------------------------------------------------------------------------
// Number theory helpers
// ---------------------------------------------------------------------------

/// Reduce x into [0, n).
constexpr std::int64_t mod_floor(std::int64_t x, std::int64_t n) {
    std::int64_t r = x % n;
    return r < 0 ? r + n : r;
}

namespace detail {

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1U) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1U;
    }
    return result;
}

} // namespace detail

/// Deterministic Miller-Rabin, exact for every 64-bit input.
inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    constexpr std::uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (std::uint64_t p : small) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1U) == 0) {
        d >>= 1U;
        ++s;
    }
    for (std::uint64_t a : small) {
        std::uint64_t x = detail::pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = detail::mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

/// Inverse of x in the field Z_p.
inline std::int64_t inverse_mod(std::int64_t x, std::int64_t p) {
    if (p < 2 || !is_prime(static_cast<std::uint64_t>(p)))
        throw DomainError("inverse_mod: modulus " + std::to_string(p) + " is not prime");
    const std::int64_t r = mod_floor(x, p);
    if (r == 0) throw DomainError("inverse_mod: " + std::to_string(x) + " is zero mod " + std::to_string(p));
    return static_cast<std::int64_t>(detail::pow_mod(static_cast<std::uint64_t>(r),
                                                     static_cast<std::uint64_t>(p - 2),
                                                     static_cast<std::uint64_t>(p)));
}

/// Smallest prime strictly greater than n.
inline std::int64_t next_prime(std::int64_t n) {
    std::int64_t c = std::max<std::int64_t>(n + 1, 2);
    while (!is_prime(static_cast<std::uint64_t>(c))) ++c;
    return c;
}

// ---------------------------------------------------------------------------
// GroupSpec
// ---------------------------------------------------------------------------

struct CycleFactor {
    std::int64_t modulus;
    int dim;

    friend bool operator==(const CycleFactor&, const CycleFactor&) = default;
};

class GroupSpec {
public:
    /// Canonicalizes: factors sorted by modulus, equal moduli merged.
    explicit GroupSpec(std::vector<CycleFactor> factors) {
        if (factors.empty()) throw DomainError("group must have at least one factor");
        for (const auto& f : factors) {
            if (f.modulus < 2) throw DomainError("cycle modulus must be >= 2, got " + std::to_string(f.modulus));
            if (f.dim < 1) throw DomainError("cycle dimension must be >= 1");
        }
        std::sort(factors.begin(), factors.end(),
                  [](const CycleFactor& a, const CycleFactor& b) { return a.modulus < b.modulus; });
        auto data = std::make_shared<Data>();
        for (const auto& f : factors) {
            if (!data->factors.empty() && data->factors.back().modulus == f.modulus)
                data->factors.back().dim += f.dim;
            else
                data->factors.push_back(f);
        }
        unsigned __int128 order = 1;
        for (std::size_t i = 0; i < data->factors.size(); ++i) {
            const auto& f = data->factors[i];
            for (int j = 0; j < f.dim; ++j) {
                order *= static_cast<unsigned __int128>(f.modulus);
                if (order > kMaxGroupOrder)
                    throw CapacityError("group order exceeds 2^40");
                data->coord_moduli.push_back(f.modulus);
                data->coord_factor.push_back(static_cast<int>(i));
            }
        }
        data->order = static_cast<std::uint64_t>(order);
        data->strides.assign(data->coord_moduli.size(), 1);
        for (std::size_t c = data->coord_moduli.size(); c-- > 1;)
            data->strides[c - 1] = data->strides[c] * static_cast<std::uint64_t>(data->coord_moduli[c]);
        std::size_t offset = 0;
        for (const auto& f : data->factors) {
            data->factor_offset.push_back(offset);
            offset += static_cast<std::size_t>(f.dim);
        }
        data_ = std::move(data);
    }

    /// Cyclic group Z_n.
    static GroupSpec cycle(std::int64_t n) { return GroupSpec({{n, 1}}); }

    /// Parses "Z7", "z7^3", "Z5^2xZ7", "Z12" ('x' separates factors).
    static GroupSpec parse(std::string_view text) {
        std::string s;
        for (char ch : text)
            if (!std::isspace(static_cast<unsigned char>(ch)))
                s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        if (s.empty()) throw ParseError("empty group string");
        std::vector<CycleFactor> factors;
        std::size_t pos = 0;
        auto read_int = [&](const char* what) -> std::int64_t {
            std::size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (start == pos) throw ParseError(std::string("expected ") + what + " in group string '" + std::string(text) + "'");
            if (pos - start > 12) throw ParseError("number too large in group string");
            return std::stoll(s.substr(start, pos - start));
        };
        while (true) {
            if (pos >= s.size() || s[pos] != 'z')
                throw ParseError("expected 'Z' in group string '" + std::string(text) + "'");
            ++pos;
            const std::int64_t n = read_int("modulus");
            std::int64_t d = 1;
            if (pos < s.size() && s[pos] == '^') {
                ++pos;
                d = read_int("dimension");
            }
            if (d < 1 || d > 64) throw ParseError("dimension out of range in group string");
            factors.push_back({n, static_cast<int>(d)});
            if (pos == s.size()) break;
            if (s[pos] != 'x') throw ParseError("expected 'x' between factors in group string '" + std::string(text) + "'");
            ++pos;
        }
        return GroupSpec(std::move(factors));
    }

    std::uint64_t order() const noexcept { return data_->order; }
    std::span<const CycleFactor> factors() const noexcept { return data_->factors; }
    std::size_t num_factors() const noexcept { return data_->factors.size(); }
    std::size_t num_coords() const noexcept { return data_->coord_moduli.size(); }
    std::span<const std::int64_t> coord_moduli() const noexcept { return data_->coord_moduli; }
    std::int64_t coord_modulus(std::size_t c) const { return data_->coord_moduli.at(c); }
    int coord_factor(std::size_t c) const { return data_->coord_factor.at(c); }
    std::size_t factor_offset(std::size_t i) const { return data_->factor_offset.at(i); }

    /// A single cycle Z_n.
    bool is_cycle() const noexcept { return data_->factors.size() == 1 && data_->factors[0].dim == 1; }

    /// Every factor modulus prime.
    bool all_prime() const {
        return std::all_of(data_->factors.begin(), data_->factors.end(),
                           [](const CycleFactor& f) { return is_prime(static_cast<std::uint64_t>(f.modulus)); });
    }

    std::string to_string() const {
        std::string out;
        for (const auto& f : data_->factors) {
            if (!out.empty()) out += "x";
            out += "Z" + std::to_string(f.modulus);
            if (f.dim > 1) out += "^" + std::to_string(f.dim);
        }
        return out;
    }

    // Rank arithmetic. Ranks are positions in lexicographic enumeration.

    Rank rank(std::span<const std::int64_t> coords) const {
        if (coords.size() != num_coords()) throw StructuralError("coordinate count does not match group " + to_string());
        Rank r = 0;
        for (std::size_t c = 0; c < coords.size(); ++c)
            r += static_cast<Rank>(mod_floor(coords[c], data_->coord_moduli[c])) * data_->strides[c];
        return r;
    }

    std::vector<std::int64_t> unrank(Rank r) const {
        std::vector<std::int64_t> coords(num_coords());
        unrank_into(r, coords);
        return coords;
    }

    void unrank_into(Rank r, std::span<std::int64_t> out) const {
        for (std::size_t c = 0; c < out.size(); ++c) {
            out[c] = static_cast<std::int64_t>(r / data_->strides[c]);
            r %= data_->strides[c];
        }
    }

    /// Single coordinate of the element with rank r.
    std::int64_t coord_of(Rank r, std::size_t c) const {
        return static_cast<std::int64_t>((r / data_->strides[c]) % static_cast<Rank>(data_->coord_moduli[c]));
    }

    Rank add_ranks(Rank a, Rank b) const {
        if (is_cycle()) return (a + b) % data_->order;
        Rank r = 0;
        for (std::size_t c = 0; c < num_coords(); ++c) {
            const auto m = static_cast<Rank>(data_->coord_moduli[c]);
            const Rank s = data_->strides[c];
            r += ((a / s) % m + (b / s) % m) % m * s;
        }
        return r;
    }

    Rank neg_rank(Rank a) const {
        if (is_cycle()) return (data_->order - a) % data_->order;
        Rank r = 0;
        for (std::size_t c = 0; c < num_coords(); ++c) {
            const auto m = static_cast<Rank>(data_->coord_moduli[c]);
            const Rank s = data_->strides[c];
            r += (m - (a / s) % m) % m * s;
        }
        return r;
    }

    Rank sub_ranks(Rank a, Rank b) const { return add_ranks(a, neg_rank(b)); }

    Rank scale_rank(std::int64_t v, Rank a) const {
        Rank r = 0;
        for (std::size_t c = 0; c < num_coords(); ++c) {
            const auto m = data_->coord_moduli[c];
            const Rank s = data_->strides[c];
            const auto x = static_cast<std::int64_t>((a / s) % static_cast<Rank>(m));
            r += static_cast<Rank>(mod_floor(static_cast<std::int64_t>(
                                       (static_cast<__int128>(mod_floor(v, m)) * x) % m),
                                   m)) *
                 s;
        }
        return r;
    }

    /// Dot product restricted to factor i: sum_j a_{i,j} b_{i,j} mod n_i.
    std::int64_t dot_ranks(Rank a, Rank b, std::size_t factor_index) const {
        if (factor_index >= num_factors()) throw DomainError("factor index out of range");
        const auto& f = data_->factors[factor_index];
        const std::size_t off = data_->factor_offset[factor_index];
        __int128 acc = 0;
        for (int j = 0; j < f.dim; ++j)
            acc += static_cast<__int128>(coord_of(a, off + j)) * coord_of(b, off + j);
        return static_cast<std::int64_t>(acc % f.modulus);
    }

    /// Throws CapacityError when the group is too large to enumerate.
    void require_enumerable(std::uint64_t cap = kDefaultEnumerationCap) const {
        if (order() > cap)
            throw CapacityError("group " + to_string() + " has order " + std::to_string(order()) +
                                " above enumeration cap " + std::to_string(cap));
    }

    friend bool operator==(const GroupSpec& a, const GroupSpec& b) {
        return a.data_ == b.data_ || a.data_->factors == b.data_->factors;
    }

private:
    struct Data {
        std::vector<CycleFactor> factors;
        std::vector<std::int64_t> coord_moduli;
        std::vector<int> coord_factor;
        std::vector<std::size_t> factor_offset;
        std::vector<Rank> strides;
        std::uint64_t order = 1;
    };
    std::shared_ptr<const Data> data_;
};

// ---------------------------------------------------------------------------
// GroupElement
// ---------------------------------------------------------------------------

class GroupElement {
public:
    GroupElement(GroupSpec group, std::vector<std::int64_t> coords)
        : group_(std::move(group)), coords_(std::move(coords)) {
        if (coords_.size() != group_.num_coords())
            throw StructuralError("element has " + std::to_string(coords_.size()) + " coordinates, group " +
                                  group_.to_string() + " needs " + std::to_string(group_.num_coords()));
        for (std::size_t c = 0; c < coords_.size(); ++c) coords_[c] = mod_floor(coords_[c], group_.coord_modulus(c));
    }

    static GroupElement zero(const GroupSpec& g) { return {g, std::vector<std::int64_t>(g.num_coords(), 0)}; }
    static GroupElement from_rank(const GroupSpec& g, Rank r) { return {g, g.unrank(r)}; }

    /// Parses "3", "-1", "(1,4)" or "1,4" against the group's coordinate layout.
    static GroupElement parse(const GroupSpec& g, std::string_view text) {
        std::vector<std::int64_t> coords;
        std::string cur;
        auto flush = [&] {
            if (cur.empty()) throw ParseError("empty coordinate in element '" + std::string(text) + "'");
            try {
                std::size_t used = 0;
                coords.push_back(std::stoll(cur, &used));
                if (used != cur.size()) throw ParseError("bad coordinate '" + cur + "'");
            } catch (const std::logic_error&) {
                throw ParseError("bad coordinate '" + cur + "' in element '" + std::string(text) + "'");
            }
            cur.clear();
        };
        for (char ch : text) {
            if (std::isspace(static_cast<unsigned char>(ch)) || ch == '(' || ch == ')') continue;
            if (ch == ',') flush();
            else cur.push_back(ch);
        }
        flush();
        if (coords.size() != g.num_coords())
            throw ParseError("element '" + std::string(text) + "' has " + std::to_string(coords.size()) +
                             " coordinates; group " + g.to_string() + " needs " + std::to_string(g.num_coords()));
        return {g, std::move(coords)};
    }

    const GroupSpec& group() const noexcept { return group_; }
    std::span<const std::int64_t> coords() const noexcept { return coords_; }
    std::int64_t operator[](std::size_t c) const { return coords_.at(c); }
    Rank rank() const { return group_.rank(coords_); }
    bool is_zero() const {
        return std::all_of(coords_.begin(), coords_.end(), [](std::int64_t c) { return c == 0; });
    }

    /// Coordinates of factor i as a sub-span.
    std::span<const std::int64_t> factor_coords(std::size_t i) const {
        return std::span<const std::int64_t>(coords_).subspan(group_.factor_offset(i),
                                                              static_cast<std::size_t>(group_.factors()[i].dim));
    }

    std::string to_string() const {
        if (coords_.size() == 1) return std::to_string(coords_[0]);
        std::string s = "(";
        for (std::size_t c = 0; c < coords_.size(); ++c) {
            if (c) s += ",";
            s += std::to_string(coords_[c]);
        }
        return s + ")";
    }

    friend bool operator==(const GroupElement& a, const GroupElement& b) {
        return a.group_ == b.group_ && a.coords_ == b.coords_;
    }
    friend bool operator<(const GroupElement& a, const GroupElement& b) { return a.coords_ < b.coords_; }

private:
    GroupSpec group_;
    std::vector<std::int64_t> coords_;
};

inline void require_same_group(const GroupElement& a, const GroupElement& b) {
    if (!(a.group() == b.group()))
        throw StructuralError("elements belong to different groups: " + a.group().to_string() + " vs " +
                              b.group().to_string());
}

inline GroupElement add(const GroupElement& a, const GroupElement& b) {
    require_same_group(a, b);
    std::vector<std::int64_t> c(a.coords().begin(), a.coords().end());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
    return {a.group(), std::move(c)};
}

inline GroupElement negate(const GroupElement& a) {
    std::vector<std::int64_t> c(a.coords().begin(), a.coords().end());
    for (auto& x : c) x = -x;
    return {a.group(), std::move(c)};
}

inline GroupElement subtract(const GroupElement& a, const GroupElement& b) { return add(a, negate(b)); }

inline GroupElement scalar_mul(std::int64_t v, const GroupElement& a) {
    std::vector<std::int64_t> c(a.coords().size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const std::int64_t m = a.group().coord_modulus(i);
        c[i] = static_cast<std::int64_t>((static_cast<__int128>(mod_floor(v, m)) * a[i]) % m);
    }
    return {a.group(), std::move(c)};
}

inline std::int64_t dot(const GroupElement& a, const GroupElement& b, std::size_t factor_index) {
    require_same_group(a, b);
    if (factor_index >= a.group().num_factors())
        throw DomainError("factor index " + std::to_string(factor_index) + " out of range for " +
                          a.group().to_string());
    const std::int64_t n = a.group().factors()[factor_index].modulus;
    auto xa = a.factor_coords(factor_index);
    auto xb = b.factor_coords(factor_index);
    __int128 acc = 0;
    for (std::size_t j = 0; j < xa.size(); ++j) acc += static_cast<__int128>(xa[j]) * xb[j];
    return static_cast<std::int64_t>(acc % n);
}

/// All elements in lexicographic order.
inline std::vector<GroupElement> enumerate(const GroupSpec& g, std::uint64_t cap = kDefaultEnumerationCap) {
    g.require_enumerable(cap);
    std::vector<GroupElement> out;
    out.reserve(static_cast<std::size_t>(g.order()));
    for (Rank r = 0; r < g.order(); ++r) out.push_back(GroupElement::from_rank(g, r));
    return out;
}

} // namespace scenerylab
