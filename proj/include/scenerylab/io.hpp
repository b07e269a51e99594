#pragma once

/**
 * @file io.hpp
 * @brief Walk files (TOML subset), scenery files (JSON), and JSON/CSV
 * renderings of verdicts, pairs, classes, statistics and traces.
 *
 * Walk file keys:
 *   group = "Z7"                        group string
 *   multiset = [1, 2, 4]                uniform over the listed steps (integers on
 *                                       cycles, element strings "(1,0)" otherwise)
 *   [probs]  "1" = "1/2"                explicit law; values "p/q" (exact) or
 *                                       decimals when mode = "float"
 *   mode = "float"                      optional; precision_bits, tolerance
 *   preset = "delta-z7"                 built-in walks
 * A multiset without a group is an integer multiset on Z (bounded-n).
 */

#include "scenerylab/errors.hpp"
#include "scenerylab/group.hpp"
#include "scenerylab/number.hpp"
#include "scenerylab/oracle.hpp"
#include "scenerylab/scenery.hpp"
#include "scenerylab/sim.hpp"
#include "scenerylab/spectral.hpp"
#include "scenerylab/walk.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace scenerylab {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// TOML subset
// ---------------------------------------------------------------------------

struct TomlValue;
using TomlArray = std::vector<TomlValue>;

struct TomlValue {
    std::variant<std::string, std::int64_t, double, bool, TomlArray> v;
    int line = 0;

    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
    bool is_array() const { return std::holds_alternative<TomlArray>(v); }

    const std::string& as_string() const {
        if (!is_string()) throw ParseError("line " + std::to_string(line) + ": expected a string");
        return std::get<std::string>(v);
    }
    std::int64_t as_int() const {
        if (!is_int()) throw ParseError("line " + std::to_string(line) + ": expected an integer");
        return std::get<std::int64_t>(v);
    }
    bool as_bool() const {
        if (!std::holds_alternative<bool>(v)) throw ParseError("line " + std::to_string(line) + ": expected true/false");
        return std::get<bool>(v);
    }
    const TomlArray& as_array() const {
        if (!is_array()) throw ParseError("line " + std::to_string(line) + ": expected an array");
        return std::get<TomlArray>(v);
    }
    /// Integer or string rendering, for keys that accept either.
    std::string scalar_text() const {
        if (is_string()) return as_string();
        if (is_int()) return std::to_string(as_int());
        if (std::holds_alternative<double>(v)) {
            std::ostringstream os;
            os.precision(17);
            os << std::get<double>(v);
            return os.str();
        }
        throw ParseError("line " + std::to_string(line) + ": expected a scalar");
    }
};

/// Flat document: "table.key" -> value; top-level keys have no prefix.
using TomlDocument = std::map<std::string, TomlValue>;

namespace detail {

class TomlParser {
public:
    explicit TomlParser(std::string text) : s_(std::move(text)) {}

    TomlDocument parse() {
        TomlDocument doc;
        std::string table;
        while (true) {
            skip_ws_comments(true);
            if (at_end()) break;
            if (peek() == '[') {
                ++pos_;
                skip_inline_ws();
                table = parse_key();
                skip_inline_ws();
                expect(']');
                end_of_line();
                continue;
            }
            const int key_line = line_;
            std::string key = parse_key();
            skip_inline_ws();
            expect('=');
            skip_inline_ws();
            TomlValue val = parse_value();
            val.line = key_line;
            const std::string full = table.empty() ? key : table + "." + key;
            if (doc.count(full)) fail("duplicate key '" + full + "'");
            doc.emplace(full, std::move(val));
            end_of_line();
        }
        return doc;
    }

private:
    std::string s_;
    std::size_t pos_ = 0;
    int line_ = 1;

    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return at_end() ? '\0' : s_[pos_]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("line " + std::to_string(line_) + ": " + msg);
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_inline_ws() {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
    }

    void skip_ws_comments(bool newlines) {
        while (!at_end()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r') ++pos_;
            else if (c == '#') {
                while (!at_end() && peek() != '\n') ++pos_;
            } else if (c == '\n' && newlines) {
                ++pos_;
                ++line_;
            } else break;
        }
    }

    void end_of_line() {
        skip_ws_comments(false);
        if (at_end()) return;
        if (peek() != '\n') fail("unexpected text after value");
        ++pos_;
        ++line_;
    }

    std::string parse_key() {
        if (peek() == '"') return parse_string();
        std::string k;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-' || peek() == '.'))
            k += s_[pos_++];
        if (k.empty()) fail("expected a key");
        return k;
    }

    std::string parse_string() {
        expect('"');
        std::string out;
        while (true) {
            if (at_end() || peek() == '\n') fail("unterminated string");
            const char c = s_[pos_++];
            if (c == '"') break;
            if (c == '\\') {
                if (at_end()) fail("unterminated escape");
                const char e = s_[pos_++];
                switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail(std::string("unsupported escape \\") + e);
                }
            } else out += c;
        }
        return out;
    }

    TomlValue parse_value() {
        TomlValue v;
        v.line = line_;
        const char c = peek();
        if (c == '"') {
            v.v = parse_string();
        } else if (c == '[') {
            ++pos_;
            TomlArray arr;
            while (true) {
                skip_ws_comments(true);
                if (peek() == ']') {
                    ++pos_;
                    break;
                }
                arr.push_back(parse_value());
                skip_ws_comments(true);
                if (peek() == ',') ++pos_;
                else if (peek() != ']') fail("expected ',' or ']' in array");
            }
            v.v = std::move(arr);
        } else if (s_.compare(pos_, 4, "true") == 0) {
            pos_ += 4;
            v.v = true;
        } else if (s_.compare(pos_, 5, "false") == 0) {
            pos_ += 5;
            v.v = false;
        } else {
            std::string tok;
            while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                                 peek() == '.' || peek() == '_'))
                tok += s_[pos_++];
            if (tok.empty()) fail("expected a value");
            tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
            try {
                std::size_t used = 0;
                if (tok.find_first_of(".eE") == std::string::npos) {
                    v.v = static_cast<std::int64_t>(std::stoll(tok, &used));
                } else {
                    v.v = std::stod(tok, &used);
                }
                if (used != tok.size()) fail("bad number '" + tok + "'");
            } catch (const std::logic_error&) {
                fail("bad value '" + tok + "'");
            }
        }
        return v;
    }
};

} // namespace detail

inline TomlDocument parse_toml(const std::string& text) { return detail::TomlParser(text).parse(); }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
}

// ---------------------------------------------------------------------------
// Walk files
// ---------------------------------------------------------------------------

struct WalkFile {
    std::optional<GroupSpec> group;
    std::optional<StepDistribution> walk;
    std::optional<StepMultiset> multiset;          ///< when given as a multiset on a group
    std::optional<IntegerMultiset> integer_steps;  ///< multiset without a group
};

inline Rational parse_rational(const std::string& text, int line) {
    auto fail = [&] { return ParseError("line " + std::to_string(line) + ": '" + text + "' is not a rational p/q"); };
    if (text.empty()) throw fail();
    try {
        Rational r(text);
        r.canonicalize();
        if (r.get_den() == 0) throw fail();
        return r;
    } catch (const std::invalid_argument&) {
        throw fail();
    }
}

/// `group_override` supplies or cross-checks the group ("--group").
inline WalkFile parse_walk(const std::string& text, const std::optional<GroupSpec>& group_override = std::nullopt,
                           unsigned default_bits = kDefaultPrecisionBits) {
    const auto doc = parse_toml(text);
    static const std::vector<std::string> known_top{"group", "multiset", "mode", "precision_bits", "tolerance", "preset"};
    for (const auto& [k, v] : doc) {
        if (k.rfind("probs.", 0) == 0) continue;
        if (std::find(known_top.begin(), known_top.end(), k) == known_top.end())
            throw ParseError("line " + std::to_string(v.line) + ": unknown key '" + k + "'");
    }
    WalkFile out;
    if (auto it = doc.find("group"); it != doc.end()) {
        try {
            out.group = GroupSpec::parse(it->second.as_string());
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(it->second.line) + ": " + e.what());
        }
    }
    if (group_override) {
        if (out.group && !(*out.group == *group_override))
            throw StructuralError("--group " + group_override->to_string() + " contradicts the walk file's group " +
                                  out.group->to_string());
        out.group = group_override;
    }

    if (auto it = doc.find("preset"); it != doc.end()) {
        const auto& name = it->second.as_string();
        if (name != "delta-z7") throw ParseError("line " + std::to_string(it->second.line) + ": unknown preset '" + name + "'");
        if (out.group && !(*out.group == GroupSpec::cycle(7)))
            throw StructuralError("preset delta-z7 lives on Z7, not " + out.group->to_string());
        unsigned bits = default_bits;
        if (auto pb = doc.find("precision_bits"); pb != doc.end()) bits = static_cast<unsigned>(pb->second.as_int());
        out.group = GroupSpec::cycle(7);
        out.walk = delta_walk_z7(bits);
        return out;
    }

    const bool has_probs = std::any_of(doc.begin(), doc.end(), [](const auto& kv) { return kv.first.rfind("probs.", 0) == 0; });
    const auto ms = doc.find("multiset");
    if (has_probs == (ms != doc.end())) throw ParseError("walk file needs exactly one of 'multiset' or a [probs] table");

    bool floating = false;
    if (auto m = doc.find("mode"); m != doc.end()) {
        const auto& mode = m->second.as_string();
        if (mode == "float") floating = true;
        else if (mode != "exact") throw ParseError("line " + std::to_string(m->second.line) + ": mode must be \"exact\" or \"float\"");
    }

    auto element = [&](const TomlValue& v) -> Rank {
        try {
            if (v.is_int()) {
                if (!out.group->is_cycle()) throw ParseError("integer steps need a cyclic group");
                return static_cast<Rank>(mod_floor(v.as_int(), static_cast<std::int64_t>(out.group->order())));
            }
            return GroupElement::parse(*out.group, v.as_string()).rank();
        } catch (const Error& e) {
            throw ParseError("line " + std::to_string(v.line) + ": " + e.what());
        }
    };

    if (ms != doc.end()) {
        const auto& arr = ms->second.as_array();
        if (arr.empty()) throw ParseError("line " + std::to_string(ms->second.line) + ": multiset is empty");
        if (!out.group) {
            IntegerMultiset steps;
            for (const auto& v : arr) steps.push_back(v.as_int());
            out.integer_steps = std::move(steps);
            return out;
        }
        StepMultiset m{*out.group, {}};
        for (const auto& v : arr) m.elements.push_back(element(v));
        out.walk = m.distribution();
        out.multiset = std::move(m);
        if (floating) out.walk = out.walk->to_floating(default_bits, default_tolerance());
        return out;
    }

    if (!out.group) throw ParseError("a [probs] table needs a group");
    if (!floating) {
        std::map<Rank, Rational> probs;
        for (const auto& [k, v] : doc) {
            if (k.rfind("probs.", 0) != 0) continue;
            TomlValue key{k.substr(6), v.line};
            probs[element(key)] += parse_rational(v.scalar_text(), v.line);
        }
        try {
            out.walk = StepDistribution::exact(*out.group, probs);
        } catch (const DomainError& e) {
            throw ParseError(std::string("[probs]: ") + e.what());
        }
        return out;
    }
    unsigned bits = default_bits;
    if (auto pb = doc.find("precision_bits"); pb != doc.end()) bits = static_cast<unsigned>(pb->second.as_int());
    ScopedPrecision guard(bits);
    Real tol = default_tolerance();
    if (auto t = doc.find("tolerance"); t != doc.end()) tol = Real(t->second.scalar_text());
    std::map<Rank, Real> probs;
    for (const auto& [k, v] : doc) {
        if (k.rfind("probs.", 0) != 0) continue;
        TomlValue key{k.substr(6), v.line};
        const auto txt = v.scalar_text();
        const auto slash = txt.find('/');
        try {
            probs[element(key)] += slash == std::string::npos ? Real(txt) : Real(txt.substr(0, slash)) / Real(txt.substr(slash + 1));
        } catch (const std::runtime_error&) {
            throw ParseError("line " + std::to_string(v.line) + ": '" + txt + "' is not a number");
        }
    }
    try {
        out.walk = StepDistribution::floating(*out.group, probs, tol, bits);
    } catch (const DomainError& e) {
        throw ParseError(std::string("[probs]: ") + e.what());
    }
    return out;
}

inline WalkFile load_walk(const std::string& path, const std::optional<GroupSpec>& group_override = std::nullopt,
                          unsigned default_bits = kDefaultPrecisionBits) {
    try {
        return parse_walk(read_file(path), group_override, default_bits);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Scenery files
// ---------------------------------------------------------------------------

/// {"group": "Z7", "bits": [0,1,...]} or {"group": "Z7", "ones": [0, "(1,2)", ...]}
inline Scenery scenery_from_json(const json& j, const std::optional<GroupSpec>& expected = std::nullopt) {
    if (!j.is_object()) throw ParseError("scenery must be a JSON object");
    std::optional<GroupSpec> g;
    if (j.contains("group")) g = GroupSpec::parse(j.at("group").get<std::string>());
    if (expected) {
        if (g && !(*g == *expected))
            throw StructuralError("scenery group " + g->to_string() + " does not match walk group " + expected->to_string());
        g = expected;
    }
    if (!g) throw ParseError("scenery needs a group");
    const bool has_bits = j.contains("bits"), has_ones = j.contains("ones");
    if (has_bits == has_ones) throw ParseError("scenery needs exactly one of 'bits' or 'ones'");
    if (has_bits) {
        std::vector<std::uint8_t> bits;
        for (const auto& b : j.at("bits")) {
            const int x = b.get<int>();
            if (x != 0 && x != 1) throw ParseError("scenery bits must be 0 or 1");
            bits.push_back(static_cast<std::uint8_t>(x));
        }
        if (bits.size() != g->order())
            throw ParseError("scenery has " + std::to_string(bits.size()) + " bits; group " + g->to_string() + " has " +
                             std::to_string(g->order()) + " elements");
        return Scenery(*g, bits);
    }
    std::vector<Rank> ones;
    for (const auto& e : j.at("ones")) {
        if (e.is_number_integer()) {
            const auto v = e.get<std::int64_t>();
            if (!g->is_cycle()) throw ParseError("integer positions need a cyclic group");
            ones.push_back(static_cast<Rank>(mod_floor(v, static_cast<std::int64_t>(g->order()))));
        } else {
            ones.push_back(GroupElement::parse(*g, e.get<std::string>()).rank());
        }
    }
    return Scenery::indicator(*g, ones);
}

inline Scenery load_scenery(const std::string& path, const std::optional<GroupSpec>& expected = std::nullopt) {
    try {
        return scenery_from_json(json::parse(read_file(path)), expected);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// JSON renderings
// ---------------------------------------------------------------------------

inline std::string element_string(const GroupSpec& g, Rank r) { return GroupElement::from_rank(g, r).to_string(); }

inline json to_json(const Scenery& f) {
    json ones = json::array();
    for (Rank r : f.ones_positions()) ones.push_back(element_string(f.group(), r));
    std::vector<int> bits;
    for (Rank r = 0; r < f.group().order(); ++r) bits.push_back(f(r));
    return {{"group", f.group().to_string()}, {"bits", bits}, {"ones", ones}};
}

inline std::string real_string(const Real& x, int digits = 30) { return x.str(digits); }

inline json to_json(const AnalysisVerdict& v, const StepDistribution& gamma, bool explain = false) {
    const auto& g = gamma.group();
    json j;
    j["group"] = g.to_string();
    j["walk"] = gamma.describe();
    j["mode"] = gamma.is_exact() ? "exact" : "float";
    j["verdict"] = to_string(v.verdict);
    j["reason"] = v.reason;
    j["decided_by"] = v.decided_by;
    j["distinct"] = v.distinct;
    j["symmetric"] = v.symmetric;
    j["drift"] = v.drift ? json(element_string(g, *v.drift)) : json(nullptr);
    json cols = json::array();
    for (const auto& c : v.collisions) {
        json e{{"x", element_string(g, c.x)}, {"y", element_string(g, c.y)}};
        e["multiplier"] = c.multiplier ? json(*c.multiplier) : json(nullptr);
        cols.push_back(e);
    }
    j["collisions"] = cols;
    json ties = json::array();
    for (const auto& [x, y] : v.near_ties) ties.push_back({{"x", element_string(g, x)}, {"y", element_string(g, y)}});
    j["near_ties"] = ties;
    if (v.table) {
        json table = json::array();
        ScopedPrecision guard(std::max(v.table->precision_bits(), 64u));
        for (Rank x = 0; x < g.order(); ++x) {
            const auto z = v.table->numeric_at(x);
            json e{{"x", element_string(g, x)}, {"re", real_string(z.re)}, {"im", real_string(z.im)}};
            if (explain && v.table->is_exact()) e["exact"] = to_json(v.table->exact_at(x));
            table.push_back(e);
        }
        j["fourier_table"] = table;
    }
    return j;
}

inline json to_json(const IndistinguishablePair& p) {
    const auto& g = p.f1.group();
    json j{{"kind", to_string(p.kind)}, {"group", g.to_string()}, {"f1", to_json(p.f1)}, {"f2", to_json(p.f2)},
           {"transform", p.transform}};
    j["x"] = p.x ? json(element_string(g, *p.x)) : json(nullptr);
    j["y"] = p.y ? json(element_string(g, *p.y)) : json(nullptr);
    j["multiplier"] = p.multiplier ? json(*p.multiplier) : json(nullptr);
    j["factor"] = p.factor ? json(*p.factor) : json(nullptr);
    json wm = json::array();
    for (Rank r : p.witness_map) wm.push_back(element_string(g, r));
    j["witness_map"] = wm;
    return j;
}

inline json to_json(const EquivalenceResult& r) {
    json j{{"status", to_string(r.status)}, {"heuristic", r.heuristic}, {"basis_dim", r.basis_dim}};
    j["certificate"] = r.certificate ? json(*r.certificate) : json(nullptr);
    return j;
}

inline json to_json(const EquivalenceClassReport& r) {
    json classes = json::array();
    for (const auto& cls : r.classes) {
        json c = json::array();
        for (const auto& f : cls) {
            json ones = json::array();
            for (Rank k : f.ones_positions()) ones.push_back(element_string(r.group, k));
            c.push_back(ones);
        }
        classes.push_back(c);
    }
    std::size_t orbits = 0;
    for (const auto& c : r.classes) orbits += c.size();
    return {{"group", r.group.to_string()}, {"minimal", r.minimal},     {"heuristic", r.heuristic},
            {"class_count", r.classes.size()}, {"orbit_count", orbits}, {"unknown_pairs", r.unknown_pairs},
            {"classes", classes}};
}

/// size,count histogram of class sizes (in shift orbits).
inline std::string class_histogram_csv(const EquivalenceClassReport& r) {
    std::map<std::size_t, std::size_t> h;
    for (const auto& c : r.classes) ++h[c.size()];
    std::string s = "size,count\n";
    for (const auto& [size, count] : h) s += std::to_string(size) + "," + std::to_string(count) + "\n";
    return s;
}

inline std::string b_table_csv(const TemporalAutocorrelation& b) {
    std::string s = "lag,numerator,denominator,float\n";
    for (std::size_t l = 0; l < b.size(); ++l) {
        s += std::to_string(l) + "," + b[l].get_num().get_str() + "," + b[l].get_den().get_str() + "," +
             to_real(b[l]).str(17) + "\n";
    }
    return s;
}

template <class V>
json to_json(const Multispectrum<V>& m) {
    json entries = json::array();
    for (const auto& [key, val] : m.entries) {
        json e{{"tuple", unpack_tuple(key, m.arity)}};
        if constexpr (std::is_same_v<V, Rational>) e["value"] = val.get_str();
        else e["value"] = val;
        entries.push_back(e);
    }
    return {{"group", m.group.to_string()}, {"arity", m.arity}, {"entries", entries}};
}

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

/// Observations packed 8 per byte, least significant bit first.
inline std::string pack_bits(const std::vector<std::uint8_t>& bits) {
    std::string out((bits.size() + 7) / 8, '\0');
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) out[i / 8] = static_cast<char>(static_cast<unsigned char>(out[i / 8]) | (1U << (i % 8)));
    return out;
}

inline std::vector<std::uint8_t> unpack_bits(const std::string& packed, std::size_t count) {
    if (packed.size() * 8 < count) throw ParseError("packed trace shorter than declared length");
    std::vector<std::uint8_t> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = (static_cast<unsigned char>(packed[i / 8]) >> (i % 8)) & 1U;
    return out;
}

inline json trace_sidecar(const WalkTrace& t, const StepDistribution& gamma, const Scenery& f) {
    return {{"seed", t.seed},
            {"steps", t.size()},
            {"group", t.group.to_string()},
            {"walk", gamma.describe()},
            {"scenery", to_json(f)},
            {"bit_order", "lsb-first"},
            {"generator", "mt19937_64 seeded by splitmix64"}};
}

inline std::string positions_csv(const WalkTrace& t) {
    std::string s = "t,position,observation\n";
    for (std::size_t i = 0; i < t.size(); ++i)
        s += std::to_string(i + 1) + ",\"" + element_string(t.group, t.positions[i]) + "\"," +
             std::to_string(t.observations[i]) + "\n";
    return s;
}

// ---------------------------------------------------------------------------
// Fourier table cache (SCENERYLAB_CACHE)
// ---------------------------------------------------------------------------

inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

/**
 * Exact tables are memoized as JSON under $SCENERYLAB_CACHE, keyed by the
 * walk description; stale or unreadable entries are recomputed. Float
 * tables are never cached.
 */
inline FourierTable cached_fourier_transform(const StepDistribution& gamma, unsigned bits = kDefaultPrecisionBits) {
    const char* dir = std::getenv("SCENERYLAB_CACHE");
    if (!dir || !*dir || !gamma.is_exact() || !gamma.group().all_prime()) return fourier_transform_any(gamma, bits);
    const std::string key = gamma.describe();
    const auto path = std::filesystem::path(dir) / ("fourier-" + fnv1a_hex(key) + ".json");
    try {
        if (std::filesystem::exists(path)) {
            const auto j = json::parse(read_file(path.string()));
            if (j.at("walk").get<std::string>() == key) {
                std::vector<CyclotomicNumber> values;
                for (const auto& e : j.at("entries")) values.push_back(cyclotomic_from_json(e));
                if (values.size() == gamma.group().order()) return FourierTable(gamma.group(), std::move(values));
            }
        }
    } catch (const std::exception&) {
    }
    auto table = fourier_transform_any(gamma, bits);
    try {
        std::filesystem::create_directories(dir);
        json entries = json::array();
        for (const auto& c : table.exact_values()) entries.push_back(to_json(c));
        write_file(path.string(), json{{"walk", key}, {"entries", entries}}.dump());
    } catch (const std::exception&) {
    }
    return table;
}

} // namespace scenerylab
