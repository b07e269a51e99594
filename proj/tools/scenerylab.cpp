// scenerylab: command-line front end.
//
// Exit codes: 0 Reconstructive / success, 10 NotReconstructive, 20 Unknown,
// 1 error or refusal.

#include "scenerylab/scenerylab.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace scenerylab;

namespace {

constexpr int kExitReconstructive = 0;
constexpr int kExitNotReconstructive = 10;
constexpr int kExitUnknown = 20;
constexpr int kExitError = 1;

int exit_code(Verdict v) {
    switch (v) {
    case Verdict::reconstructive: return kExitReconstructive;
    case Verdict::not_reconstructive: return kExitNotReconstructive;
    case Verdict::unknown: return kExitUnknown;
    }
    return kExitError;
}

struct Options {
    std::string group;
    std::string walk;
    std::string scenery;
    std::uint64_t seed = 42;
    unsigned precision_bits = kDefaultPrecisionBits;
    std::uint64_t max_order = 0;
    std::string out;
    std::string format = "json";
    unsigned threads = 1;
    bool force = false;
    bool explain = false;
    // simulate
    std::size_t steps = 100000;
    std::size_t lags = 0;
    bool emit_positions = false;
    // bounded-n
    std::string multiset;
    // pair
    std::string collision;
};

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) std::cout << text << (text.empty() || text.back() == '\n' ? "" : "\n");
    else write_file(o.out, text.back() == '\n' ? text : text + "\n");
}

void emit(const Options& o, const json& j) { emit(o, j.dump(2)); }

void require_json(const Options& o, const char* cmd) {
    if (o.format != "json") throw DomainError(std::string("--format ") + o.format + " is not available for " + cmd);
}

std::optional<GroupSpec> group_flag(const Options& o) {
    if (o.group.empty()) return std::nullopt;
    return GroupSpec::parse(o.group);
}

WalkFile require_walk(const Options& o) {
    if (o.walk.empty()) throw DomainError("--walk is required");
    auto wf = load_walk(o.walk, group_flag(o), o.precision_bits);
    if (!wf.walk) throw DomainError("walk file has no group; give one in the file or with --group (integer multisets on Z go to bounded-n)");
    return wf;
}

AnalysisVerdict run_analyze(const Options& o, const StepDistribution& gamma) {
    gamma.group().require_enumerable();
    return analyze(gamma, cached_fourier_transform(gamma, o.precision_bits));
}

int cmd_analyze(const Options& o) {
    const auto wf = require_walk(o);
    const auto v = run_analyze(o, *wf.walk);
    if (o.format == "csv") {
        std::string s = "x,re,im\n";
        const auto& g = wf.walk->group();
        ScopedPrecision guard(o.precision_bits);
        for (Rank x = 0; x < g.order(); ++x) {
            const auto z = v.table->numeric_at(x);
            s += "\"" + element_string(g, x) + "\"," + real_string(z.re) + "," + real_string(z.im) + "\n";
        }
        emit(o, s);
    } else {
        require_json(o, "analyze");
        emit(o, to_json(v, *wf.walk, o.explain));
    }
    return exit_code(v.verdict);
}

std::pair<Rank, Rank> parse_collision(const GroupSpec& g, const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ParseError("--collision expects X:Y, got '" + text + "'");
    auto elem = [&](const std::string& s) {
        if (g.is_cycle() && s.find('(') == std::string::npos)
            return static_cast<Rank>(mod_floor(std::stoll(s), static_cast<std::int64_t>(g.order())));
        return GroupElement::parse(g, s).rank();
    };
    return {elem(text.substr(0, colon)), elem(text.substr(colon + 1))};
}

int cmd_pair(const Options& o) {
    require_json(o, "pair");
    const auto wf = require_walk(o);
    const auto& gamma = *wf.walk;
    const auto& g = gamma.group();
    const auto v = run_analyze(o, gamma);
    std::optional<std::pair<Rank, Rank>> col;
    if (!o.collision.empty()) {
        if (!o.force) throw DomainError("--collision requires --force");
        col = parse_collision(g, o.collision);
    } else if (!v.collisions.empty()) {
        col = std::make_pair(v.collisions.front().x, v.collisions.front().y);
    }
    if (v.verdict != Verdict::not_reconstructive && !o.force) {
        json j{{"refused", true}, {"verdict", to_string(v.verdict)}, {"reason", v.reason}};
        j["explanation"] = v.verdict == Verdict::reconstructive
                               ? "distinct Fourier coefficients: every pair of sceneries that are not shifts of each other is distinguishable"
                               : "no indistinguishable pair is guaranteed here; rerun with --force to attempt one";
        emit(o, j);
        std::cerr << "scenerylab pair: refused (" << to_string(v.verdict) << "): " << v.reason << "\n";
        return kExitError;
    }
    if (!col) throw DomainError("no collision to build a pair from; pass --force --collision X:Y");
    const auto pair = build_pair_for_collision(g, col->first, col->second);
    const auto eq = sceneries_equivalent(gamma, pair.f1, pair.f2);
    json j = to_json(pair);
    j["verdict"] = to_string(v.verdict);
    j["collision"] = {{"x", element_string(g, col->first)}, {"y", element_string(g, col->second)}};
    j["oracle"] = to_json(eq);
    emit(o, j);
    if (eq.status == Equivalence::not_equivalent) {
        if (v.verdict == Verdict::not_reconstructive)
            throw InconsistencyError("constructed pair is distinguishable (certificate " + *eq.certificate + ")");
        std::cerr << "scenerylab pair: the forced pair is distinguishable, certificate " << *eq.certificate << "\n";
        return kExitError;
    }
    return eq.equivalent() ? kExitNotReconstructive : kExitUnknown;
}

int cmd_simulate(const Options& o) {
    const auto wf = require_walk(o);
    const auto& gamma = *wf.walk;
    if (o.scenery.empty()) throw DomainError("--scenery is required");
    const auto f = load_scenery(o.scenery, gamma.group());
    const auto t = simulate(gamma, f, o.steps, o.seed);
    json j = trace_sidecar(t, gamma, f);
    double mean = 0;
    for (auto b : t.observations) mean += b;
    j["ones_fraction"] = mean / static_cast<double>(t.size());
    std::optional<EmpiricalB> est;
    if (o.lags > 0) {
        est = estimate_b(t, o.lags);
        json lags = json::array();
        for (std::size_t l = 0; l <= o.lags; ++l)
            lags.push_back({{"lag", l}, {"estimate", est->value[l]}, {"stderr", est->stderr_[l]}});
        j["b_estimate"] = lags;
    }
    if (!o.out.empty()) {
        write_file(o.out + ".bits", pack_bits(t.observations));
        j["bits_file"] = o.out + ".bits";
        if (o.emit_positions) {
            write_file(o.out + ".positions.csv", positions_csv(t));
            j["positions_file"] = o.out + ".positions.csv";
        }
        write_file(o.out + ".json", j.dump(2) + "\n");
        return 0;
    }
    if (o.format == "csv") {
        if (!est) throw DomainError("--format csv for simulate needs --lags");
        std::ostringstream s;
        s.precision(17);
        s << "lag,estimate,stderr\n";
        for (std::size_t l = 0; l <= o.lags; ++l) s << l << "," << est->value[l] << "," << est->stderr_[l] << "\n";
        std::cout << s.str();
        return 0;
    }
    require_json(o, "simulate");
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_reconstruct(const Options& o) {
    const auto wf = require_walk(o);
    const auto& gamma = *wf.walk;
    if (o.scenery.empty()) throw DomainError("--scenery is required");
    const auto f = load_scenery(o.scenery, gamma.group());
    const std::uint64_t cap = o.max_order ? o.max_order : kDenseTensorMaxOrder;
    try {
        if (gamma.is_exact()) detail::require_distinct(gamma);
        if (gamma.group().order() > cap)
            throw CapacityError("reconstruct needs |H| <= " + std::to_string(cap) + ", got " + std::to_string(gamma.group().order()));
        const auto r = full_pipeline(gamma, f);
        if (o.format == "csv") {
            emit(o, b_table_csv(temporal_autocorrelation_exact(gamma, f, gamma.group().order() - 1)));
            return 0;
        }
        require_json(o, "reconstruct");
        json j{{"input", to_json(f)}, {"recovered", to_json(r.recovered)}};
        j["shift"] = r.shift ? json(element_string(f.group(), *r.shift)) : json(nullptr);
        j["shift_equivalent"] = r.shift.has_value();
        j["identical"] = r.recovered == f;
        emit(o, j);
        return r.shift ? 0 : kExitError;
    } catch (const SingularSystemError& e) {
        const auto v = run_analyze(o, gamma);
        json cols = json::array();
        for (const auto& c : v.collisions)
            cols.push_back({{"x", element_string(gamma.group(), c.x)}, {"y", element_string(gamma.group(), c.y)}});
        emit(o, json{{"error", e.what()}, {"collisions", cols}, {"verdict", to_string(v.verdict)}});
        std::cerr << "scenerylab reconstruct: " << e.what() << "\n";
        return kExitNotReconstructive;
    }
}

int cmd_classes(const Options& o) {
    const auto wf = require_walk(o);
    const std::uint64_t cap = o.max_order ? o.max_order : kClassEnumerationMaxOrder;
    const auto rep = enumerate_classes(*wf.walk, o.threads, cap);
    if (o.format == "csv") emit(o, class_histogram_csv(rep));
    else {
        require_json(o, "classes");
        emit(o, to_json(rep));
    }
    if (rep.heuristic || rep.unknown_pairs) return kExitUnknown;
    return rep.minimal ? kExitReconstructive : kExitNotReconstructive;
}

IntegerMultiset parse_int_list(const std::string& text) {
    IntegerMultiset out;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(cur, &used));
            if (used != cur.size()) throw ParseError("bad integer '" + cur + "'");
        } catch (const std::logic_error&) {
            throw ParseError("bad integer '" + cur + "' in --multiset");
        }
        cur.clear();
    };
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '[' || c == ']' || c == '{' || c == '}') flush();
        else cur += c;
    }
    flush();
    return out;
}

int cmd_bounded_n(const Options& o) {
    require_json(o, "bounded-n");
    IntegerMultiset steps;
    if (!o.multiset.empty()) steps = parse_int_list(o.multiset);
    else if (!o.walk.empty()) {
        const auto wf = load_walk(o.walk, std::nullopt, o.precision_bits);
        if (!wf.integer_steps) throw DomainError("bounded-n needs an integer multiset without a group");
        steps = *wf.integer_steps;
    } else throw DomainError("bounded-n needs --multiset or --walk");
    if (steps.empty()) throw DomainError("multiset is empty");
    const auto r = bounded_support_N(steps);
    json j{{"multiset", steps}, {"symmetric", r.symmetric}, {"gcd", r.gcd}};
    if (r.symmetric) {
        j["N"] = nullptr;
        j["note"] = "symmetric multiset: flips are never distinguished, no N exists";
        emit(o, j);
        return 0;
    }
    if (r.gcd == 0) throw DomainError("multiset {0,...,0} never moves");
    j["normalized"] = r.normalized;
    j["support"] = r.support;
    j["coefficients"] = r.coefficients;
    j["b"] = r.b;
    j["N"] = r.N;
    json checks = json::array();
    bool all_ok = true;
    std::int64_t n = r.N;
    for (int i = 0; i < 3; ++i) {
        n = next_prime(n);
        const auto v = analyze(embed_mod_n(steps, n), o.precision_bits);
        all_ok &= v.verdict == Verdict::reconstructive;
        checks.push_back({{"n", n}, {"verdict", to_string(v.verdict)}, {"reason", v.reason}});
    }
    j["checks"] = checks;
    j["consistent"] = all_ok;
    emit(o, j);
    return all_ok ? 0 : kExitError;
}

int cmd_verify(const Options& o) {
    require_json(o, "verify");
    const auto wf = require_walk(o);
    const auto v = run_analyze(o, *wf.walk);
    const auto rep = verify_verdict(v, *wf.walk, o.threads);
    emit(o, json{{"verdict", to_string(v.verdict)},
                 {"oracle_minimal", rep.oracle_minimal},
                 {"heuristic", rep.heuristic},
                 {"resolution", rep.resolution},
                 {"consistent", true}});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scenerylab: scenery reconstruction for random walks on finite abelian groups"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML config file; command-line flags win");
    Options o;
    app.add_option("--group", o.group, "Group string, e.g. Z7, Z7^2, Z7xZ11");
    app.add_option("--walk", o.walk, "Walk file (TOML)");
    app.add_option("--scenery", o.scenery, "Scenery file (JSON)");
    app.add_option("--seed", o.seed, "Simulation seed")->capture_default_str();
    app.add_option("--precision-bits", o.precision_bits, "Float precision in bits")->capture_default_str()->check(CLI::Range(64u, 1u << 16));
    app.add_option("--max-order", o.max_order, "Group order cap for enumeration/reconstruction");
    app.add_option("--out", o.out, "Output path (stdout if omitted; a prefix for simulate)");
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    app.add_option("--threads", o.threads, "Worker threads")->capture_default_str()->check(CLI::Range(1u, 256u));
    app.add_flag("--force", o.force, "Build a pair even without a NotReconstructive verdict");
    app.add_flag("--explain", o.explain, "Include exact cyclotomic Fourier coefficients");

    auto* analyze_cmd = app.add_subcommand("analyze", "Decide reconstructibility from the Fourier table");
    auto* pair_cmd = app.add_subcommand("pair", "Construct an indistinguishable scenery pair");
    pair_cmd->add_option("--collision", o.collision, "Forced collision X:Y (with --force)");
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate the observation sequence");
    sim_cmd->add_option("--steps", o.steps, "Number of observations")->capture_default_str()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--lags", o.lags, "Estimate b_f up to this lag");
    sim_cmd->add_flag("--emit-positions", o.emit_positions, "Write positions CSV next to the trace");
    auto* rec_cmd = app.add_subcommand("reconstruct", "Recover a scenery from its exact temporal statistics");
    auto* classes_cmd = app.add_subcommand("classes", "Enumerate equivalence classes of sceneries");
    auto* bn_cmd = app.add_subcommand("bounded-n", "Cycle size above which an integer step multiset is reconstructive");
    bn_cmd->add_option("--multiset", o.multiset, "Integer steps, e.g. 1,2");
    auto* verify_cmd = app.add_subcommand("verify", "Cross-check analyze against the equivalence oracle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitError;
    }

    try {
        if (*analyze_cmd) return cmd_analyze(o);
        if (*pair_cmd) return cmd_pair(o);
        if (*sim_cmd) return cmd_simulate(o);
        if (*rec_cmd) return cmd_reconstruct(o);
        if (*classes_cmd) return cmd_classes(o);
        if (*bn_cmd) return cmd_bounded_n(o);
        if (*verify_cmd) return cmd_verify(o);
    } catch (const InconsistencyError& e) {
        std::cerr << "scenerylab: inconsistency: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "scenerylab: error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
