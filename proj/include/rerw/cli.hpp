#pragma once

#include "analytic.hpp"
#include "martingale.hpp"
#include "moments.hpp"
#include "montecarlo.hpp"
#include "report.hpp"
#include "walk.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rerw::cli {

/// Bad command line or configuration; maps to exit code 2.
class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class Command { Simulate, Verify, Table, Moments, Diagnose };
enum class Format { Text, Json, Csv };

inline std::string_view to_string(Command c)
{
    switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Verify: return "verify";
    case Command::Table: return "table";
    case Command::Moments: return "moments";
    case Command::Diagnose: return "diagnose";
    }
    return "";
}

inline std::string_view to_string(Format f)
{
    switch (f) {
    case Format::Text: return "text";
    case Format::Json: return "json";
    case Format::Csv: return "csv";
    }
    return "";
}

struct RunConfig
{
    Command command = Command::Verify;
    double p = 0.35;
    double c = 1.0;
    double q = 0.5;
    std::uint64_t n_steps = 10'000;
    std::uint64_t replicates = 1000;
    std::uint64_t seed = 0;
    std::uint64_t draws = 1'000'000; // one-step draws for conditional moments (diagnose)
    SamplerKind sampler = SamplerKind::Record;
    std::vector<double> grid{0.25, 0.5, 0.75, 1.0};
    std::vector<std::uint64_t> checkpoints;
    Format format = Format::Text;
    std::string out; // empty: standard output
    unsigned threads = 1;
    std::optional<Regime> force_regime;
    montecarlo::Tolerances tol;

    WalkParams params() const { return {p, c, q}; }

    montecarlo::EnsembleSpec ensemble() const
    {
        montecarlo::EnsembleSpec s;
        s.params = params();
        s.n_steps = n_steps;
        s.replicates = replicates;
        s.master_seed = seed;
        s.time_grid = grid;
        s.backend = sampler;
        s.threads = threads;
        s.checkpoints = checkpoints;
        s.regime = force_regime;
        return s;
    }

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    return out;
}

inline double to_double(const std::string& s)
{
    double x = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw UsageError("expected a number, got '" + s + "'");
    return x;
}

inline std::uint64_t to_count(const std::string& s)
{
    std::uint64_t x = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (!s.empty() && r.ec == std::errc() && r.ptr == s.data() + s.size()) return x;
    // also accept integral scientific notation such as 1e6
    const double d = to_double(s);
    if (!(d >= 0.0 && d < 1.8e19 && d == std::floor(d))) throw UsageError("expected a non-negative integer, got '" + s + "'");
    return static_cast<std::uint64_t>(d);
}

inline double in_unit(const std::string& s)
{
    const double x = to_double(s);
    if (!(x >= 0.0 && x <= 1.0)) throw UsageError("must lie in [0, 1], got " + s);
    return x;
}

inline double positive(const std::string& s)
{
    const double x = to_double(s);
    if (!(x > 0.0) || !std::isfinite(x)) throw UsageError("must be a positive number, got " + s);
    return x;
}

template <class T>
std::string join(const std::vector<T>& xs)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_floating_point_v<T>)
            out += format_double(xs[i]);
        else
            out += std::to_string(xs[i]);
    }
    return out;
}

/// Sets one key; the same vocabulary serves flags (without "--") and config
/// files.
inline void set_key(RunConfig& cfg, const std::string& key, const std::string& raw)
{
    const std::string v = trim(raw);
    auto& t = cfg.tol;
    if (key == "command") {
        if (v == "simulate") cfg.command = Command::Simulate;
        else if (v == "verify") cfg.command = Command::Verify;
        else if (v == "table") cfg.command = Command::Table;
        else if (v == "moments") cfg.command = Command::Moments;
        else if (v == "diagnose") cfg.command = Command::Diagnose;
        else throw UsageError("unknown command '" + v + "' (simulate|verify|table|moments|diagnose)");
    } else if (key == "p") {
        cfg.p = in_unit(v);
    } else if (key == "q") {
        cfg.q = in_unit(v);
    } else if (key == "c") {
        cfg.c = to_double(v);
        if (!(cfg.c >= 0.0) || !std::isfinite(cfg.c)) throw UsageError("must be a finite non-negative number, got " + v);
    } else if (key == "steps" || key == "n") {
        cfg.n_steps = to_count(v);
        if (cfg.n_steps < 1) throw UsageError("must be at least 1");
    } else if (key == "replicates") {
        cfg.replicates = to_count(v);
        if (cfg.replicates < 2) throw UsageError("must be at least 2");
    } else if (key == "seed") {
        cfg.seed = to_count(v);
    } else if (key == "draws") {
        cfg.draws = to_count(v);
        if (cfg.draws < 2) throw UsageError("must be at least 2");
    } else if (key == "sampler") {
        try {
            cfg.sampler = sampler_from_string(v);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    } else if (key == "grid") {
        std::vector<double> g;
        for (const auto& s : split_list(v)) {
            const double x = to_double(s);
            if (!(x > 0.0 && x <= 1.0)) throw UsageError("grid fractions must lie in (0, 1], got " + s);
            g.push_back(x);
        }
        if (g.empty()) throw UsageError("grid must not be empty");
        cfg.grid = std::move(g);
    } else if (key == "checkpoints") {
        cfg.checkpoints.clear();
        for (const auto& s : split_list(v)) cfg.checkpoints.push_back(to_count(s));
    } else if (key == "format") {
        if (v == "text") cfg.format = Format::Text;
        else if (v == "json") cfg.format = Format::Json;
        else if (v == "csv") cfg.format = Format::Csv;
        else throw UsageError("unknown format '" + v + "' (text|json|csv)");
    } else if (key == "out") {
        cfg.out = v;
    } else if (key == "threads") {
        cfg.threads = static_cast<unsigned>(to_count(v));
    } else if (key == "force-regime") {
        if (v == "auto") {
            cfg.force_regime.reset();
        } else {
            try {
                cfg.force_regime = regime_from_string(v);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
        }
    } else if (key == "tol-diffusive") {
        t.diffusive_variance = positive(v);
    } else if (key == "tol-critical") {
        t.critical_variance = positive(v);
    } else if (key == "tol-covariance") {
        t.covariance = positive(v);
    } else if (key == "tol-lc-mean") {
        t.lc_mean = positive(v);
    } else if (key == "tol-lc-second") {
        t.lc_second_moment = positive(v);
    } else if (key == "tol-com") {
        t.com_variance = positive(v);
    } else if (key == "tol-qsl-mean") {
        t.qsl_mean = positive(v);
    } else if (key == "tol-qsl-single") {
        t.qsl_single = positive(v);
    } else if (key == "ks-alpha") {
        t.ks_alpha = in_unit(v);
    } else if (key == "se-multiplier") {
        t.se_multiplier = positive(v);
    } else if (key == "ks-attempts") {
        t.ks_attempts = static_cast<int>(to_count(v));
        if (t.ks_attempts < 1) throw UsageError("must be at least 1");
    } else {
        throw UsageError("unknown key '" + key + "'");
    }
}

/// Keys in serialization order. "n" is an alias of "steps" and is not listed.
inline const std::vector<std::string>& keys()
{
    static const std::vector<std::string> k{
        "command",        "p",           "c",           "q",          "steps",          "replicates",
        "seed",           "draws",       "sampler",     "grid",       "checkpoints",    "format",
        "out",            "threads",     "force-regime", "tol-diffusive", "tol-critical", "tol-covariance",
        "tol-lc-mean",    "tol-lc-second", "tol-com",   "tol-qsl-mean", "tol-qsl-single", "ks-alpha",
        "se-multiplier",  "ks-attempts"};
    return k;
}

inline void check_params(const RunConfig& cfg)
{
    try {
        (void)cfg.params();
    } catch (const ParamError& e) {
        throw UsageError(std::string("--p/--c: ") + e.what());
    }
    for (auto k : cfg.checkpoints)
        if (k < 1 || k > cfg.n_steps)
            throw UsageError("--checkpoints: " + std::to_string(k) + " is outside [1, " + std::to_string(cfg.n_steps) + "]");
}

} // namespace detail

/// Serializes every field as `key = value` lines.
inline std::string to_config(const RunConfig& cfg)
{
    const auto& t = cfg.tol;
    std::ostringstream os;
    const auto put = [&](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
    put("command", std::string(to_string(cfg.command)));
    put("p", format_double(cfg.p));
    put("c", format_double(cfg.c));
    put("q", format_double(cfg.q));
    put("steps", std::to_string(cfg.n_steps));
    put("replicates", std::to_string(cfg.replicates));
    put("seed", std::to_string(cfg.seed));
    put("draws", std::to_string(cfg.draws));
    put("sampler", std::string(rerw::to_string(cfg.sampler)));
    put("grid", detail::join(cfg.grid));
    put("checkpoints", detail::join(cfg.checkpoints));
    put("format", std::string(to_string(cfg.format)));
    put("out", cfg.out);
    put("threads", std::to_string(cfg.threads));
    put("force-regime", cfg.force_regime ? std::string(rerw::to_string(*cfg.force_regime)) : "auto");
    put("tol-diffusive", format_double(t.diffusive_variance));
    put("tol-critical", format_double(t.critical_variance));
    put("tol-covariance", format_double(t.covariance));
    put("tol-lc-mean", format_double(t.lc_mean));
    put("tol-lc-second", format_double(t.lc_second_moment));
    put("tol-com", format_double(t.com_variance));
    put("tol-qsl-mean", format_double(t.qsl_mean));
    put("tol-qsl-single", format_double(t.qsl_single));
    put("ks-alpha", format_double(t.ks_alpha));
    put("se-multiplier", format_double(t.se_multiplier));
    put("ks-attempts", std::to_string(t.ks_attempts));
    return os.str();
}

/// Applies `key = value` lines ('#' starts a comment) on top of `cfg`.
inline void apply_config(RunConfig& cfg, std::istream& in)
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        const std::string body = detail::trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = detail::trim(body.substr(0, eq));
        try {
            detail::set_key(cfg, key, body.substr(eq + 1));
        } catch (const UsageError& e) {
            throw UsageError("config line " + std::to_string(lineno) + " (" + key + "): " + e.what());
        }
    }
}

inline RunConfig parse_config(const std::string& text)
{
    RunConfig cfg;
    std::istringstream in(text);
    apply_config(cfg, in);
    detail::check_params(cfg);
    return cfg;
}

/// Result of parsing a command line: a config, or a request to print help.
struct ParsedArgs
{
    RunConfig config;
    std::optional<std::string> help;
};

inline ParsedArgs parse_args(int argc, const char* const* argv)
{
    CLI::App app{"Reinforced elephant random walk laboratory", "rerw"};
    app.set_help_flag("-h,--help", "Print this help and exit");
    std::string command, config_path;
    app.add_option("command", command, "simulate | verify | table | moments | diagnose")->required();
    app.add_option("--config", config_path, "Flat key = value file; flags take precedence");

    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> opts;
    const std::map<std::string, std::string> help{
        {"p", "Memory parameter p in [0, 1]"},
        {"c", "Reinforcement c >= 0"},
        {"q", "P(X_1 = +1)"},
        {"steps", "Number of steps n"},
        {"n", "Alias of --steps"},
        {"replicates", "Ensemble size (>= 2)"},
        {"seed", "Master seed"},
        {"draws", "One-step draws for conditional moments (diagnose)"},
        {"sampler", "record | tree"},
        {"grid", "Comma-separated time fractions in (0, 1]"},
        {"checkpoints", "Comma-separated absolute steps"},
        {"format", "text | json | csv"},
        {"out", "Output file (default: standard output)"},
        {"threads", "Worker threads (0: all cores)"},
        {"force-regime", "auto | diffusive | critical | superdiffusive"},
    };
    std::vector<std::string> flag_keys = detail::keys();
    flag_keys.erase(flag_keys.begin()); // command is positional
    flag_keys.insert(flag_keys.begin() + 4, "n");
    for (const auto& k : flag_keys) {
        const auto h = help.find(k);
        opts[k] = app.add_option("--" + k, values[k], h != help.end() ? h->second : "Tolerance override");
    }

    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        return {RunConfig{}, app.help()};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw UsageError("--config: cannot read '" + config_path + "'");
        apply_config(cfg, in);
    }
    try {
        detail::set_key(cfg, "command", command);
    } catch (const UsageError& e) {
        throw UsageError(std::string("command: ") + e.what());
    }
    if (opts["n"]->count() && opts["steps"]->count() && values["n"] != values["steps"])
        throw UsageError("conflicting values for --n and --steps");
    for (const auto& k : flag_keys) {
        if (!opts[k]->count()) continue;
        try {
            detail::set_key(cfg, k, values[k]);
        } catch (const UsageError& e) {
            throw UsageError("--" + k + ": " + e.what());
        }
    }
    detail::check_params(cfg);
    return {cfg, std::nullopt};
}

// Output -----------------------------------------------------------------------

/// Full-precision CSV number (17 significant digits).
inline std::string csv_number(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Payload
{
    nlohmann::ordered_json json;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    int exit_code = 0;
};

inline std::string render(const Payload& p, Format f)
{
    std::ostringstream os;
    switch (f) {
    case Format::Json: os << p.json.dump(2) << '\n'; break;
    case Format::Csv:
        for (const auto* row : {&p.header}) {
            for (std::size_t i = 0; i < row->size(); ++i) os << (i ? "," : "") << (*row)[i];
            os << '\n';
        }
        for (const auto& row : p.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
            os << '\n';
        }
        break;
    case Format::Text: {
        std::vector<std::size_t> width(p.header.size(), 0);
        const auto widen = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
        };
        widen(p.header);
        for (const auto& r : p.rows) widen(r);
        const auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                os << r[i];
                if (i + 1 < r.size()) os << std::string(width[i] - r[i].size() + 2, ' ');
            }
            os << '\n';
        };
        line(p.header);
        for (const auto& r : p.rows) line(r);
        break;
    }
    }
    return os.str();
}

inline std::string opt_number(const std::optional<double>& x) { return x ? csv_number(*x) : ""; }

inline Payload report_payload(const Report& r)
{
    Payload p;
    p.json = to_json(r);
    p.header = {"kind", "name", "target", "estimate", "stderr", "tolerance", "pass"};
    for (const auto& c : r.checks)
        p.rows.push_back({"check", c.name, csv_number(c.target), csv_number(c.estimate), csv_number(c.se),
                          csv_number(c.tolerance), c.pass ? "true" : "false"});
    for (const auto& d : r.diagnostics)
        p.rows.push_back({"diagnostic", d.name, opt_number(d.target), csv_number(d.estimate), opt_number(d.se), "", ""});
    p.exit_code = r.all_pass() ? 0 : 1;
    return p;
}

inline nlohmann::ordered_json params_json(const RunConfig& cfg)
{
    return {{"p", cfg.p}, {"c", cfg.c}, {"q", cfg.q}};
}

inline Payload table_payload(const RunConfig& cfg)
{
    const auto params = cfg.params();
    const auto lim = analytic::regime_limits(params);
    Payload p;
    p.json = params_json(cfg);
    p.json["a"] = params.a();
    p.json["lambda"] = params.lambda();
    p.json["exponent"] = params.exponent();
    p.json["kappa"] = params.kappa();
    p.json["regime"] = std::string(to_string(lim.regime));
    const std::vector<std::pair<const char*, std::optional<double>>> fields{
        {"clt_variance", lim.clt_variance}, {"qsl_constant", lim.qsl_constant},
        {"lil_constant", lim.lil_constant}, {"com_variance", lim.com_variance},
        {"lc_mean", lim.lc_mean},           {"lc_second_moment", lim.lc_second_moment}};
    for (const auto& [k, v] : fields) p.json[k] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    if (lim.regime == Regime::Superdiffusive)
        p.json["lc_second_moment_uncorrected_formula"] = analytic::lc_second_moment_uncorrected(params);

    p.header = {"quantity", "value"};
    for (const auto& [k, v] : p.json.items()) {
        if (v.is_number()) p.rows.push_back({k, csv_number(v.get<double>())});
        else if (v.is_string()) p.rows.push_back({k, v.get<std::string>()});
        else p.rows.push_back({k, ""});
    }
    return p;
}

inline std::vector<std::uint64_t> checkpoints_or_log_spaced(const RunConfig& cfg)
{
    if (!cfg.checkpoints.empty()) return cfg.checkpoints;
    return moments::log_spaced(cfg.n_steps);
}

inline Payload moments_payload(const RunConfig& cfg)
{
    auto ns = checkpoints_or_log_spaced(cfg);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    const auto rows = moments::moment_series(cfg.params(), ns);
    Payload p;
    p.header = {"n", "E_S", "E_S2", "E_Y", "E_Y2", "E_SY"};
    p.json = params_json(cfg);
    p.json["rows"] = nlohmann::ordered_json::array();
    for (const auto& t : rows) {
        p.rows.push_back({std::to_string(t.n), csv_number(t.eS), csv_number(t.eS2), csv_number(t.eY), csv_number(t.eY2),
                          csv_number(t.eSY)});
        p.json["rows"].push_back(
            {{"n", t.n}, {"E_S", t.eS}, {"E_S2", t.eS2}, {"E_Y", t.eY}, {"E_Y2", t.eY2}, {"E_SY", t.eSY}});
    }
    return p;
}

inline Payload simulate_payload(const RunConfig& cfg)
{
    const auto t = run(cfg.params(), cfg.n_steps, cfg.seed, checkpoints_or_log_spaced(cfg), cfg.sampler);
    Payload p;
    p.header = {"step", "S", "Y"};
    p.json = params_json(cfg);
    p.json["seed"] = cfg.seed;
    p.json["sampler"] = std::string(to_string(cfg.sampler));
    p.json["records"] = nlohmann::ordered_json::array();
    for (const auto& r : t.records) {
        p.rows.push_back({std::to_string(r.step), std::to_string(r.S), csv_number(r.Y)});
        p.json["records"].push_back({{"step", r.step}, {"S", r.S}, {"Y", r.Y}});
    }
    return p;
}

inline Report diagnose_report(const RunConfig& cfg)
{
    const auto params = cfg.params();
    Report r;
    r.spec = params_json(cfg);
    r.spec["n_steps"] = cfg.n_steps;
    r.spec["replicates"] = cfg.replicates;
    r.spec["seed"] = cfg.seed;
    r.spec["draws"] = cfg.draws;
    r.spec["sampler"] = std::string(to_string(cfg.sampler));
    r.regime = std::string(to_string(classify_regime(params)));

    const auto cps = checkpoints_or_log_spaced(cfg);
    const auto tracker = martingale::track(params, cfg.n_steps, cfg.seed, cps, cfg.sampler);
    r.append(martingale::path_checks(params, tracker));
    const auto& inc = tracker.increments();
    if (!inc.mean_xi2.empty()) {
        const double one_minus_a2 = 1.0 - params.a() * params.a();
        r.diagnostics.push_back({"running_mean_xi2", inc.mean_xi2.back(), one_minus_a2, std::nullopt});
        r.diagnostics.push_back({"running_mean_eps_xi", inc.mean_eps_xi.back(), one_minus_a2, std::nullopt});
        r.diagnostics.push_back({"running_mean_eps2_corrected", inc.mean_eps2_corrected.back(), params.kappa(), std::nullopt});
    }

    std::vector<std::uint64_t> inc_points;
    for (double s : cfg.grid) {
        const auto k = montecarlo::grid_step(cfg.n_steps, s);
        if (k < cfg.n_steps) inc_points.push_back(k);
    }
    std::sort(inc_points.begin(), inc_points.end());
    inc_points.erase(std::unique(inc_points.begin(), inc_points.end()), inc_points.end());
    if (!inc_points.empty())
        r.append(martingale::martingale_increment_check(params, inc_points, cfg.replicates, rng::derive(cfg.seed, 1),
                                                        cfg.threads, cfg.sampler, cfg.tol.se_multiplier));

    with_walk(cfg.sampler, params, cfg.seed, [&](auto& walk) {
        for (std::uint64_t k = 1; k < cfg.n_steps; ++k) walk.step();
        r.append(martingale::conditional_moment_diagnostics(walk, cfg.draws, rng::derive(cfg.seed, 2),
                                                            cfg.tol.se_multiplier));
    });
    return r;
}

inline Payload execute(const RunConfig& cfg)
{
    switch (cfg.command) {
    case Command::Simulate: return simulate_payload(cfg);
    case Command::Verify: return report_payload(montecarlo::verify(cfg.ensemble(), cfg.tol));
    case Command::Table: return table_payload(cfg);
    case Command::Moments: return moments_payload(cfg);
    case Command::Diagnose: return report_payload(diagnose_report(cfg));
    }
    return {};
}

/// Entry point. Exit codes: 0 success (all checks pass), 1 some check failed,
/// 2 usage, parameter or output error.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    try {
        auto parsed = parse_args(argc, argv);
        if (parsed.help) {
            out << *parsed.help;
            return 0;
        }
        cfg = parsed.config;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\nrun 'rerw --help' for usage\n";
        return 2;
    }

    Payload payload;
    try {
        payload = execute(cfg);
    } catch (const RegimeError& e) {
        err << "regime error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const std::out_of_range& e) {
        err << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    const std::string text = render(payload, cfg.format);
    if (cfg.out.empty()) {
        out << text;
        out.flush();
    } else {
        std::ofstream file(cfg.out, std::ios::binary);
        if (!file || !(file << text) || !file.flush()) {
            err << "output error: cannot write '" << cfg.out << "'\n";
            return 2;
        }
    }
    if (cfg.command == Command::Verify || cfg.command == Command::Diagnose) {
        std::size_t passed = 0;
        for (const auto& row : payload.rows) passed += row[0] == "check" && row[6] == "true";
        std::size_t total = 0;
        for (const auto& row : payload.rows) total += row[0] == "check";
        err << to_string(cfg.command) << ": " << passed << "/" << total << " checks passed\n";
    }
    return payload.exit_code;
}

} // namespace rerw::cli
