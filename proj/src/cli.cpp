#include "aep/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aep/baseline.hpp"
#include "aep/config.hpp"
#include "aep/engine.hpp"
#include "aep/errors.hpp"
#include "aep/geometry.hpp"
#include "aep/quantile.hpp"

namespace aep {

namespace {

// A cell holds its final text; `numeric` cells are written bare in JSON and
// everything else as a JSON string, so CSV and JSON carry the same tokens.
struct Cell {
    std::string text;
    bool numeric = false;
};

Cell num(double v) {
    if (!std::isfinite(v)) return {std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"), false};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return {buf, true};
}

Cell fixed4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return {buf, true};
}

Cell integer(std::uint64_t v) { return {std::to_string(v), true}; }
Cell text(std::string s) { return {std::move(s), false}; }
Cell flag(bool ok) { return text(ok ? "pass" : "fail"); }

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> warnings;
};

void write_csv(const Table& t, std::ostream& os) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i].text;
        os << '\n';
    }
}

void write_json(const Table& t, const std::string& command, std::ostream& os) {
    using nlohmann::json;
    os << "{\"command\":" << json(command).dump() << ",\"rows\":[";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        os << (r ? ",\n" : "\n") << '{';
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            const Cell& c = t.rows[r][i];
            os << (i ? "," : "") << json(t.columns[i]).dump() << ':' << (c.numeric ? c.text : json(c.text).dump());
        }
        os << '}';
    }
    os << "\n],\"warnings\":" << json(t.warnings).dump() << "}\n";
}

struct Options {
    std::string config;
    std::string command;
    std::vector<std::string> s;
    std::vector<std::string> level;
    std::vector<int> dims;
    std::optional<int> n;
    std::string alpha;
    std::string strategy;
    bool no_extrapolate = false;
    std::string format = "csv";
    int workers = 1;
    std::uint64_t seed = 1;
    std::uint64_t samples = 1000000;
    std::string out;
    bool levels = false;
    std::string reference;
    std::string regen;
    bool no_timing = false;
    double tolerance = 1e-6;
};

std::vector<double> parse_numbers(const std::vector<std::string>& items, const char* flag) {
    std::vector<double> v;
    for (const auto& s : items) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty()) throw ConfigError(std::string(flag) + ": not a number: '" + s + "'");
        v.push_back(x);
    }
    return v;
}

struct Setup {
    ModelConfig cfg;
    AepConfig engine;
};

Setup setup(const Options& o) {
    if (o.config.empty()) throw ConfigError("--config is required for command '" + o.command + "'");
    Setup st{load_config(o.config), {}};
    const int d = st.cfg.model.dimension();
    const AepSettings& a = st.cfg.aep;
    if (a.depth) st.engine.depth = *a.depth;
    if (a.alpha) st.engine.alpha = *a.alpha;
    if (a.strategy) st.engine.strategy = *a.strategy;
    if (a.extrapolate) st.engine.extrapolate = *a.extrapolate;
    if (o.n) {
        if (*o.n < 1) throw ConfigError("--n must be >= 1");
        st.engine.depth = *o.n;
    }
    if (!o.alpha.empty()) {
        auto alpha = RationalAlpha::parse(o.alpha);
        alpha.validate(d);
        st.engine.alpha = alpha;
    }
    if (!o.strategy.empty()) st.engine.strategy = parse_strategy(o.strategy);
    if (o.no_extrapolate) st.engine.extrapolate = false;
    if (o.workers < 1) throw ConfigError("--workers must be >= 1");
    st.engine.workers = o.workers;
    return st;
}

bool alpha_is_optimal(const Setup& st) {
    const int d = st.cfg.model.dimension();
    return !st.engine.alpha || *st.engine.alpha == RationalAlpha::optimal(d);
}

void add_warnings(Table& t, const std::vector<std::string>& w) {
    for (const auto& x : w)
        if (std::find(t.warnings.begin(), t.warnings.end(), x) == t.warnings.end()) t.warnings.push_back(x);
}

// s -> p_plain from a CSV written by the cdf command.
std::vector<std::pair<double, double>> read_reference(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open reference file " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + ": empty reference file");
    auto split = [](const std::string& l) {
        std::vector<std::string> f;
        std::stringstream ss(l);
        for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
        return f;
    };
    const auto header = split(line);
    const auto col = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ConfigError(path + ": missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t cs = col("s"), cp = col("p_plain");
    std::vector<std::pair<double, double>> out;
    for (int row = 2; std::getline(in, line); ++row) {
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() <= std::max(cs, cp)) throw ConfigError(path + ": line " + std::to_string(row) + " is short");
        const auto v = parse_numbers({f[cs], f[cp]}, "reference");
        out.emplace_back(v[0], v[1]);
    }
    return out;
}

Table cmd_cdf(const Options& o) {
    const Setup st = setup(o);
    const auto thresholds = parse_numbers(o.s, "--s");
    if (thresholds.empty()) throw ConfigError("cdf needs at least one threshold (--s)");
    const int n = st.engine.depth;
    const bool extrap_defined = alpha_is_optimal(st);

    std::vector<std::pair<double, double>> reference;
    if (!o.reference.empty()) reference = read_reference(o.reference);

    Table t;
    t.columns = {"s", "p_plain", "p_extrapolated", "evaluations", "lebesgue_residual", "shell_halfwidth", "seconds"};
    if (o.levels)
        for (int m = 1; m <= n; ++m) t.columns.push_back("level_" + std::to_string(m));
    if (!reference.empty()) t.columns.insert(t.columns.end(), {"reference", "diff_plain", "diff_extrapolated"});

    for (double s : thresholds) {
        const auto start = std::chrono::steady_clock::now();
        const AepResult r = aep_run(st.cfg.model, s, st.engine);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        add_warnings(t, r.warnings);
        const double plain = r.plain(n);
        const double extrap = extrap_defined ? r.extrapolated_at(n) : std::nan("");
        std::vector<Cell> row{num(s),
                              num(plain),
                              extrap_defined ? num(extrap) : text("na"),
                              integer(r.evaluations),
                              num(r.lebesgue_residual),
                              num(r.shell_halfwidth),
                              o.no_timing ? num(0.0) : num(secs)};
        if (o.levels)
            for (double v : r.per_level) row.push_back(num(v));
        if (!reference.empty()) {
            auto it = std::find_if(reference.begin(), reference.end(), [&](const auto& p) {
                return std::fabs(p.first - s) <= 1e-12 * std::max(1.0, std::fabs(s));
            });
            if (it == reference.end()) throw ConfigError("reference file has no row for s = " + num(s).text);
            row.push_back(num(it->second));
            row.push_back(num(plain - it->second));
            row.push_back(extrap_defined ? num(extrap - it->second) : text("na"));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table cmd_table(const Options& o) {
    const Setup st = setup(o);
    const auto thresholds = parse_numbers(o.s, "--s");
    if (thresholds.empty()) throw ConfigError("table needs at least one threshold (--s)");
    const int n = st.engine.depth;
    const bool extrap_defined = alpha_is_optimal(st);
    Table t;
    t.columns = {"s", "n", "p_plain", "p_extrapolated", "diff_plain", "diff_extrapolated", "evaluations"};
    const int d = st.cfg.model.dimension();
    for (double s : thresholds) {
        const AepResult r = aep_run(st.cfg.model, s, st.engine);
        add_warnings(t, r.warnings);
        const double ref = r.plain(n);
        for (int m = 1; m <= n; ++m) {
            const double plain = r.plain(m);
            std::vector<Cell> row{num(s), integer(static_cast<std::uint64_t>(m)), num(plain)};
            if (extrap_defined) {
                const double e = r.extrapolated_at(m);
                row.insert(row.end(), {num(e), num(plain - ref), num(e - ref)});
            } else {
                row.insert(row.end(), {text("na"), num(plain - ref), text("na")});
            }
            // Nominal count at the optimal alpha; zero below the support.
            if (!extrap_defined)
                row.push_back(text("na"));
            else
                row.push_back(integer(r.evaluations > 0 ? evaluation_count(d, m) : 0));
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

Table cmd_var(const Options& o) {
    const Setup st = setup(o);
    const auto levels = parse_numbers(o.level, "--level");
    if (levels.empty()) throw ConfigError("var needs at least one level (--level)");
    for (double p : levels)
        if (!(p > 0.0 && p < 1.0)) throw ConfigError("--level values must lie strictly inside (0,1)");
    Table t;
    t.columns = {"level", "var", "s_low", "s_high", "cdf", "leaf_magnitude", "engine_runs"};
    for (double p : levels) {
        const VarRequest req{.model = st.cfg.model,
                             .level = p,
                             .depth = st.engine.depth,
                             .tolerance = o.tolerance,
                             .bracket_hint = std::nullopt,
                             .engine = st.engine,
                             .extrapolate = st.engine.extrapolate};
        const VarRange range = var_range(req);
        add_warnings(t, range.center.warnings);
        t.rows.push_back({num(p), num(range.center.value), num(range.low), num(range.high), num(range.center.cdf),
                          num(range.center.leaf_magnitude),
                          integer(static_cast<std::uint64_t>(range.center.engine_runs))});
    }
    return t;
}

struct CheckOutcome {
    Table table;
    bool failed = false;
};

CheckOutcome cmd_check(const Options& o) {
    const Setup st = setup(o);
    const auto thresholds = parse_numbers(o.s, "--s");
    if (thresholds.empty()) throw ConfigError("check needs at least one threshold (--s)");
    const JointModel& model = st.cfg.model;
    const int d = model.dimension();
    const Copula& c = model.copula();
    const bool independent = c.kind() == Copula::Kind::Independence ||
                             (c.kind() == Copula::Kind::Gumbel && c.parameter() == 1.0);
    const bool comonotone = c.kind() == Copula::Kind::Comonotone;

    CheckOutcome res;
    Table& t = res.table;
    t.columns = {"s", "aep", "mc", "mc_se", "mc_flag", "oracle", "oracle_kind", "oracle_flag", "note"};

    std::vector<McEstimate> mc;
    std::string mc_note;
    try {
        mc = mc_estimate_many(model, thresholds, o.samples, o.seed, o.workers);
    } catch (const CapabilityError& e) {
        mc_note = e.what();
    }

    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        const double s = thresholds[i];
        const AepResult r = aep_run(model, s, st.engine);
        add_warnings(t, r.warnings);
        std::vector<Cell> row{num(s), num(r.estimate)};
        std::string note = mc_note;
        if (!mc.empty()) {
            const McEstimate& m = mc[i];
            row.push_back(num(m.estimate));
            row.push_back(num(m.standard_error));
            // The binomial standard error degenerates near 0 and 1.
            if (m.estimate < 0.01 || m.estimate > 0.99) {
                row.push_back(text("skip"));
            } else {
                const bool ok = std::fabs(r.estimate - m.estimate) <= 3.0 * m.standard_error;
                res.failed = res.failed || !ok;
                row.push_back(flag(ok));
            }
        } else {
            row.insert(row.end(), {text("na"), text("na"), text("na")});
        }

        std::optional<double> oracle;
        std::string kind = "none";
        const double shifted = s - model.lower_bound_sum();
        try {
            if (independent && (d == 2 || d == 3)) {
                oracle = independent_convolution_oracle(model.marginals(), shifted);
                kind = "convolution";
            } else if (comonotone) {
                oracle = comonotone_oracle(model.marginals(), shifted);
                kind = "comonotone";
            }
        } catch (const CapabilityError& e) {
            note += (note.empty() ? "" : "; ") + std::string(e.what());
        }
        if (oracle) {
            const bool ok = std::fabs(r.estimate - *oracle) <= 1e-6;
            res.failed = res.failed || !ok;
            row.insert(row.end(), {num(*oracle), text(kind), flag(ok)});
        } else {
            row.insert(row.end(), {text("na"), text(kind), text("na")});
        }
        row.push_back(text(note));
        t.rows.push_back(std::move(row));
    }
    return res;
}

Table cmd_factors(const Options& o) {
    std::vector<int> dims = o.dims;
    if (dims.empty()) dims = {2, 3, 4, 5, 6, 7, 8, 9};
    Table t;
    t.columns = {"d", "alpha_star", "f_alpha_star", "f_alpha_star_value", "f_s", "f_star", "f_star_value", "rate"};
    for (int d : dims) {
        if (d < 2 || d > 9) throw ConfigError("factors: d must lie in 2..9");
        const RationalAlpha alpha = RationalAlpha::optimal(d);
        const ExactFactor f = volume_factor(d, alpha);
        const ExactFactor fs = extrap_factor(d);
        const auto count = child_count(d);
        Cell rate = text("na");
        if (fs.value < 1.0) rate = fixed4(std::log(fs.value) / std::log(static_cast<double>(count)));
        t.rows.push_back({integer(static_cast<std::uint64_t>(d)), text(alpha.str()), text(to_string(f.exact)),
                          fixed4(f.value), integer(static_cast<std::uint64_t>(count)), text(to_string(fs.exact)),
                          fixed4(fs.value), rate});
    }
    return t;
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return kExitUsage;
    return kExitEngine;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distribution function and value-at-risk of a sum of dependent random variables"};
    Options o;
    app.add_option("--config", o.config, "JSON model file");
    app.add_option("--command", o.command, "cdf | table | var | check | factors")
        ->required()
        ->check(CLI::IsMember({"cdf", "table", "var", "check", "factors"}));
    app.add_option("--s", o.s, "thresholds, comma separated")->delimiter(',');
    app.add_option("--level", o.level, "probability levels for var, comma separated")->delimiter(',');
    app.add_option("--d", o.dims, "dimensions for factors, comma separated")->delimiter(',');
    app.add_option("--n", o.n, "recursion depth");
    app.add_option("--alpha", o.alpha, "decomposition parameter as p/q");
    app.add_option("--strategy", o.strategy, "dfs | bfs")->check(CLI::IsMember({"dfs", "bfs"}));
    app.add_flag("--no-extrapolate", o.no_extrapolate, "use the plain estimator");
    app.add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--workers", o.workers, "worker threads");
    app.add_option("--seed", o.seed, "Monte Carlo seed");
    app.add_option("--samples", o.samples, "Monte Carlo sample count");
    app.add_option("--tolerance", o.tolerance, "relative s tolerance for var");
    app.add_option("--out", o.out, "write results here instead of stdout");
    app.add_flag("--levels", o.levels, "cdf: add the per-level partial sums");
    app.add_option("--reference", o.reference, "cdf: CSV from an earlier cdf run to difference against");
    app.add_option("--regen-fixtures", o.regen, "cdf: write a reference CSV (no timing) to this path");
    app.add_flag("--no-timing", o.no_timing, "write 0 in the seconds column");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        Table table;
        int code = kExitOk;
        std::string out_path = o.out;
        if (o.command == "cdf") {
            if (!o.regen.empty()) {
                o.no_timing = true;
                out_path = o.regen;
            }
            table = cmd_cdf(o);
        } else if (o.command == "table") {
            table = cmd_table(o);
        } else if (o.command == "var") {
            table = cmd_var(o);
        } else if (o.command == "check") {
            auto res = cmd_check(o);
            table = std::move(res.table);
            if (res.failed) code = kExitCheckFailed;
        } else {
            table = cmd_factors(o);
        }

        std::ofstream file;
        if (!out_path.empty()) {
            file.open(out_path);
            if (!file) throw ConfigError("cannot write " + out_path);
        }
        std::ostream& sink = out_path.empty() ? out : file;
        if (o.format == "json") {
            write_json(table, o.command, sink);
        } else {
            write_csv(table, sink);
            for (const auto& w : table.warnings) err << "warning: " << w << '\n';
        }
        return code;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return kExitEngine;
    }
}

}  // namespace aep
