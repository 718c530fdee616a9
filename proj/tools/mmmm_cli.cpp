// Command-line front end: single-query transient evaluation, the bundled
// reference experiments, and cross-method comparison reports.

#include "mmmm/mmmm.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;
using namespace mmmm;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int max_m_cap() {
    if (const char* env = std::getenv("MMMM_MAX_M")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<int>(v);
    }
    return 1000;
}

std::string fixed(double x, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, x);
    return buf;
}

std::string bound_4dp(double x) {
    return fixed(std::floor(x * 1e4 + 0.5) / 1e4, 4);
}

double round_significant(double x, int digits) {
    if (x == 0.0 || !std::isfinite(x)) return x;
    const double mag = std::floor(std::log10(std::abs(x)));
    const double factor = std::pow(10.0, digits - 1 - mag);
    return std::round(x * factor) / factor;
}

struct OutputTarget {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    void open(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw UsageError("cannot open output file: " + path);
        stream = &file;
    }
    std::ostream& out() { return *stream; }
};

struct CommonFlags {
    double lambda0 = 0.0;
    double mu = 0.0;
    int m = 1;
    std::string output = "json";
    int precision = 6;
    std::string out_path;
};

void add_param_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--lambda0", f.lambda0, "arrival rate")->required();
    cmd->add_option("--mu", f.mu, "service rate (1/alpha)")->required();
    cmd->add_option("--m", f.m, "server count")->required();
}

void add_output_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--output", f.output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--precision", f.precision, "printed decimal digits")
        ->check(CLI::Range(1, 17));
    cmd->add_option("--out", f.out_path, "write to a file instead of stdout");
}

SystemParamsd make_params(const CommonFlags& f) {
    if (!(f.lambda0 > 0)) throw UsageError("lambda0 must be > 0");
    if (!(f.mu > 0)) throw UsageError("mu must be > 0");
    if (f.m < 1) throw UsageError("m must be >= 1");
    if (f.m > max_m_cap())
        throw UsageError("m exceeds the cap (" + std::to_string(max_m_cap()) +
                         "); raise MMMM_MAX_M to override");
    return SystemParamsd::from_rates(f.lambda0, f.mu, f.m);
}

json params_json(const CommonFlags& f) {
    return json{{"lambda0", f.lambda0}, {"mu", f.mu}, {"m", f.m}};
}

json number_or_null(std::optional<double> v, int precision) {
    if (!v) return nullptr;
    return round_significant(*v, precision);
}

// ---------------------------------------------------------------- transient

struct TransientFlags : CommonFlags {
    double t = 0.0;
    int n0 = 0;
    std::string method;
    double tol = 1e-3;
    std::string regime_override;
    bool clamp_negative = false;
};

std::optional<double> asymptotic_point(const SystemParamsd& params, int n, double t, int n0,
                                       std::optional<RegimeTag> forced) {
    const RegimeTag tag = forced ? *forced : classify_regime(params, n, t, n0);
    try {
        switch (tag) {
            case RegimeTag::BLOCK0:
            case RegimeTag::BLOCK1:
                return blocking_probability(params, n0, t);
            default:
                return n0 == 0 ? knessl_p0(params, n, t, tag) : knessl_p1(params, n, t, tag);
        }
    } catch (const std::invalid_argument&) {
        return std::nullopt;  // inapplicable at this point
    }
}

int run_transient(const TransientFlags& f) {
    const SystemParamsd params = make_params(f);
    if (f.t < 0) throw UsageError("t must be >= 0");
    if (f.n0 < 0 || f.n0 > params.m) throw UsageError("n0 must lie in 0..m");

    std::optional<RegimeTag> forced;
    if (!f.regime_override.empty()) {
        forced = parse_regime_tag(f.regime_override);
        if (!forced) throw UsageError("unknown regime tag: " + f.regime_override);
    }

    std::vector<std::optional<double>> probs(params.m + 1);
    std::optional<double> bound;
    std::optional<TruncationReport<double>> truncation;
    std::string method_name = f.method;

    if (f.method == "exact") {
        if (params.m > 2) throw UsageError("method=exact requires m <= 2");
        const auto pt = params.m == 1 ? exact_m1(params, f.t) : exact_m2(params, f.t);
        for (int n = 0; n <= params.m; ++n) probs[n] = pt.matrix(f.n0, n);
    } else if (f.method == "series") {
        if (!(f.tol > 0)) throw UsageError("tol must be > 0");
        const auto report = choose_truncation(params, f.t, f.tol);
        const auto pt = truncated_expm(params, f.t, report.F, f.clamp_negative);
        for (int n = 0; n <= params.m; ++n) probs[n] = pt.matrix(f.n0, n);
        bound = report.error_bound;
        truncation = report;
    } else if (f.method == "oracle") {
        const auto dist = integrate(params, f.n0, f.t);
        for (int n = 0; n <= params.m; ++n) probs[n] = dist.probabilities(n);
    } else if (f.method == "asymptotic") {
        if (f.n0 != 0 && f.n0 != 1) throw UsageError("method=asymptotic requires n0 in {0,1}");
        if (!(params.rho() < 1)) throw UsageError("method=asymptotic requires rho0/m < 1");
        for (int n = 0; n <= params.m; ++n)
            probs[n] = asymptotic_point(params, n, f.t, f.n0, forced);
    } else if (f.method == "infinite") {
        if (f.n0 != 0 && f.n0 != 1) throw UsageError("method=infinite requires n0 in {0,1}");
        method_name = "infinite-server";
        for (int n = 0; n <= params.m; ++n)
            probs[n] = f.n0 == 0 ? p0n_inf(params, long(n), f.t)
                                 : (f.t > 0 ? std::optional<double>(p1n_inf(params, long(n), f.t))
                                            : std::optional<double>(n == 1 ? 1.0 : 0.0));
    } else {
        throw UsageError("unknown method: " + f.method);
    }

    OutputTarget target;
    target.open(f.out_path);
    if (f.output == "json") {
        json doc;
        doc["schema"] = "mmmm/1";
        doc["params"] = params_json(f);
        doc["n0"] = f.n0;
        doc["t"] = f.t;
        doc["method"] = method_name;
        json arr = json::array();
        for (const auto& v : probs) arr.push_back(number_or_null(v, f.precision));
        doc["probabilities"] = std::move(arr);
        doc["error_bound"] = number_or_null(bound, f.precision);
        if (truncation)
            doc["truncation"] = json{{"F", truncation->F},
                                     {"phi", truncation->phi},
                                     {"theta", truncation->theta}};
        else
            doc["truncation"] = nullptr;
        target.out() << doc.dump() << "\n";
    } else {
        target.out() << "n,probability\n";
        for (int n = 0; n <= params.m; ++n)
            target.out() << n << ","
                         << (probs[n] ? fixed(*probs[n], f.precision) : std::string()) << "\n";
    }
    return kExitOk;
}

// --------------------------------------------------------------- experiment

struct ExperimentFlags : CommonFlags {
    std::string table;
    int case_index = 1;
    std::optional<double> lambda0_override;
};

int run_experiment(const ExperimentFlags& f) {
    if (f.table.size() != 1) throw UsageError("table must be one of A, B, C, D, E");
    const auto table = parse_experiment_table(f.table[0]);
    if (!table) throw UsageError("table must be one of A, B, C, D, E");

    OutputTarget target;
    target.open(f.out_path);
    std::ostream& out = target.out();

    if (*table == ExperimentTable::A || *table == ExperimentTable::B ||
        *table == ExperimentTable::C) {
        const auto rows = run_truncation_experiment(*table);
        out << (*table == ExperimentTable::A ? "t" : "lambda0") << ",error_ub,F,phi,theta\n";
        for (const auto& row : rows)
            out << fixed(row.x, 1) << "," << bound_4dp(row.report.error_bound) << ","
                << row.report.F << "," << row.report.phi << "," << row.report.theta << "\n";
        return kExitOk;
    }

    ExperimentSpec spec{*table, f.case_index, f.lambda0_override};
    const auto cells = run_comparison_experiment(spec);
    const bool with_oracle = *table == ExperimentTable::E;
    out << "t,p_ij,exact,approximate" << (with_oracle ? ",oracle" : "") << "\n";
    for (const auto& c : cells) {
        out << fixed(c.t, 1) << ",P" << c.i << c.j << "," << fixed(c.exact_value, f.precision)
            << "," << fixed(c.approx_value, f.precision);
        if (with_oracle) out << "," << fixed(*c.oracle_value, f.precision);
        out << "\n";
    }
    return kExitOk;
}

// ------------------------------------------------------------------ compare

struct CompareFlags : CommonFlags {
    int n0 = 0;
    std::vector<double> t_grid;
    std::vector<int> n_grid;
    std::vector<std::string> methods;
    double tol = 1e-3;
};

int run_compare(const CompareFlags& f) {
    const SystemParamsd params = make_params(f);
    if (f.n0 < 0 || f.n0 > params.m) throw UsageError("n0 must lie in 0..m");
    if (f.t_grid.empty() || f.n_grid.empty()) throw UsageError("t and n grids must be nonempty");
    if (f.methods.empty()) throw UsageError("methods list must be nonempty");
    for (const auto& m : f.methods)
        if (m != "exact" && m != "series" && m != "oracle" && m != "asymptotic" &&
            m != "infinite")
            throw UsageError("unknown method: " + m);
    for (int n : f.n_grid)
        if (n < 0 || n > params.m) throw UsageError("grid state outside 0..m");
    for (double t : f.t_grid)
        if (t < 0) throw UsageError("grid time must be >= 0");

    struct Column {
        std::string name;
        std::map<std::pair<int, int>, std::optional<double>> cells;  // key: (t index, n)
    };
    std::vector<Column> columns;
    for (const auto& name : f.methods)
        if (name != "oracle") columns.push_back({name, {}});

    // oracle is the reference for every deviation column
    std::vector<TransientDistributiond> oracle_rows;
    oracle_rows.reserve(f.t_grid.size());
    for (double t : f.t_grid) oracle_rows.push_back(integrate(params, f.n0, t));

    std::map<int, TransitionMatrixd> exact_by_t, series_by_t;
    std::map<int, TruncationReport<double>> report_by_t;
    for (auto& col : columns) {
        for (size_t ti = 0; ti < f.t_grid.size(); ++ti) {
            const double t = f.t_grid[ti];
            for (int n : f.n_grid) {
                std::optional<double> value;
                try {
                    if (col.name == "exact") {
                        if (params.m <= 2) {
                            auto it = exact_by_t.find(int(ti));
                            if (it == exact_by_t.end())
                                it = exact_by_t
                                         .emplace(int(ti), params.m == 1 ? exact_m1(params, t)
                                                                         : exact_m2(params, t))
                                         .first;
                            value = it->second.matrix(f.n0, n);
                        }
                    } else if (col.name == "series") {
                        auto it = series_by_t.find(int(ti));
                        if (it == series_by_t.end()) {
                            const auto report = choose_truncation(params, t, f.tol);
                            report_by_t.emplace(int(ti), report);
                            it = series_by_t.emplace(int(ti), truncated_expm(params, t, report.F))
                                     .first;
                        }
                        value = it->second.matrix(f.n0, n);
                    } else if (col.name == "asymptotic") {
                        if ((f.n0 == 0 || f.n0 == 1) && params.rho() < 1)
                            value = asymptotic_point(params, n, t, f.n0, std::nullopt);
                    } else if (col.name == "infinite") {
                        if (f.n0 == 0)
                            value = p0n_inf(params, long(n), t);
                        else if (f.n0 == 1 && t > 0)
                            value = p1n_inf(params, long(n), t);
                    }
                } catch (const std::invalid_argument&) {
                } catch (const std::domain_error&) {
                }
                col.cells[{int(ti), n}] = value;
            }
        }
    }

    const bool want_regime = f.n0 == 0 || f.n0 == 1;
    const bool want_bound = !report_by_t.empty();

    OutputTarget target;
    target.open(f.out_path);
    std::ostream& out = target.out();

    auto row_json = [&](size_t ti, int n) {
        const double t = f.t_grid[ti];
        const double oracle = oracle_rows[ti].probabilities(n);
        json row;
        row["n"] = n;
        row["t"] = t;
        if (want_regime) row["regime"] = to_string(classify_regime(params, n, t, f.n0));
        row["oracle"] = round_significant(oracle, f.precision);
        for (const auto& col : columns) {
            const auto v = col.cells.at({int(ti), n});
            row[col.name] = number_or_null(v, f.precision);
            row[col.name + "_abs_dev"] =
                v ? json(round_significant(std::abs(*v - oracle), f.precision)) : json(nullptr);
            row[col.name + "_rel_dev"] =
                v && oracle != 0
                    ? json(round_significant(std::abs(*v - oracle) / std::abs(oracle), f.precision))
                    : json(nullptr);
        }
        if (want_bound) {
            auto it = report_by_t.find(int(ti));
            row["series_bound"] = it != report_by_t.end()
                                      ? json(round_significant(it->second.error_bound, f.precision))
                                      : json(nullptr);
        }
        return row;
    };

    if (f.output == "json") {
        json rows = json::array();
        for (size_t ti = 0; ti < f.t_grid.size(); ++ti)
            for (int n : f.n_grid) rows.push_back(row_json(ti, n));
        out << rows.dump() << "\n";
        return kExitOk;
    }

    out << "n,t";
    if (want_regime) out << ",regime";
    out << ",oracle";
    for (const auto& col : columns)
        out << "," << col.name << "," << col.name << "_abs_dev," << col.name << "_rel_dev";
    if (want_bound) out << ",series_bound";
    out << "\n";
    for (size_t ti = 0; ti < f.t_grid.size(); ++ti)
        for (int n : f.n_grid) {
            const double t = f.t_grid[ti];
            const double oracle = oracle_rows[ti].probabilities(n);
            out << n << "," << fixed(t, f.precision);
            if (want_regime) out << "," << to_string(classify_regime(params, n, t, f.n0));
            out << "," << fixed(oracle, f.precision);
            for (const auto& col : columns) {
                const auto v = col.cells.at({int(ti), n});
                if (v) {
                    char abs_buf[64], rel_buf[64];
                    std::snprintf(abs_buf, sizeof abs_buf, "%.*g", f.precision,
                                  std::abs(*v - oracle));
                    std::snprintf(rel_buf, sizeof rel_buf, "%.*g", f.precision,
                                  oracle != 0 ? std::abs(*v - oracle) / std::abs(oracle) : 0.0);
                    out << "," << fixed(*v, f.precision) << "," << abs_buf << ","
                        << (oracle != 0 ? rel_buf : "");
                } else {
                    out << ",,,";
                }
            }
            if (want_bound) {
                auto it = report_by_t.find(int(ti));
                char buf[64];
                if (it != report_by_t.end()) {
                    std::snprintf(buf, sizeof buf, "%.*g", f.precision, it->second.error_bound);
                    out << "," << buf;
                } else {
                    out << ",";
                }
            }
            out << "\n";
        }
    return kExitOk;
}

// --------------------------------------------------------------- stationary

int run_stationary(const CommonFlags& f) {
    const SystemParamsd params = make_params(f);
    const auto pi = stationary(params);

    OutputTarget target;
    target.open(f.out_path);
    if (f.output == "json") {
        json doc;
        doc["schema"] = "mmmm/1";
        doc["params"] = params_json(f);
        doc["method"] = "stationary";
        json arr = json::array();
        for (int n = 0; n <= params.m; ++n)
            arr.push_back(round_significant(pi(n), f.precision));
        doc["probabilities"] = std::move(arr);
        doc["erlang_b"] = round_significant(erlang_b(params), f.precision);
        target.out() << doc.dump() << "\n";
    } else {
        target.out() << "n,probability\n";
        for (int n = 0; n <= params.m; ++n)
            target.out() << n << "," << fixed(pi(n), f.precision) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transient analysis of the M|M|m|m loss system"};
    app.require_subcommand(1);

    TransientFlags tf;
    auto* transient = app.add_subcommand("transient", "occupancy distribution at one time point");
    add_param_flags(transient, tf);
    transient->add_option("--t", tf.t, "time")->required();
    transient->add_option("--n0", tf.n0, "initial occupancy")->required();
    transient->add_option("--method", tf.method, "exact|series|oracle|asymptotic|infinite")
        ->required();
    transient->add_option("--tol", tf.tol, "series error tolerance");
    transient->add_option("--case", tf.regime_override, "force an asymptotic regime tag");
    transient->add_flag("--clamp-negative", tf.clamp_negative,
                        "clamp negative series entries to zero");
    add_output_flags(transient, tf);

    ExperimentFlags ef;
    auto* experiment = app.add_subcommand("experiment", "reproduce a bundled reference table");
    experiment->add_option("--table", ef.table, "A|B|C|D|E")->required();
    experiment->add_option("--case", ef.case_index, "case index for tables D and E");
    double lambda0_override = 0.0;
    auto* override_opt =
        experiment->add_option("--lambda0", lambda0_override, "override the case arrival rate");
    add_output_flags(experiment, ef);

    CompareFlags cf;
    auto* compare = app.add_subcommand("compare", "cross-method comparison over a grid");
    add_param_flags(compare, cf);
    compare->add_option("--n0", cf.n0, "initial occupancy")->required();
    compare->add_option("--t", cf.t_grid, "time grid")->required()->expected(-1);
    compare->add_option("--n", cf.n_grid, "state grid")->required()->expected(-1);
    compare->add_option("--methods", cf.methods, "methods to evaluate")->required()->expected(-1);
    compare->add_option("--tol", cf.tol, "series error tolerance");
    add_output_flags(compare, cf);

    CommonFlags sf;
    auto* stationary_cmd = app.add_subcommand("stationary", "stationary distribution and Erlang B");
    add_param_flags(stationary_cmd, sf);
    add_output_flags(stationary_cmd, sf);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*transient) return run_transient(tf);
        if (*experiment) {
            if (override_opt->count() > 0) ef.lambda0_override = lambda0_override;
            return run_experiment(ef);
        }
        if (*compare) return run_compare(cf);
        if (*stationary_cmd) return run_stationary(sf);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const OracleError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const TruncationCapExceeded& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
