// emtest — command-line front end for the penalized EM-test.
//
// Subcommands:
//   test       run the homogeneity test on a column of scores
//   simulate   Monte Carlo rejection rate of the test
//   calibrate  penalty-calibration experiment and regression
//
// Machine output goes to stdout only; progress and errors go to stderr.
// Exit codes: 0 success, 2 flag misuse, 3 unusable input data.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "emtest.h"
#include "score_io.hpp"

#include "../src/errors.hpp"

namespace {

using emtest::cli::format_significant;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// RAII for the C-API handles.
struct ConfigHandle {
    emtest_config* ptr = emtest_config_new();
    ~ConfigHandle() { emtest_config_free(ptr); }
    ConfigHandle() = default;
    ConfigHandle(const ConfigHandle&) = delete;
    ConfigHandle& operator=(const ConfigHandle&) = delete;
};

struct ResultHandle {
    emtest_result* ptr = nullptr;
    ~ResultHandle() { emtest_result_free(ptr); }
};

struct CalibrationHandle {
    emtest_calibration* ptr = nullptr;
    ~CalibrationHandle() { emtest_calibration_free(ptr); }
};

// Map a C-API status to the right exit path: argument/domain problems are
// flag misuse, data problems are ingestion failures.
void check_status(emtest_status st, const std::string& what) {
    if (st == EMTEST_OK) return;
    std::string msg = what + ": " + emtest_status_message(st);
    if (st == EMTEST_ERROR_PARSE || st == EMTEST_ERROR_DEGENERATE_DATA) {
        throw emtest::degenerate_data_error(msg);
    }
    if (st == EMTEST_ERROR_NOMEM) {
        throw std::bad_alloc();
    }
    throw usage_error(msg);
}

// Shortest lossless rendering of a double (used for JSON-ish level keys).
std::string shortest(double v) {
    return ordered_json(v).dump();
}

std::vector<double> expand_a_grid(const std::string& text) {
    std::vector<double> out;
    auto parse_one = [](const std::string& tok) {
        try {
            std::size_t pos = 0;
            double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            throw usage_error("--a-grid: cannot parse '" + tok + "'");
        }
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ':')) parts.push_back(tok);
        if (parts.size() != 3) {
            throw usage_error("--a-grid range must be start:stop:step");
        }
        double start = parse_one(parts[0]);
        double stop = parse_one(parts[1]);
        double step = parse_one(parts[2]);
        if (!(step > 0.0) || stop < start) {
            throw usage_error("--a-grid range needs step > 0 and stop >= start");
        }
        for (int i = 0;; ++i) {
            double v = start + i * step;
            if (v > stop + 0.5 * step) break;
            out.push_back(v);
        }
    } else {
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) out.push_back(parse_one(tok));
        }
    }
    if (out.empty()) throw usage_error("--a-grid: empty grid");
    return out;
}

// ------------------------------------------------------------------
// test subcommand
// ------------------------------------------------------------------

struct TestOptions {
    std::string input = "-";
    std::string input_format = "plain";
    std::string column;
    bool from_t = false;
    int df = 100;
    std::vector<double> alpha_grid;
    unsigned iterations = 0; // 0: default
    double a_n = 0.0;        // 0: default
    std::vector<double> levels;
    std::string format = "text";
    std::uint64_t seed = 0; // accepted for pipeline symmetry; unused
};

int run_test(const TestOptions& opt) {
    std::string raw = emtest::cli::read_input(opt.input);
    std::string digest = emtest::cli::fnv1a_digest(raw);
    emtest::cli::ScoreFormat fmt = opt.input_format == "csv"
                                       ? emtest::cli::ScoreFormat::csv
                                       : emtest::cli::ScoreFormat::plain;
    emtest::cli::ScoreColumn col =
        emtest::cli::parse_scores(raw, fmt, opt.column);

    std::vector<std::string> warnings;
    if (opt.from_t) {
        std::size_t clamped_count = 0;
        for (double& v : col.values) {
            double z;
            int clamped = 0;
            check_status(emtest_t_to_z(v, opt.df, &z, &clamped),
                         "t-to-z transform");
            if (clamped) ++clamped_count;
            v = z;
        }
        if (clamped_count > 0) {
            warnings.push_back(
                std::to_string(clamped_count) +
                " t value(s) saturated the t CDF in floating point; "
                "their z-scores were clamped");
        }
    }

    ConfigHandle cfg;
    if (!cfg.ptr) throw std::bad_alloc();
    if (!opt.alpha_grid.empty()) {
        check_status(emtest_config_set_alpha_grid(cfg.ptr,
                                                  opt.alpha_grid.data(),
                                                  opt.alpha_grid.size()),
                     "--alpha-grid");
    }
    if (opt.iterations > 0) {
        check_status(emtest_config_set_iterations(cfg.ptr, opt.iterations),
                     "--iterations");
    }
    if (opt.a_n > 0.0) {
        check_status(emtest_config_set_a_n(cfg.ptr, opt.a_n), "--a-n");
    }
    for (double lv : opt.levels) {
        if (!(lv > 0.0) || !(lv < 1.0)) {
            throw usage_error("--level must lie strictly in (0,1)");
        }
    }

    ResultHandle res;
    check_status(emtest_run(col.values.data(), col.values.size(), cfg.ptr,
                            &res.ptr),
                 "test");

    const double statistic = emtest_result_statistic(res.ptr);
    const double shift = emtest_result_shift(res.ptr);
    const double p_value = emtest_result_p_value(res.ptr);
    const double a_n = emtest_result_a_n(res.ptr);
    const double sigma0_sq = emtest_result_sigma0_sq(res.ptr);
    const unsigned k = emtest_result_iterations(res.ptr);
    const emtest_fit fit = emtest_result_fit(res.ptr);
    const std::size_t n = emtest_result_n(res.ptr);

    std::ostringstream out;
    if (opt.format == "json") {
        ordered_json doc;
        doc["n"] = n;
        doc["statistic"] = statistic;
        doc["shift"] = shift;
        doc["p_value"] = p_value;
        doc["a_n"] = a_n;
        doc["sigma0_sq"] = sigma0_sq;
        {
            ordered_json grid = ordered_json::array();
            std::size_t traces = emtest_result_trace_count(res.ptr);
            for (std::size_t t = 0; t < traces; ++t) {
                double alpha;
                check_status(emtest_result_trace_alpha(res.ptr, t, &alpha),
                             "trace");
                grid.push_back(alpha);
            }
            doc["alpha_grid"] = grid;
        }
        doc["K"] = k;
        doc["fit"] = {{"alpha", fit.alpha},
                      {"mu", fit.mu},
                      {"sigma1", fit.sigma1},
                      {"sigma2", fit.sigma2}};
        {
            ordered_json traces = ordered_json::array();
            std::size_t count = emtest_result_trace_count(res.ptr);
            for (std::size_t t = 0; t < count; ++t) {
                double alpha;
                int tied;
                check_status(emtest_result_trace_alpha(res.ptr, t, &alpha),
                             "trace");
                check_status(emtest_result_trace_tied(res.ptr, t, &tied),
                             "trace");
                ordered_json steps = ordered_json::array();
                for (std::size_t s = 0; s < k; ++s) {
                    emtest_trace_step step;
                    check_status(
                        emtest_result_trace_step(res.ptr, t, s, &step),
                        "trace");
                    steps.push_back({{"alpha", step.alpha},
                                     {"mu", step.mu},
                                     {"sigma1", step.sigma1},
                                     {"sigma2", step.sigma2},
                                     {"pl", step.pl},
                                     {"statistic", step.statistic}});
                }
                traces.push_back({{"alpha", alpha},
                                  {"tied", tied != 0},
                                  {"steps", std::move(steps)}});
            }
            doc["traces"] = std::move(traces);
        }
        {
            ordered_json decisions = ordered_json::object();
            for (double lv : opt.levels) {
                decisions[shortest(lv)] = (p_value < lv);
            }
            doc["decisions"] = std::move(decisions);
        }
        doc["version"] = emtest_version();
        doc["input_digest"] = digest;
        doc["warnings"] = warnings;
        out << doc.dump(2) << '\n';
    } else {
        auto f4 = [](double v) { return format_significant(v, 4); };
        out << "n           " << n << '\n'
            << "a_n         " << f4(a_n) << '\n'
            << "sigma0^2    " << f4(sigma0_sq) << '\n'
            << "statistic   " << f4(statistic) << '\n'
            << "shift       " << f4(shift) << '\n'
            << "p-value     " << f4(p_value) << '\n'
            << "fit         " << f4(1.0 - fit.alpha) << " N(0, " << f4(fit.sigma1)
            << "^2) + " << f4(fit.alpha) << " N(" << f4(fit.mu) << ", "
            << f4(fit.sigma2) << "^2)" << '\n';
        for (double lv : opt.levels) {
            out << "decision    " << (p_value < lv ? "reject" : "retain")
                << " homogeneity at level " << f4(lv) << '\n';
        }
        for (const std::string& w : warnings) {
            out << "warning     " << w << '\n';
        }
    }
    std::cout << out.str();
    return 0;
}

// ------------------------------------------------------------------
// simulate subcommand
// ------------------------------------------------------------------

struct SimulateOptions {
    std::uint64_t n = 0;
    std::uint64_t reps = 10000;
    double level = 0.05;
    std::uint64_t seed = 0;
    bool null_kind = false;
    bool mixture_kind = false;
    double sigma = 1.0;
    double alpha = 0.0;
    double mu = 0.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    std::vector<double> alpha_grid;
    unsigned iterations = 0;
    double a_n = 0.0;
    std::string format = "csv";
};

int run_simulate(const SimulateOptions& opt) {
    if (opt.null_kind == opt.mixture_kind) {
        throw usage_error("choose exactly one of --null or --mixture");
    }
    emtest_sim_spec spec{};
    spec.mixture = opt.mixture_kind ? 1 : 0;
    spec.null_sigma = opt.sigma;
    spec.alpha = opt.alpha;
    spec.mu = opt.mu;
    spec.sigma1 = opt.sigma1;
    spec.sigma2 = opt.sigma2;

    ConfigHandle cfg;
    if (!cfg.ptr) throw std::bad_alloc();
    if (!opt.alpha_grid.empty()) {
        check_status(emtest_config_set_alpha_grid(cfg.ptr,
                                                  opt.alpha_grid.data(),
                                                  opt.alpha_grid.size()),
                     "--alpha-grid");
    }
    if (opt.iterations > 0) {
        check_status(emtest_config_set_iterations(cfg.ptr, opt.iterations),
                     "--iterations");
    }
    if (opt.a_n > 0.0) {
        check_status(emtest_config_set_a_n(cfg.ptr, opt.a_n), "--a-n");
    }

    std::cerr << "simulate: " << (spec.mixture ? "mixture" : "null")
              << " n=" << opt.n << " reps=" << opt.reps
              << " level=" << opt.level << " seed=" << opt.seed << '\n';

    emtest_sim_result res{};
    check_status(emtest_simulate(&spec, opt.n, opt.reps, opt.level, cfg.ptr,
                                 opt.seed, &res),
                 "simulate");

    std::cerr << "simulate: done in " << format_significant(res.elapsed_seconds, 4)
              << "s\n";

    std::ostringstream out;
    const char* kind = spec.mixture ? "mixture" : "null";
    if (opt.format == "json") {
        ordered_json doc;
        doc["spec"] = {{"kind", kind},
                       {"null_sigma", spec.null_sigma},
                       {"alpha", spec.alpha},
                       {"mu", spec.mu},
                       {"sigma1", spec.sigma1},
                       {"sigma2", spec.sigma2}};
        doc["n"] = opt.n;
        doc["reps"] = res.reps;
        doc["level"] = opt.level;
        doc["rejections"] = res.rejections;
        doc["rate"] = res.rate;
        doc["mc_stderr"] = res.mc_stderr;
        doc["seed"] = res.seed;
        doc["elapsed_seconds"] = res.elapsed_seconds;
        doc["version"] = emtest_version();
        out << doc.dump(2) << '\n';
    } else if (opt.format == "text") {
        auto f4 = [](double v) { return format_significant(v, 4); };
        out << "kind        " << kind << '\n';
        if (spec.mixture) {
            out << "model       " << f4(1.0 - spec.alpha) << " N(0, "
                << f4(spec.sigma1) << "^2) + " << f4(spec.alpha) << " N("
                << f4(spec.mu) << ", " << f4(spec.sigma2) << "^2)" << '\n';
        } else {
            out << "model       N(0, " << f4(spec.null_sigma) << "^2)" << '\n';
        }
        out << "n           " << opt.n << '\n'
            << "reps        " << res.reps << '\n'
            << "level       " << f4(opt.level) << '\n'
            << "rejections  " << res.rejections << '\n'
            << "rate        " << f4(res.rate) << '\n'
            << "mc_stderr   " << f4(res.mc_stderr) << '\n'
            << "seed        " << res.seed << '\n';
    } else {
        out << "kind,null_sigma,alpha,mu,sigma1,sigma2,n,reps,level,rate,"
               "mc_stderr,seed\n";
        out << kind << ',' << shortest(spec.null_sigma) << ','
            << shortest(spec.alpha) << ',' << shortest(spec.mu) << ','
            << shortest(spec.sigma1) << ',' << shortest(spec.sigma2) << ','
            << opt.n << ',' << res.reps << ',' << shortest(opt.level) << ','
            << shortest(res.rate) << ',' << shortest(res.mc_stderr) << ','
            << res.seed << '\n';
    }
    std::cout << out.str();
    return 0;
}

// ------------------------------------------------------------------
// calibrate subcommand
// ------------------------------------------------------------------

struct CalibrateOptions {
    std::string a_grid_text = "1.6:4.0:0.2";
    std::vector<std::uint32_t> n_grid{500, 1000, 1500};
    std::uint64_t reps = 5000;
    double level = 0.05;
    std::uint64_t seed = 0;
    bool reference = false;
    std::string format = "csv";
};

int run_calibrate(const CalibrateOptions& opt) {
    CalibrationHandle cal;
    if (opt.reference) {
        std::cerr << "calibrate: bundled reference study\n";
        check_status(emtest_calibration_reference(&cal.ptr), "calibrate");
    } else {
        std::vector<double> a_grid = expand_a_grid(opt.a_grid_text);
        std::cerr << "calibrate: " << a_grid.size() << " x "
                  << opt.n_grid.size() << " cells, reps=" << opt.reps
                  << " level=" << opt.level << " seed=" << opt.seed << '\n';
        check_status(emtest_calibrate(a_grid.data(), a_grid.size(),
                                      opt.n_grid.data(), opt.n_grid.size(),
                                      opt.reps, opt.level, opt.seed,
                                      &cal.ptr),
                     "calibrate");
        std::cerr << "calibrate: done\n";
    }

    std::size_t cells = emtest_calibration_cell_count(cal.ptr);
    emtest_regression reg{};
    check_status(emtest_calibration_regression(cal.ptr, &reg), "calibrate");

    std::ostringstream out;
    auto f4 = [](double v) { return format_significant(v, 4); };
    if (opt.format == "json") {
        ordered_json doc;
        ordered_json rows = ordered_json::array();
        for (std::size_t i = 0; i < cells; ++i) {
            emtest_calibration_cell c{};
            check_status(emtest_calibration_cell_at(cal.ptr, i, &c), "cell");
            rows.push_back({{"a_n", c.a_n},
                            {"n", c.n},
                            {"rate", c.rate},
                            {"y", c.y}});
        }
        doc["cells"] = std::move(rows);
        doc["regression"] = {{"b0", reg.b0},
                             {"b1", reg.b1},
                             {"b2", reg.b2},
                             {"adjusted_r2", reg.adjusted_r2},
                             {"formula_c0", reg.formula_c0},
                             {"formula_c1", reg.formula_c1}};
        doc["version"] = emtest_version();
        out << doc.dump(2) << '\n';
    } else if (opt.format == "text") {
        // Discrepancy matrix with one row per sample size, one column per
        // penalty level.
        std::vector<emtest_calibration_cell> all(cells);
        for (std::size_t i = 0; i < cells; ++i) {
            check_status(emtest_calibration_cell_at(cal.ptr, i, &all[i]),
                         "cell");
        }
        std::vector<double> a_values;
        std::vector<std::uint32_t> n_values;
        for (const auto& c : all) {
            if (a_values.empty() || a_values.back() != c.a_n) {
                bool seen = false;
                for (double a : a_values) seen = seen || a == c.a_n;
                if (!seen) a_values.push_back(c.a_n);
            }
            bool seen = false;
            for (std::uint32_t nv : n_values) seen = seen || nv == c.n;
            if (!seen) n_values.push_back(c.n);
        }
        out << "discrepancy y by sample size (rows) and penalty level a_n "
               "(columns)\n";
        out << "n\\a_n";
        for (double a : a_values) out << '\t' << f4(a);
        out << '\n';
        for (std::uint32_t nv : n_values) {
            out << nv;
            for (double a : a_values) {
                for (const auto& c : all) {
                    if (c.n == nv && c.a_n == a) {
                        out << '\t' << f4(c.y);
                        break;
                    }
                }
            }
            out << '\n';
        }
        out << '\n'
            << "regression  y = b0 + b1/n + b2*log(a_n - 1.4)\n"
            << "b0          " << f4(reg.b0) << '\n'
            << "b1          " << f4(reg.b1) << '\n'
            << "b2          " << f4(reg.b2) << '\n'
            << "adjusted R2 " << f4(reg.adjusted_r2) << '\n'
            << "formula     a_n = exp(" << f4(reg.formula_c0) << " + ("
            << f4(reg.formula_c1) << ")/n) + 1.4\n";
    } else {
        out << "a_n,n,rate,y\n";
        for (std::size_t i = 0; i < cells; ++i) {
            emtest_calibration_cell c{};
            check_status(emtest_calibration_cell_at(cal.ptr, i, &c), "cell");
            out << shortest(c.a_n) << ',' << c.n << ',' << shortest(c.rate)
                << ',' << shortest(c.y) << '\n';
        }
        out << "# regression y = b0 + b1/n + b2*log(a_n - 1.4)\n"
            << "# b0 " << shortest(reg.b0) << '\n'
            << "# b1 " << shortest(reg.b1) << '\n'
            << "# b2 " << shortest(reg.b2) << '\n'
            << "# adjusted_r2 " << shortest(reg.adjusted_r2) << '\n'
            << "# formula a_n = exp(" << shortest(reg.formula_c0) << " + ("
            << shortest(reg.formula_c1) << ")/n) + 1.4\n";
    }
    std::cout << out.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Penalized EM-test for homogeneity in a heteroscedastic "
                 "contaminated normal mixture"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(emtest_version()));
    app.footer("Environment: EMTEST_THREADS caps simulation worker threads "
               "(default: hardware concurrency).");

    TestOptions t;
    CLI::App* test = app.add_subcommand(
        "test", "Run the EM-test for homogeneity on a column of scores");
    test->add_option("input", t.input,
                     "Score file, or '-' for standard input (default)");
    test->add_option("--input-format", t.input_format,
                     "Input layout: plain (one value per line, '#' comments) "
                     "or csv")
        ->check(CLI::IsMember({"plain", "csv"}));
    test->add_option("--column", t.column,
                     "CSV column to read: header name or 0-based index");
    test->add_flag("--from-t", t.from_t,
                   "Input holds t statistics; map each to a z-score through "
                   "the t CDF first");
    test->add_option("--df", t.df,
                     "Degrees of freedom for --from-t (default 100)")
        ->check(CLI::PositiveNumber);
    test->add_option("--alpha-grid", t.alpha_grid,
                     "Comma-separated grid of mixing proportions "
                     "(default 0.05,0.15,0.25)")
        ->delimiter(',');
    test->add_option("--iterations", t.iterations,
                     "EM iterations K after the profile stage (default 3)");
    test->add_option("--a-n", t.a_n,
                     "Penalty level override (default exp(1.747-843.681/n)+1.4)");
    test->add_option("--level", t.levels,
                     "Decision level; repeatable (default 0.05)")
        ->delimiter(',');
    test->add_option("--format", t.format, "Report format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    test->add_option("--seed", t.seed,
                     "Accepted for pipeline symmetry; the test itself is "
                     "deterministic");

    SimulateOptions s;
    CLI::App* sim = app.add_subcommand(
        "simulate", "Estimate the test's rejection rate by Monte Carlo");
    sim->add_option("--n", s.n, "Sample size per replication")
        ->required()
        ->check(CLI::PositiveNumber);
    sim->add_option("--reps", s.reps, "Replications (default 10000)")
        ->check(CLI::PositiveNumber);
    sim->add_option("--level", s.level, "Nominal level (default 0.05)");
    sim->add_option("--seed", s.seed, "Master RNG seed (default 0)");
    sim->add_flag("--null", s.null_kind, "Draw from the null N(0, sigma^2)");
    sim->add_option("--sigma", s.sigma,
                    "Null standard deviation (default 1)");
    sim->add_flag("--mixture", s.mixture_kind,
                  "Draw from (1-alpha) N(0, sigma1^2) + alpha N(mu, sigma2^2)");
    sim->add_option("--alpha", s.alpha, "Mixture contamination proportion");
    sim->add_option("--mu", s.mu, "Contaminant mean");
    sim->add_option("--sigma1", s.sigma1,
                    "Main component standard deviation (default 1)");
    sim->add_option("--sigma2", s.sigma2,
                    "Contaminant standard deviation (default 1)");
    sim->add_option("--alpha-grid", s.alpha_grid,
                    "Test configuration: mixing-proportion grid")
        ->delimiter(',');
    sim->add_option("--iterations", s.iterations,
                    "Test configuration: EM iterations K");
    sim->add_option("--a-n", s.a_n, "Test configuration: penalty override");
    sim->add_option("--format", s.format,
                    "Output format: csv (default), text, or json")
        ->check(CLI::IsMember({"csv", "text", "json"}));

    CalibrateOptions c;
    CLI::App* cal = app.add_subcommand(
        "calibrate",
        "Simulate null rejection rates over an (a_n, n) grid and fit the "
        "penalty calibration regression");
    cal->add_option("--a-grid", c.a_grid_text,
                    "Penalty grid: comma list or start:stop:step "
                    "(default 1.6:4.0:0.2)");
    cal->add_option("--n-grid", c.n_grid,
                    "Comma-separated sample sizes (default 500,1000,1500)")
        ->delimiter(',');
    cal->add_option("--reps", c.reps,
                    "Replications per cell (default 5000)")
        ->check(CLI::PositiveNumber);
    cal->add_option("--level", c.level, "Nominal level (default 0.05)");
    cal->add_option("--seed", c.seed, "Master RNG seed (default 0)");
    cal->add_flag("--reference", c.reference,
                  "Report the bundled reference study instead of simulating");
    cal->add_option("--format", c.format,
                    "Output format: csv (default), text, or json")
        ->check(CLI::IsMember({"csv", "text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help / --version
        }
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (t.levels.empty()) t.levels.push_back(0.05);
        if (test->parsed()) return run_test(t);
        if (sim->parsed()) return run_simulate(s);
        if (cal->parsed()) return run_calibrate(c);
        std::cerr << "emtest: no subcommand\n";
        return kExitUsage;
    } catch (const usage_error& e) {
        std::cerr << "emtest: " << e.what() << '\n';
        return kExitUsage;
    } catch (const emtest::parse_error& e) {
        std::cerr << "emtest: " << e.what() << '\n';
        return kExitData;
    } catch (const emtest::degenerate_data_error& e) {
        std::cerr << "emtest: " << e.what() << '\n';
        return kExitData;
    } catch (const std::bad_alloc&) {
        std::cerr << "emtest: out of memory\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "emtest: " << e.what() << '\n';
        return 1;
    }
}
