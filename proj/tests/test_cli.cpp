// Drives the installed command-line binary as a subprocess; the binary
// path arrives in the EMTEST_CLI environment variable.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "em_engine.hpp"
#include "sim_harness.hpp"
#include "special_dist.hpp"
#include "../tools/score_io.hpp"

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

const char* cli_path() {
    const char* p = std::getenv("EMTEST_CLI");
    REQUIRE_MESSAGE(p != nullptr, "EMTEST_CLI must point at the binary");
    return p;
}

CliRun run_cli(const std::string& args, const std::string& stdin_data = "") {
    static int counter = 0;
    fs::path base = fs::temp_directory_path() /
                    ("emtest_cli_t" + std::to_string(counter++));
    fs::path in = base.string() + ".in";
    fs::path out = base.string() + ".out";
    fs::path err = base.string() + ".err";
    spit(in, stdin_data);
    std::string cmd = std::string("'") + cli_path() + "' " + args + " < '" +
                      in.string() + "' > '" + out.string() + "' 2> '" +
                      err.string() + "'";
    int status = std::system(cmd.c_str());
    CliRun r;
    r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status)
                                                     : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    fs::remove(in);
    fs::remove(out);
    fs::remove(err);
    return r;
}

// A deterministic mildly-contaminated sample, written with full precision.
std::vector<double> demo_values(std::size_t n) {
    emtest::RngState rng(31, 7);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.next_normal();
        if (i % 11 == 0) x[i] = 1.5 + 1.3 * rng.next_normal();
    }
    return x;
}

std::string render(const std::vector<double>& vals) {
    std::ostringstream ss;
    char buf[64];
    for (double v : vals) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        ss << buf;
    }
    return ss.str();
}

fs::path write_temp(const std::string& content, const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("emtest_cli_" + tag + ".txt");
    spit(p, content);
    return p;
}

} // namespace

TEST_CASE("json report: schema, decisions, digest, and round-trip") {
    std::vector<double> vals = demo_values(60);
    std::string text = render(vals);
    fs::path file = write_temp(text, "schema");

    CliRun r = run_cli("test '" + file.string() +
                       "' --format json --level 0.05 --level 0.01");
    REQUIRE(r.exit_code == 0);
    ordered_json doc = ordered_json::parse(r.out);

    for (const char* key :
         {"n", "statistic", "shift", "p_value", "a_n", "sigma0_sq",
          "alpha_grid", "K", "fit", "traces", "decisions", "version",
          "input_digest", "warnings"}) {
        CHECK_MESSAGE(doc.contains(key), "missing key " << key);
    }
    CHECK(doc["n"] == 60);
    CHECK(doc["K"] == 3);
    CHECK(doc["alpha_grid"] == ordered_json({0.05, 0.15, 0.25}));
    CHECK(doc["version"] == "1.0.0");
    CHECK(doc["input_digest"] == emtest::cli::fnv1a_digest(text));
    CHECK(doc["warnings"].is_array());
    CHECK(doc["warnings"].empty());

    double p = doc["p_value"];
    REQUIRE(doc["decisions"].contains("0.05"));
    REQUIRE(doc["decisions"].contains("0.01"));
    CHECK(doc["decisions"]["0.05"] == (p < 0.05));
    CHECK(doc["decisions"]["0.01"] == (p < 0.01));

    // fitted model fields
    for (const char* key : {"alpha", "mu", "sigma1", "sigma2"}) {
        CHECK(doc["fit"].contains(key));
    }

    // trace block: one per grid point, K steps each; the winner's last
    // statistic is the reported statistic
    REQUIRE(doc["traces"].size() == 3);
    bool any_tied = false;
    for (const auto& tr : doc["traces"]) {
        REQUIRE(tr["steps"].size() == 3);
        if (tr["tied"] == true) {
            any_tied = true;
            CHECK(double(tr["steps"].back()["statistic"]) ==
                  double(doc["statistic"]));
        }
    }
    CHECK(any_tied);

    // round-trip: parse + re-serialize reproduces the document byte for byte
    CHECK(ordered_json::parse(r.out).dump(2) + "\n" == r.out);

    // the report matches the in-process computation exactly
    emtest::EmTestResult core = emtest::em_test(vals, {});
    CHECK(double(doc["statistic"]) == core.statistic);
    CHECK(double(doc["p_value"]) == core.p_value);
    CHECK(double(doc["sigma0_sq"]) == core.sigma0_sq);

    fs::remove(file);
}

TEST_CASE("text report shows the fitted mixture and decision") {
    fs::path file = write_temp(render(demo_values(60)), "text");
    CliRun r = run_cli("test '" + file.string() + "'");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("statistic") != std::string::npos);
    CHECK(r.out.find("p-value") != std::string::npos);
    CHECK(r.out.find("N(0, ") != std::string::npos);
    CHECK(r.out.find("decision") != std::string::npos);
    CHECK(r.out.find("homogeneity at level 0.05") != std::string::npos);
    fs::remove(file);
}

TEST_CASE("reports are identical across invocations and via stdin") {
    std::string text = render(demo_values(40));
    fs::path file = write_temp(text, "determ");
    CliRun a = run_cli("test '" + file.string() + "' --format json");
    CliRun b = run_cli("test '" + file.string() + "' --format json");
    CliRun c = run_cli("test - --format json", text);
    CliRun d = run_cli("test --format json", text); // default input is '-'
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    CHECK(a.out == d.out);
    fs::remove(file);
}

TEST_CASE("csv ingestion selects the requested column") {
    std::vector<double> vals = demo_values(30);
    std::ostringstream csv;
    csv << "id,z\n";
    char buf[64];
    for (std::size_t i = 0; i < vals.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, vals[i]);
        csv << buf;
    }
    fs::path file = write_temp(csv.str(), "csv");
    CliRun named = run_cli("test '" + file.string() +
                           "' --input-format csv --column z --format json");
    CliRun indexed = run_cli("test '" + file.string() +
                             "' --input-format csv --column 1 --format json");
    REQUIRE(named.exit_code == 0);
    REQUIRE(indexed.exit_code == 0);
    ordered_json a = ordered_json::parse(named.out);
    ordered_json b = ordered_json::parse(indexed.out);
    CHECK(double(a["statistic"]) == double(b["statistic"]));
    CHECK(a["n"] == 30);

    CliRun missing = run_cli("test '" + file.string() +
                             "' --input-format csv --column w");
    CHECK(missing.exit_code == 3);
    CHECK(missing.err.find("w") != std::string::npos);
    fs::remove(file);
}

TEST_CASE("the t-transform pipeline matches transforming up front") {
    // t values; the CLI maps them through the t CDF to z-scores
    std::vector<double> tvals = demo_values(40);
    for (double& v : tvals) v *= 1.1;

    // the same mapping computed in-process (identical call sequence)
    std::vector<double> zvals(tvals.size());
    for (std::size_t i = 0; i < tvals.size(); ++i) {
        double t = tvals[i];
        double tail = emtest::student_t_cdf(t < 0 ? t : -t, 100);
        double z = -emtest::normal_quantile(tail);
        zvals[i] = t < 0 ? -z : z;
    }

    fs::path tfile = write_temp(render(tvals), "tvals");
    fs::path zfile = write_temp(render(zvals), "zvals");
    CliRun from_t =
        run_cli("test '" + tfile.string() + "' --from-t --df 100 --format json");
    CliRun direct = run_cli("test '" + zfile.string() + "' --format json");
    REQUIRE(from_t.exit_code == 0);
    REQUIRE(direct.exit_code == 0);
    ordered_json a = ordered_json::parse(from_t.out);
    ordered_json b = ordered_json::parse(direct.out);
    CHECK(double(a["statistic"]) == double(b["statistic"]));
    CHECK(double(a["p_value"]) == double(b["p_value"]));
    CHECK(a["warnings"].empty());
    fs::remove(tfile);
    fs::remove(zfile);
}

TEST_CASE("extreme t values are clamped and the report says so") {
    std::vector<double> tvals = demo_values(20);
    tvals.push_back(1e308);
    fs::path file = write_temp(render(tvals), "textreme");
    CliRun r = run_cli("test '" + file.string() + "' --from-t --format json");
    REQUIRE(r.exit_code == 0);
    ordered_json doc = ordered_json::parse(r.out);
    REQUIRE(doc["warnings"].size() == 1);
    std::string w = doc["warnings"][0];
    CHECK(w.find("clamped") != std::string::npos);
    fs::remove(file);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run_cli("test --no-such-flag").exit_code == 2);
    CHECK(run_cli("bogus-subcommand").exit_code == 2);
    CHECK(run_cli("simulate --reps 5").exit_code == 2); // missing --n
    CHECK(run_cli("simulate --n 50 --reps 2 --null --mixture").exit_code == 2);
    CHECK(run_cli("simulate --n 50 --reps 2").exit_code == 2); // no kind
    CHECK(run_cli("test --input-format yaml", "1\n").exit_code == 2);
    CHECK(run_cli("test --format xml", "1\n").exit_code == 2);

    fs::path file = write_temp(render(demo_values(30)), "usage");
    CHECK(run_cli("test '" + file.string() + "' --level 1.5").exit_code == 2);
    CHECK(run_cli("test '" + file.string() + "' --alpha-grid 0.0,0.5")
              .exit_code == 2);
    fs::remove(file);
}

TEST_CASE("data errors exit 3 and leave stdout empty") {
    CliRun garbage = run_cli("test -", "1.0\nx2\n3.0\n");
    CHECK(garbage.exit_code == 3);
    CHECK(garbage.out.empty());
    CHECK(garbage.err.find("line 2") != std::string::npos);

    CliRun empty = run_cli("test -", "");
    CHECK(empty.exit_code == 3);
    CHECK(empty.out.empty());

    CliRun too_small = run_cli("test -", "1\n2\n3\n4\n5\n");
    CHECK(too_small.exit_code == 3);
    CHECK(too_small.out.empty());

    CliRun missing = run_cli("test /no/such/file.txt");
    CHECK(missing.exit_code == 3);
    CHECK(missing.out.empty());
}

TEST_CASE("simulate: deterministic csv, correct row, quiet stdout") {
    std::string args = "simulate --null --n 40 --reps 6 --seed 5";
    CliRun a = run_cli(args);
    CliRun b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    // progress goes to stderr only
    CHECK(a.err.find("simulate:") != std::string::npos);
    CHECK(a.out.find("simulate:") == std::string::npos);

    std::istringstream lines(a.out);
    std::string header, row;
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, row));
    CHECK(header ==
          "kind,null_sigma,alpha,mu,sigma1,sigma2,n,reps,level,rate,"
          "mc_stderr,seed");
    CHECK(row.substr(0, 5) == "null,");
    CHECK(row.find(",40,6,0.05,") != std::string::npos);

    // the reported rate equals the in-process harness result
    emtest::GeneratorSpec spec;
    emtest::SimulationResult core =
        emtest::simulate_rejection_rate(spec, 40, 6, 0.05, {}, 5);
    ordered_json asjson =
        ordered_json::parse(run_cli(args + " --format json").out);
    CHECK(double(asjson["rate"]) == core.rate);
    CHECK(uint64_t(asjson["rejections"]) == core.rejections);
    CHECK(asjson["spec"]["kind"] == "null");
}

TEST_CASE("simulate: mixture spec is echoed in the json report") {
    CliRun r = run_cli("simulate --mixture --alpha 0.2 --mu 3 --sigma2 2 "
                       "--n 40 --reps 4 --seed 9 --format json");
    REQUIRE(r.exit_code == 0);
    ordered_json doc = ordered_json::parse(r.out);
    CHECK(doc["spec"]["kind"] == "mixture");
    CHECK(double(doc["spec"]["alpha"]) == 0.2);
    CHECK(double(doc["spec"]["mu"]) == 3.0);
    CHECK(double(doc["spec"]["sigma2"]) == 2.0);
    CHECK(doc["reps"] == 4);

    // invalid mixture parameters are flag misuse
    CHECK(run_cli("simulate --mixture --alpha 1.5 --n 40 --reps 2")
              .exit_code == 2);
}

TEST_CASE("calibrate --reference reports the bundled study") {
    CliRun csv = run_cli("calibrate --reference");
    REQUIRE(csv.exit_code == 0);
    std::istringstream lines(csv.out);
    std::string line;
    int rows = 0, comments = 0;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "a_n,n,rate,y");
    while (std::getline(lines, line)) {
        if (!line.empty() && line[0] == '#') {
            ++comments;
        } else if (!line.empty()) {
            ++rows;
        }
    }
    CHECK(rows == 39);
    CHECK(comments >= 4);

    CliRun js = run_cli("calibrate --reference --format json");
    REQUIRE(js.exit_code == 0);
    ordered_json doc = ordered_json::parse(js.out);
    REQUIRE(doc["cells"].size() == 39);
    CHECK(double(doc["cells"][0]["y"]) == doctest::Approx(0.175));
    CHECK(double(doc["regression"]["b0"]) ==
          doctest::Approx(0.15864438).epsilon(1e-6));
    CHECK(double(doc["regression"]["b2"]) ==
          doctest::Approx(-0.09134161).epsilon(1e-6));

    CliRun txt = run_cli("calibrate --reference --format text");
    REQUIRE(txt.exit_code == 0);
    CHECK(txt.out.find("regression") != std::string::npos);
    CHECK(txt.out.find("adjusted R2") != std::string::npos);
}

TEST_CASE("calibrate validates its grids") {
    CHECK(run_cli("calibrate --a-grid 2.0:1.0:0.2 --reps 2").exit_code == 2);
    CHECK(run_cli("calibrate --a-grid banana --reps 2").exit_code == 2);
    // grid at or below 1.4 breaks the log(a_n - 1.4) covariate: data error
    CliRun low = run_cli("calibrate --a-grid 1.2,1.3 --n-grid 20,40 --reps 2");
    CHECK(low.exit_code == 2);
}

TEST_CASE("--version and --help behave") {
    CliRun v = run_cli("--version");
    CHECK(v.exit_code == 0);
    CHECK(v.out.find("1.0.0") != std::string::npos);
    CliRun h = run_cli("--help");
    CHECK(h.exit_code == 0);
    CHECK(h.out.find("EMTEST_THREADS") != std::string::npos);
    CliRun ht = run_cli("test --help");
    CHECK(ht.exit_code == 0);
    CHECK(ht.out.find("--from-t") != std::string::npos);
}
