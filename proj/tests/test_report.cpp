#include "conley/cli.hpp"
#include "conley/errors.hpp"
#include "conley/experiments.hpp"
#include "conley/report.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace conley;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("conley-test-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "conley");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("configuration round trip is idempotent")
{
    RunConfig c;
    c.lorenz.r = 15.0;
    c.depths = {6, 7, 5};
    c.map.tau = 2.0;
    c.sweep = {14.0, 14.5};
    c.seed = 99;
    const std::string once = serialize(c);
    const std::string twice = serialize(parse_run_config(json::parse(once)));
    CHECK(once == twice);
    const RunConfig back = parse_run_config(json::parse(once));
    CHECK(back.lorenz.r == 15.0);
    CHECK(back.depths == std::vector<int>{6, 7, 5});
    CHECK(back.seed == 99);
}

TEST_CASE("unknown or mistyped configuration keys are rejected")
{
    CHECK_THROWS_AS(parse_run_config(json{{"colour", 1}}), ContractViolation);
    CHECK_THROWS_AS(parse_run_config(json{{"lorenz", {{"rho", 28}}}}), ContractViolation);
    CHECK_THROWS_AS(parse_run_config(json{{"threads", "many"}}), ContractViolation);
    CHECK_THROWS_AS(parse_run_config(json{{"grid", {{"depths", {7, 7}}}}}), ContractViolation);
    CHECK_NOTHROW(parse_run_config(json::object()));
}

TEST_CASE("atomic writes leave no temporary file behind")
{
    const fs::path dir = scratch_dir("atomic");
    const fs::path f = dir / "a.txt";
    write_file_atomic(f, "first");
    write_file_atomic(f, "second");
    CHECK(slurp(f) == "second");
    CHECK_FALSE(fs::exists(dir / "a.txt.tmp"));
    CHECK_THROWS_AS(write_file_atomic(dir / "missing" / "b.txt", "x"), IoError);
}

TEST_CASE("content hash is FNV-1a")
{
    // Published FNV-1a 64 test vectors.
    CHECK(content_hash("") == "cbf29ce484222325");
    CHECK(content_hash("a") == "af63dc4c8601ec8c");
}

TEST_CASE("an empty report is valid and has no failures")
{
    const fs::path dir = scratch_dir("empty");
    ReproductionReport r;
    const ReportFiles files = emit_report(r, dir);
    const json j = json::parse(slurp(files.json));
    CHECK(j["rows"].empty());
    CHECK(j["summary"]["failures"] == 0);
    CHECK(r.failures() == 0);
    CHECK(fs::exists(files.markdown));
}

TEST_CASE("a failing claim is marked FAIL with both values")
{
    ReproductionReport r;
    ClaimRow row;
    row.id = "demo";
    row.location = "somewhere";
    row.computed = 2.0;
    row.expected = 1.0;
    row.tolerance = "exact";
    row.pass = false;
    r.rows.push_back(row);
    CHECK(r.failures() == 1);
    const std::string md = to_markdown(r);
    CHECK(md.find("| demo | somewhere | 2.0 | 1.0 | exact | FAIL |") != std::string::npos);
}

TEST_CASE("the claim catalog has one row per acceptance criterion")
{
    const auto& cat = claim_catalog();
    CHECK(cat.size() == 14);
    std::set<std::string> ids;
    for (const auto& c : cat) {
        ids.insert(c.id);
        CHECK_FALSE(c.location.empty());
    }
    CHECK(ids.size() == cat.size());
}

TEST_CASE("the fast suite is byte-for-byte reproducible")
{
    RunConfig c;
    c.seed = 3;
    const std::string a = json(run_suite(Suite::Fast, c)).dump(2);
    const std::string b = json(run_suite(Suite::Fast, c)).dump(2);
    CHECK(a == b);
    const json j = json::parse(a);
    CHECK(j["summary"]["failures"] == 0);
}

TEST_CASE("homology self-check agrees with its determinantal oracle")
{
    const HomologySelfCheck h = homology_self_check(50, 1);
    CHECK(h.snf_agreements == 50);
    CHECK(h.figure_eight.betti == std::vector<std::int64_t>{1, 2});
}

TEST_CASE("cli: thresholds --kind hopf")
{
    const CliResult r = run_cli({"thresholds", "--kind", "hopf", "--tol", "1e-6"});
    REQUIRE(r.code == kExitOk);
    const json j = json::parse(r.out);
    CHECK(j["r_star"].get<double>() == doctest::Approx(470.0 / 19.0).epsilon(1e-7));
}

TEST_CASE("cli: usage errors exit 2 with a synopsis")
{
    CliResult r = run_cli({"no-such-command"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("Usage") != std::string::npos);
    r = run_cli({"equilibria", "--r", "-3"});
    CHECK(r.code == kExitUsage);
    r = run_cli({"thresholds", "--kind", "saddle-node"});
    CHECK(r.code == kExitUsage);
}

TEST_CASE("cli: numerical failures exit 3")
{
    // Below the homoclinic value every orbit settles onto C+ or C-.
    const CliResult r = run_cli({"symbols", "--r", "10", "--periodic", "ST", "--seeds", "50", "--length", "1"});
    CHECK(r.code == kExitNumerical);
    CHECK(r.err.find("numerical failure") != std::string::npos);
}

TEST_CASE("cli: flags override the file, the file overrides defaults")
{
    const fs::path dir = scratch_dir("precedence");
    const fs::path cfg = dir / "run.json";
    write_file_atomic(cfg, R"({"lorenz": {"r": 0.5}})");
    CliResult r = run_cli({"equilibria", "--config", cfg.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(json::parse(r.out).size() == 1);
    r = run_cli({"equilibria", "--config", cfg.string(), "--r", "28"});
    REQUIRE(r.code == kExitOk);
    CHECK(json::parse(r.out).size() == 3);
    write_file_atomic(cfg, R"({"lorenz": {"r": 0.5}, "extra": true})");
    r = run_cli({"equilibria", "--config", cfg.string()});
    CHECK(r.code == kExitUsage);
}

TEST_CASE("cli: output directory comes from the environment when set")
{
    const fs::path dir = scratch_dir("env");
    ::setenv("CONLEY_OUTPUT_DIR", dir.string().c_str(), 1);
    const CliResult r = run_cli({"report", "--suite", "fast"});
    ::unsetenv("CONLEY_OUTPUT_DIR");
    CHECK(r.code == kExitOk);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "report.md"));
}

TEST_CASE("cli: morse writes DOT to --out")
{
    const fs::path dir = scratch_dir("dot");
    const CliResult r = run_cli({"morse", "--r", "2", "--depths", "5,5,5", "--tau", "2", "--indices", "--out",
                                 (dir / "g.dot").string()});
    REQUIRE(r.code == kExitOk);
    const std::string dot = slurp(dir / "g.dot");
    CHECK(dot.rfind("digraph", 0) == 0);
    CHECK(dot.find("origin") != std::string::npos);
}
