#include "doctest.h"

#include <fstream>
#include <sstream>

#include "drstack/cli.hpp"
#include "drstack/scenario_io.hpp"
#include "test_support.hpp"

using namespace drstack;

namespace {

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

CliResult call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path write_temp_scenario(const std::string& text) {
    const auto dir = test::fresh_temp_dir("cli_scn");
    const auto path = dir / "scenario.json";
    std::ofstream f(path);
    f << text;
    return path;
}

}  // namespace

TEST_CASE("run writes all four result files") {
    const auto dir = test::fresh_temp_dir("cli_run");
    const auto r = call({"run", "--scenario", "builtin:ieee34-s1", "--mode", "grid",
                         "--threads", "4", "--out", dir.string()});
    CHECK(r.exit_code == 0);
    CHECK(r.err.empty());
    CHECK(r.out.find("ieee34-s1") != std::string::npos);
    for (const char* name : {"eu_table.csv", "provider_table.csv", "series.csv",
                             "kkt_report.csv"})
        CHECK(std::filesystem::exists(dir / name));
}

TEST_CASE("run honors the json format flag") {
    const auto dir = test::fresh_temp_dir("cli_json");
    const auto scenario = write_temp_scenario(io::save_scenario(test::single_provider_scenario()));
    const auto r = call({"run", "--scenario", scenario.string(), "--out", dir.string(),
                         "--format", "json"});
    CHECK(r.exit_code == 0);
    for (const char* name : {"eu_table.json", "provider_table.json", "series.json",
                             "kkt_report.json"})
        CHECK(std::filesystem::exists(dir / name));
}

TEST_CASE("validate flags a bad willingness and names the EU") {
    std::string text = io::save_scenario(test::single_provider_scenario());
    const auto pos = text.find("\"willingness\": 0.8");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("\"willingness\": 0.8").size(), "\"willingness\": 1.3");
    const auto path = write_temp_scenario(text);

    const auto r = call({"validate", "--scenario", path.string()});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("eu:a1") != std::string::npos);
    CHECK(r.err.find("[0,1]") != std::string::npos);
}

TEST_CASE("validate accepts every builtin") {
    for (const auto& name : io::builtin_scenario_names()) {
        const auto r = call({"validate", "--scenario", "builtin:" + name});
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("is valid") != std::string::npos);
    }
}

TEST_CASE("bad inputs exit nonzero with a diagnostic, never a crash") {
    CHECK(call({"run", "--scenario", "builtin:nope"}).exit_code == 1);
    CHECK(call({"run", "--scenario", "/no/such/file.json"}).exit_code == 2);
    CHECK(call({"run", "--bogus-flag"}).exit_code != 0);
    CHECK(call({}).exit_code != 0);
    CHECK(call({"frobnicate"}).exit_code != 0);

    const auto r = call({"run", "--scenario", "builtin:ieee34-s1", "--step", "-1"});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("price_step") != std::string::npos);
}

TEST_CASE("oracle agrees with the solver on the synthetic scenario") {
    const auto path = write_temp_scenario(io::save_scenario(test::two_provider_scenario()));
    const auto r = call({"oracle", "--scenario", path.string(), "--threads", "4"});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("matches the oracle") != std::string::npos);
}

TEST_CASE("oracle exposes a premature paper-mode stop") {
    // Participation starts five lattice steps in, so the lockstep sweep
    // sees a flat profit early and its stopping rule fires at the origin
    // while the true optimum sits further up.
    Scenario s = test::single_provider_scenario();
    s.eus[0].base_load_kw = {40.0};
    s.eus[0].willingness = 0.5;   // capacity 20 kW, threshold 0.05 c/kWh
    const auto path = write_temp_scenario(io::save_scenario(s));
    const auto r = call({"oracle", "--scenario", path.string()});
    CHECK(r.exit_code == 4);
    CHECK(r.out.find("oracle beats the solver") != std::string::npos);
}

TEST_CASE("compare emits a direction report") {
    const auto dir = test::fresh_temp_dir("cli_cmp");
    const auto r = call({"compare", "builtin:ieee34-s1", "builtin:ieee34-s2", "--threads",
                         "4", "--out", dir.string()});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("eu:eu18 dr_kw[total]") != std::string::npos);
    CHECK(r.out.find("increased") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "compare.csv"));
}

TEST_CASE("unwritable output directory is a clean error") {
    const auto dir = test::fresh_temp_dir("cli_block");
    const auto blocker = dir / "taken";
    { std::ofstream f(blocker); f << "x"; }   // a file where the dir should go
    const auto r = call({"run", "--scenario", "builtin:ieee34-s1", "--mode", "coordinate",
                         "--out", (blocker / "sub").string()});
    CHECK(r.exit_code == 1);
    CHECK(!r.err.empty());
}

TEST_CASE("run output is a pure function of scenario bytes and flags") {
    const auto dir_a = test::fresh_temp_dir("cli_det_a");
    const auto dir_b = test::fresh_temp_dir("cli_det_b");
    const std::vector<std::string> base = {"run", "--scenario", "builtin:ieee69-s1",
                                           "--mode", "grid"};
    auto with_out = [&base](const std::filesystem::path& dir, const char* threads) {
        auto args = base;
        args.insert(args.end(), {"--threads", threads, "--out", dir.string()});
        return args;
    };
    CHECK(call(with_out(dir_a, "1")).exit_code == 0);
    CHECK(call(with_out(dir_b, "6")).exit_code == 0);
    for (const char* name : {"eu_table.csv", "provider_table.csv", "series.csv",
                             "kkt_report.csv"})
        CHECK(test::read_file(dir_a / name) == test::read_file(dir_b / name));
}
