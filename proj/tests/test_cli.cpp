#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cptpmap/cli.hpp"

using namespace cptpmap;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("cptpmap_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("run config JSON round trip") {
    RunConfig cfg;
    cfg.command = Command::Clone;
    cfg.params = {{"N", 1.0},
                  {"M", std::numeric_limits<double>::infinity()},
                  {"xi", 0.5}};
    cfg.out_dir = "/tmp/somewhere";
    cfg.format = OutputFormat::Json;
    cfg.resolution = 77;
    cfg.samples = 1234;
    cfg.seed = 99;
    cfg.tolerance = 1e-5;

    const auto j = to_json(cfg);
    const RunConfig back = run_config_from_json(j);
    CHECK(back == cfg);
    // round-trip through text too
    const RunConfig back2 = run_config_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back2 == cfg);
}

TEST_CASE("run config validation") {
    CHECK_THROWS_AS(command_from_name("bogus"), std::invalid_argument);
    nlohmann::json j{{"command", "verify"}, {"format", "yaml"}};
    CHECK_THROWS_AS(run_config_from_json(j), std::invalid_argument);
}

TEST_CASE("verify runner") {
    RunConfig cfg;
    cfg.command = Command::Verify;
    cfg.samples = 120;
    cfg.seed = 7;
    cfg.out_dir = temp_dir("verify");

    const auto res = run_verify(cfg);
    CHECK(res.ok);
    CHECK(res.report["pass"].get<bool>());
    CHECK(res.report["checks"].size() >= 4);

    SECTION("deterministic output bytes") {
        const auto bytes1 = slurp(cfg.out_dir / "verify_report.json");
        RunConfig cfg2 = cfg;
        cfg2.out_dir = temp_dir("verify2");
        run_verify(cfg2);
        CHECK(bytes1 == slurp(cfg2.out_dir / "verify_report.json"));
        CHECK_FALSE(bytes1.empty());
    }
    SECTION("different seed changes the sampled instances but still passes") {
        RunConfig cfg3 = cfg;
        cfg3.seed = 8;
        cfg3.out_dir = temp_dir("verify3");
        CHECK(run_verify(cfg3).ok);
    }
    SECTION("tampered tolerance rejected") {
        RunConfig bad = cfg;
        bad.tolerance = -1.0;
        CHECK_THROWS_AS(run_verify(bad), std::invalid_argument);
        bad.tolerance = 1e-6;
        bad.samples = 0;
        CHECK_THROWS_AS(run_verify(bad), std::invalid_argument);
    }
}

TEST_CASE("region runner emits grid, boundary, curves and cases") {
    RunConfig cfg;
    cfg.command = Command::Region;
    cfg.params = {{"Y0", 4.0}, {"X", 1.0}, {"R", 0.5}};
    cfg.resolution = 48;
    cfg.out_dir = temp_dir("region");

    const auto res = run_region(cfg);
    CHECK(res.files.size() == 4);
    for (const auto& f : res.files) CHECK(fs::exists(f));
    const auto cases = res.report["cases"];
    CHECK(std::find(cases.begin(), cases.end(), "1a") != cases.end());

    SECTION("csv has a header row and full precision") {
        const auto text = slurp(cfg.out_dir / "region_grid.csv");
        CHECK(text.rfind("p,q,feasible\n", 0) == 0);
        CHECK(text.find("\r") == std::string::npos);
    }
    SECTION("missing parameters are usage errors") {
        RunConfig bad;
        bad.command = Command::Region;
        bad.params = {{"Y0", 4.0}};
        CHECK_THROWS_AS(run_region(bad), std::invalid_argument);
    }
    SECTION("invalid ranges are usage errors") {
        RunConfig bad = cfg;
        bad.params["R"] = -2.0;
        bad.out_dir = temp_dir("region_bad");
        CHECK_THROWS_AS(run_region(bad), std::invalid_argument);
    }
}

TEST_CASE("pure region runner") {
    RunConfig cfg;
    cfg.command = Command::PureRegion;
    cfg.params = {{"R", 0.25}};
    cfg.resolution = 32;
    cfg.out_dir = temp_dir("pure");
    const auto res = run_pure_region(cfg);
    CHECK(res.files.size() == 3);
    const auto text = slurp(cfg.out_dir / "pure_region_boundary.csv");
    CHECK(text.rfind("side,p,q\n", 0) == 0);
}

TEST_CASE("repeater runner single point") {
    RunConfig cfg;
    cfg.command = Command::Repeater;
    cfg.params = {{"alpha", 0.3}, {"beta", 0.6}, {"eta", 0.5}, {"xi", 0.3}};
    cfg.out_dir = temp_dir("repeater");
    const auto res = run_repeater(cfg);
    CHECK(res.report["delta_pe"].get<double>() >= 0.0);
    CHECK(res.report.contains("network"));
    CHECK_FALSE(res.report.contains("ir"));  // xi != 1/2
    CHECK(res.report["network"]["fidelity_rho1"].get<double>() > 1.0 - 1e-6);
}

TEST_CASE("repeater runner rejects beta <= alpha") {
    RunConfig cfg;
    cfg.command = Command::Repeater;
    cfg.params = {{"alpha", 0.9}, {"beta", 0.3}};
    cfg.out_dir = temp_dir("repeater_bad");
    CHECK_THROWS_AS(run_repeater(cfg), std::invalid_argument);
}

TEST_CASE("clone runner curves") {
    RunConfig cfg;
    cfg.command = Command::Clone;
    cfg.params = {{"N", 1.0}, {"M", 2.0}, {"xi", 0.5}};
    cfg.resolution = 64;
    cfg.out_dir = temp_dir("clone");
    const auto res = run_clone(cfg);
    const double fmin = res.report["min_local_fidelity"]["fidelity"].get<double>();
    CHECK(fmin > 0.945);
    CHECK(fmin < 0.955);

    SECTION("M = inf via params") {
        RunConfig inf_cfg = cfg;
        inf_cfg.params["M"] = std::numeric_limits<double>::infinity();
        inf_cfg.out_dir = temp_dir("clone_inf");
        const auto r2 = run_clone(inf_cfg);
        CHECK_THAT(r2.report["min_local_fidelity"]["fidelity"].get<double>(),
                   Catch::Matchers::WithinAbs(25.0 / 27.0, 1e-8));
    }
    SECTION("json table format") {
        RunConfig jc = cfg;
        jc.format = OutputFormat::Json;
        jc.out_dir = temp_dir("clone_json");
        const auto r3 = run_clone(jc);
        const auto parsed =
            nlohmann::json::parse(slurp(jc.out_dir / "clone_curves.json"));
        CHECK(parsed["columns"].size() == 6);
        CHECK(parsed["rows"].size() == 64);
    }
}

TEST_CASE("anticlone runner") {
    RunConfig cfg;
    cfg.command = Command::Anticlone;
    cfg.params = {{"N", 1.0}, {"K", 1.0}, {"L", 1.0}, {"xi", 0.5}};
    cfg.resolution = 32;
    cfg.out_dir = temp_dir("anticlone");
    const auto res = run_anticlone(cfg);
    CHECK(fs::exists(cfg.out_dir / "anticlone_curves.csv"));
    // R column must follow (1 - Z)/(1 - Z^2)
    const auto text = slurp(cfg.out_dir / "anticlone_curves.csv");
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);  // header
    CHECK(line == "Z,R,f_global_opt,f_local_opt,ih,ih_input");
    bool checked_any = false;
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::string zs, rs;
        std::getline(fields, zs, ',');
        std::getline(fields, rs, ',');
        const double z = std::stod(zs), r = std::stod(rs);
        if (z > 0.0) {
            CHECK_THAT(r, Catch::Matchers::WithinAbs((1.0 - z) / (1.0 - z * z), 1e-12));
            checked_any = true;
        }
    }
    CHECK(checked_any);
}

TEST_CASE("grid outputs are byte-identical across runs") {
    RunConfig cfg;
    cfg.command = Command::Region;
    cfg.params = {{"Y0", 4.0}, {"X", 10.0}, {"R", 0.32}};
    cfg.resolution = 40;
    cfg.out_dir = temp_dir("det1");
    run_region(cfg);
    RunConfig cfg2 = cfg;
    cfg2.out_dir = temp_dir("det2");
    run_region(cfg2);
    for (const char* name : {"region_grid.csv", "region_boundary.csv",
                             "region_curves.csv", "region_report.json"}) {
        CHECK(slurp(cfg.out_dir / name) == slurp(cfg2.out_dir / name));
    }
}
