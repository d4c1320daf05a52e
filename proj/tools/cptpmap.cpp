// Command-line front end: parameter sweeps, curve/surface data emission and the
// analytic-vs-oracle verification harness.
//
// Exit codes: 0 success, 1 verification failure, 2 usage/parameter error.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cptpmap/cli.hpp"

namespace {

struct FlagSpec {
    std::string name;
    std::string help;
};

// Numeric flags per subcommand; every value lands in RunConfig::params.
const std::map<std::string, std::vector<FlagSpec>> kCommandFlags = {
    {"region",
     {{"Y0", "parameter Y0 (>= 1)"}, {"X", "parameter X (>= 0)"}, {"R", "parameter R (>= 0)"}}},
    {"pure-region", {{"R", "pure-case parameter R in (0,1)"}}},
    {"repeater",
     {{"alpha", "input amplitude"},
      {"beta", "template amplitude (> alpha)"},
      {"eta", "transmissivity in (0,1), default 1/sqrt(2)"},
      {"xi", "prior of the second input, default 1/2"},
      {"ratio", "template ratio |beta/alpha| for --chi sweeps"}}},
    {"clone", {{"N", "input copies"}, {"M", "output copies"}, {"xi", "prior, default 1/2"}, {"Z", "overlap parameter (single-point reports)"}}},
    {"anticlone",
     {{"N", "input copies"}, {"K", "upright copies"}, {"L", "flipped copies"}, {"xi", "prior, default 1/2"}}},
    {"verify", {}},
};

int run_main(int argc, char** argv) {
    CLI::App app{"CPTP mapping feasibility, repeater and cloning toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flags override it)");

    struct SubState {
        CLI::App* sub = nullptr;
        std::map<std::string, double> values;
        std::string m_text;  // clone: accepts "inf"
        std::string out;
        std::string format;
        int resolution = -1;
        int samples = -1;
        std::uint64_t seed = 0;
        bool seed_set = false;
        double tolerance = 0.0;
        bool tolerance_set = false;
        bool surface = false;
        bool chi = false;
    };
    std::map<std::string, SubState> subs;

    for (const auto& [cmd, flags] : kCommandFlags) {
        auto& st = subs[cmd];
        st.sub = app.add_subcommand(cmd, "");
        for (const auto& f : flags) {
            if (cmd == "clone" && f.name == "M") {
                st.sub->add_option("--M", st.m_text, f.help);
            } else {
                st.values[f.name] = 0.0;
                st.sub->add_option("--" + f.name, st.values[f.name], f.help);
            }
        }
        st.sub->add_option("--out,-o", st.out, "output directory");
        st.sub->add_option("--format", st.format, "csv or json");
        st.sub->add_option("--resolution", st.resolution, "grid resolution");
        st.sub->add_option("--samples", st.samples, "sample count");
        st.sub->add_option("--seed", st.seed, "random seed")
            ->each([&st](const std::string&) { st.seed_set = true; });
        st.sub->add_option("--tolerance", st.tolerance, "agreement band")
            ->each([&st](const std::string&) { st.tolerance_set = true; });
        if (cmd == "repeater") {
            st.sub->add_flag("--surface", st.surface, "emit the error-difference surface");
            st.sub->add_flag("--chi", st.chi, "emit Holevo-capacity curves (needs --ratio)");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    cptpmap::RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot read config file " << config_path << "\n";
            return 2;
        }
        nlohmann::json j;
        in >> j;
        cfg = cptpmap::run_config_from_json(j);
    }

    for (const auto& [cmd, st] : subs) {
        if (!st.sub->parsed()) continue;
        cfg.command = cptpmap::command_from_name(cmd);
        for (const auto& [name, value] : st.values)
            if (st.sub->count("--" + name)) cfg.params[name] = value;
        if (!st.m_text.empty()) {
            if (st.m_text == "inf" || st.m_text == "INF")
                cfg.params["M"] = std::numeric_limits<double>::infinity();
            else
                cfg.params["M"] = std::stod(st.m_text);
        }
        if (st.surface) cfg.params["surface"] = 1.0;
        if (st.chi) cfg.params["chi"] = 1.0;
        if (!st.out.empty()) cfg.out_dir = st.out;
        if (!st.format.empty()) {
            if (st.format == "csv")
                cfg.format = cptpmap::OutputFormat::Csv;
            else if (st.format == "json")
                cfg.format = cptpmap::OutputFormat::Json;
            else {
                std::cerr << "unknown format: " << st.format << "\n";
                return 2;
            }
        }
        if (st.resolution >= 0) cfg.resolution = st.resolution;
        if (st.samples >= 0) cfg.samples = st.samples;
        if (st.seed_set) cfg.seed = st.seed;
        if (st.tolerance_set) cfg.tolerance = st.tolerance;
    }

    const auto result = cptpmap::run(cfg);
    for (const auto& f : result.files) std::cout << "wrote " << f.string() << "\n";
    if (cfg.command == cptpmap::Command::Verify) {
        std::cout << (result.ok ? "verify: PASS" : "verify: FAIL") << "\n";
        if (!result.ok) {
            std::cerr << result.report["offenders"].dump(2) << "\n";
            return 1;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_main(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
