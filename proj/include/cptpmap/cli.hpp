#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cptpmap/au.hpp"
#include "cptpmap/cloner.hpp"
#include "cptpmap/region.hpp"
#include "cptpmap/repeater.hpp"

namespace cptpmap {

enum class Command { Region, PureRegion, Repeater, Clone, Anticlone, Verify };
enum class OutputFormat { Csv, Json };

inline const char* command_name(Command c) {
    switch (c) {
        case Command::Region: return "region";
        case Command::PureRegion: return "pure-region";
        case Command::Repeater: return "repeater";
        case Command::Clone: return "clone";
        case Command::Anticlone: return "anticlone";
        case Command::Verify: return "verify";
    }
    return "?";
}

inline Command command_from_name(const std::string& s) {
    for (Command c : {Command::Region, Command::PureRegion, Command::Repeater,
                      Command::Clone, Command::Anticlone, Command::Verify})
        if (s == command_name(c)) return c;
    throw std::invalid_argument("unknown command: " + s);
}

/// Full run configuration. Accepted configs round-trip through JSON
/// serialization unchanged (infinities are encoded as the string "inf").
struct RunConfig {
    Command command = Command::Verify;
    std::map<std::string, double> params;
    std::filesystem::path out_dir;
    OutputFormat format = OutputFormat::Csv;
    int resolution = 256;
    int samples = 10000;
    std::uint64_t seed = 12345;
    double tolerance = 1e-6;

    bool operator==(const RunConfig&) const = default;

    double param_or(const std::string& key, double fallback) const {
        const auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
    double require_param(const std::string& key) const {
        const auto it = params.find(key);
        if (it == params.end())
            throw std::invalid_argument("missing required parameter --" + key);
        return it->second;
    }
    bool has_param(const std::string& key) const { return params.count(key) > 0; }
};

inline nlohmann::json to_json(const RunConfig& cfg) {
    nlohmann::json par = nlohmann::json::object();
    for (const auto& [k, v] : cfg.params) {
        if (std::isinf(v))
            par[k] = v > 0 ? "inf" : "-inf";
        else
            par[k] = v;
    }
    return nlohmann::json{
        {"command", command_name(cfg.command)},
        {"params", par},
        {"out", cfg.out_dir.string()},
        {"format", cfg.format == OutputFormat::Csv ? "csv" : "json"},
        {"resolution", cfg.resolution},
        {"samples", cfg.samples},
        {"seed", cfg.seed},
        {"tolerance", cfg.tolerance},
    };
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    cfg.command = command_from_name(j.at("command").get<std::string>());
    if (j.contains("params")) {
        for (const auto& [k, v] : j.at("params").items()) {
            if (v.is_string()) {
                const std::string s = v.get<std::string>();
                if (s == "inf")
                    cfg.params[k] = std::numeric_limits<double>::infinity();
                else if (s == "-inf")
                    cfg.params[k] = -std::numeric_limits<double>::infinity();
                else
                    throw std::invalid_argument("bad parameter value: " + s);
            } else {
                cfg.params[k] = v.get<double>();
            }
        }
    }
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    if (j.contains("format")) {
        const std::string f = j.at("format").get<std::string>();
        if (f == "csv")
            cfg.format = OutputFormat::Csv;
        else if (f == "json")
            cfg.format = OutputFormat::Json;
        else
            throw std::invalid_argument("unknown format: " + f);
    }
    if (j.contains("resolution")) cfg.resolution = j.at("resolution").get<int>();
    if (j.contains("samples")) cfg.samples = j.at("samples").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tolerance")) cfg.tolerance = j.at("tolerance").get<double>();
    return cfg;
}

namespace detail {

/// Full round-trip double formatting (17 significant digits, '.' decimal).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Tabular output in either CSV (comma separator, LF endings, header row)
/// or JSON ({"columns": [...], "rows": [[...], ...]}).
class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<double> row) { rows_.push_back(std::move(row)); }

    void write_csv(std::ostream& os) const {
        for (std::size_t i = 0; i < columns_.size(); ++i)
            os << (i ? "," : "") << columns_[i];
        os << "\n";
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << format_double(row[i]);
            os << "\n";
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : rows_) rows.push_back(row);
        return nlohmann::json{{"columns", columns_}, {"rows", rows}};
    }

    std::size_t size() const { return rows_.size(); }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

inline std::filesystem::path write_table(const Table& table,
                                         const std::filesystem::path& dir,
                                         const std::string& stem, OutputFormat fmt) {
    const auto path = dir / (stem + (fmt == OutputFormat::Csv ? ".csv" : ".json"));
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file " + path.string());
    if (fmt == OutputFormat::Csv)
        table.write_csv(os);
    else
        os << table.to_json().dump(2) << "\n";
    return path;
}

inline std::filesystem::path write_json(const nlohmann::json& j,
                                        const std::filesystem::path& dir,
                                        const std::string& stem) {
    const auto path = dir / (stem + ".json");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file " + path.string());
    os << j.dump(2) << "\n";
    return path;
}

inline std::filesystem::path resolve_out_dir(const RunConfig& cfg) {
    std::filesystem::path dir = cfg.out_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("CPTPMAP_OUT_DIR"))
            dir = env;
        else
            dir = ".";
    }
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace detail

struct RunResult {
    std::vector<std::filesystem::path> files;
    nlohmann::json report;
    bool ok = true;
};

// ---------------------------------------------------------------------------
// region / pure-region
// ---------------------------------------------------------------------------

inline RunResult run_region(const RunConfig& cfg) {
    const double y0 = cfg.require_param("Y0");
    const double x = cfg.require_param("X");
    const double r = cfg.require_param("R");
    const AUParameters par(r, x, y0);
    const auto dir = detail::resolve_out_dir(cfg);
    const int res = std::max(cfg.resolution, 16);
    RunResult out;

    detail::Table grid({"p", "q", "feasible"});
    for (int i = 0; i <= res; ++i)
        for (int j = 0; j <= res; ++j) {
            const double p = static_cast<double>(i) / res;
            const double q = static_cast<double>(j) / res;
            grid.add_row({p, q, au_feasible(MixtureWeights(p, q), par) ? 1.0 : 0.0});
        }
    out.files.push_back(detail::write_table(grid, dir, "region_grid", cfg.format));

    const auto curves = boundary_curves(par);
    detail::Table boundary({"p", "q", "curve_id", "distance"});
    for (const auto& pt : boundary_trace(par, res)) {
        const auto m = match_boundary_point(pt.p, pt.q, curves);
        boundary.add_row({pt.p, pt.q, static_cast<double>(m.kind), m.distance});
    }
    out.files.push_back(detail::write_table(boundary, dir, "region_boundary", cfg.format));

    detail::Table curve_samples({"curve_id", "p", "q"});
    for (const auto& c : curves) {
        const double id = static_cast<double>(c.kind);
        if (c.kind == CurveKind::Conic) {
            for (int i = 0; i <= res; ++i) {
                const double ph = -0.5 + static_cast<double>(i) / res;
                // solve the conic for qhat at this phat
                const auto roots = cptpmap::detail::solve_quadratic(
                    c.a, 2.0 * c.b * ph, c.a * ph * ph + c.c0, std::abs(c.a) + 1.0);
                if (roots.count == 0) continue;
                for (double qh : {roots.r1, roots.r2}) {
                    if (std::abs(qh) <= 0.5)
                        curve_samples.add_row({id, ph + 0.5, qh + 0.5});
                }
            }
        } else {
            for (int i = 0; i <= res; ++i) {
                const double ph = -0.5 + static_cast<double>(i) / res;
                if (std::abs(c.nq) < 1e-14) continue;
                const double qh = (-c.c0 - c.np * ph) / c.nq;
                if (std::abs(qh) <= 0.5) curve_samples.add_row({id, ph + 0.5, qh + 0.5});
            }
        }
    }
    out.files.push_back(
        detail::write_table(curve_samples, dir, "region_curves", cfg.format));

    nlohmann::json report{{"Y0", y0}, {"X", x}, {"R", r}};
    report["cases"] = classify_case(par).labels;
    nlohmann::json legend = nlohmann::json::object();
    for (const auto& c : curves)
        legend[std::to_string(static_cast<int>(c.kind))] = curve_kind_name(c.kind);
    legend[std::to_string(static_cast<int>(CurveKind::SquareEdge))] =
        curve_kind_name(CurveKind::SquareEdge);
    report["curve_ids"] = legend;
    if (x > y0 - 1.0 && y0 > 1.0) {
        try {
            report["R0_at_X"] = r0_threshold(y0, x);
        } catch (const numeric_failure_error&) {
        }
    }
    out.report = report;
    out.files.push_back(detail::write_json(report, dir, "region_report"));
    return out;
}

inline RunResult run_pure_region(const RunConfig& cfg) {
    const double r = cfg.require_param("R");
    PureRegion region(r);
    const auto dir = detail::resolve_out_dir(cfg);
    const int res = std::max(cfg.resolution, 16);
    RunResult out;

    detail::Table grid({"p", "q", "feasible"});
    for (int i = 0; i <= res; ++i)
        for (int j = 0; j <= res; ++j) {
            const double p = static_cast<double>(i) / res;
            const double q = static_cast<double>(j) / res;
            grid.add_row({p, q, pure_region_contains(p, q, region.R) ? 1.0 : 0.0});
        }
    out.files.push_back(detail::write_table(grid, dir, "pure_region_grid", cfg.format));

    const auto pb = pure_boundary(region.R, res);
    detail::Table boundary({"side", "p", "q"});  // side 0 = upper, 1 = lower
    for (const auto& pt : pb.upper) boundary.add_row({0.0, pt.p, pt.q});
    for (const auto& pt : pb.lower) boundary.add_row({1.0, pt.p, pt.q});
    out.files.push_back(
        detail::write_table(boundary, dir, "pure_region_boundary", cfg.format));

    out.report = nlohmann::json{{"R", region.R},
                                {"p_opt_half", 0.5 * (1.0 + std::sqrt(region.R))}};
    out.files.push_back(detail::write_json(out.report, dir, "pure_region_report"));
    return out;
}

// ---------------------------------------------------------------------------
// repeater
// ---------------------------------------------------------------------------

inline RunResult run_repeater(const RunConfig& cfg) {
    const auto dir = detail::resolve_out_dir(cfg);
    const int res = std::max(cfg.resolution, 16);
    const double eta = cfg.param_or("eta", 1.0 / std::sqrt(2.0));
    const double xi = cfg.param_or("xi", 0.5);
    RunResult out;
    nlohmann::json report{{"eta", eta}, {"xi", xi}};

    const bool want_surface = cfg.param_or("surface", 0.0) != 0.0;
    const bool want_chi = cfg.param_or("chi", 0.0) != 0.0;

    if (want_surface) {
        detail::Table surf({"ratio_sq", "beta_sq", "pe_noact", "pe_cptp", "delta_pe"});
        for (int i = 1; i < res; ++i) {
            const double ratio_sq = static_cast<double>(i) / res;  // |alpha/beta|^2
            for (int j = 1; j <= res; ++j) {
                const double beta_sq = 4.0 * j / res;
                const double alpha = std::sqrt(ratio_sq * beta_sq);
                const double beta = std::sqrt(beta_sq);
                const RepeaterProblem prob(alpha, beta, eta, xi);
                const double pn = pe_noact(prob), pc = pe_cptp_min(prob);
                surf.add_row({ratio_sq, beta_sq, pn, pc, pn - pc});
            }
        }
        out.files.push_back(
            detail::write_table(surf, dir, "repeater_surface", cfg.format));
    }

    if (want_chi) {
        const double ratio = cfg.require_param("ratio");
        detail::Table chi_tab(
            {"kappa", "chi_cptp", "chi_noact", "chi_input", "p_opt", "q_opt"});
        for (int i = 0; i < res; ++i) {
            const double kappa = 1e-3 + (1.0 - 2e-3) * i / (res - 1);
            const RepeaterProblem prob =
                RepeaterProblem::from_overlap(kappa, ratio, eta, xi);
            const auto opt = maximize_chi(prob, 257);
            const auto base = chi_baselines(prob);
            chi_tab.add_row({kappa, opt.chi, base.chi_noact, base.chi_input, opt.p, opt.q});
        }
        out.files.push_back(
            detail::write_table(chi_tab, dir, "repeater_chi", cfg.format));
        const auto k0 = kappa0(ratio, eta, xi);
        report["ratio"] = ratio;
        if (k0)
            report["kappa0"] = *k0;
        else
            report["kappa0"] = nullptr;
    }

    if (cfg.has_param("alpha") || cfg.has_param("beta")) {
        const double alpha = cfg.require_param("alpha");
        const double beta = cfg.require_param("beta");
        const RepeaterProblem prob(alpha, beta, eta, xi);
        const auto w = optimal_pq(prob.R, prob.xi);
        const auto opt = maximize_chi(prob, 257);
        const auto base = chi_baselines(prob);
        report["alpha"] = alpha;
        report["beta"] = beta;
        report["kappa"] = prob.kappa;
        report["K"] = prob.K;
        report["kappa_prime"] = prob.kappa_p;
        report["K_prime"] = prob.K_p;
        report["R"] = prob.R;
        report["p_opt"] = w.p;
        report["q_opt"] = w.q;
        report["pe_cptp"] = pe_cptp_min(prob);
        report["pe_noact"] = pe_noact(prob);
        report["delta_pe"] = pe_noact(prob) - pe_cptp_min(prob);
        report["chi_cptp"] = opt.chi;
        report["chi_noact"] = base.chi_noact;
        report["chi_input"] = base.chi_input;
        if (std::abs(prob.xi - 0.5) < 1e-12) {
            const auto ir = ir_strategy(prob);
            report["ir"] = nlohmann::json{{"p", ir.p}, {"q", ir.q}, {"pe", ir.pe}};
        }
        if (prob.K > 0.0) {
            const auto net = network_report(prob.kappa, prob.K);
            report["network"] =
                nlohmann::json{{"theta_plus", net.output.angles.theta_plus},
                               {"theta_minus", net.output.angles.theta_minus},
                               {"unitarity_error", net.output.unitarity_error},
                               {"fidelity_rho1", net.fidelity_1},
                               {"fidelity_rho2", net.fidelity_2},
                               {"p_target", net.p_target}};
        }
    }

    out.report = report;
    out.files.push_back(detail::write_json(report, dir, "repeater_report"));
    return out;
}

// ---------------------------------------------------------------------------
// clone / anticlone
// ---------------------------------------------------------------------------

namespace detail {

inline RunResult run_clone_family(const RunConfig& cfg, bool anticlone) {
    const auto dir = resolve_out_dir(cfg);
    const int res = std::max(cfg.resolution, 16);
    const double xi = cfg.param_or("xi", 0.5);
    const int n = static_cast<int>(cfg.require_param("N"));
    Copies m = Copies(1);
    nlohmann::json report{{"N", n}, {"xi", xi}};
    if (anticlone) {
        const int k = static_cast<int>(cfg.require_param("K"));
        const int l = static_cast<int>(cfg.require_param("L"));
        AnticloneProblem check(n, k, l, xi, 0.5);  // validates counts
        m = Copies(k + l);
        report["K"] = k;
        report["L"] = l;
    } else {
        const double m_raw = cfg.require_param("M");
        m = std::isinf(m_raw) ? Copies::infinity() : Copies(static_cast<int>(m_raw));
        report["M"] = std::isinf(m_raw) ? nlohmann::json("inf")
                                        : nlohmann::json(static_cast<int>(m_raw));
    }

    Table curves({"Z", "R", "f_global_opt", "f_local_opt", "ih", "ih_input"});
    for (int i = 0; i < res; ++i) {
        const double z = static_cast<double>(i) / res;
        const CloneProblem prob(n, m, xi, z);
        const double ih = (xi > 0.0 && xi < 1.0) ? holevo_copied_info(prob) : 0.0;
        curves.add_row({z, clone_R(prob), global_fidelity_opt(prob),
                        local_fidelity_opt(prob), ih, ih_input(z, xi)});
    }
    RunResult out;
    const std::string stem = anticlone ? "anticlone_curves" : "clone_curves";
    out.files.push_back(write_table(curves, dir, stem, cfg.format));

    const auto fmin = min_local_fidelity(n, m, xi);
    report["min_local_fidelity"] =
        nlohmann::json{{"Z", fmin.z}, {"fidelity", fmin.fidelity}};
    out.report = report;
    out.files.push_back(
        write_json(report, dir, anticlone ? "anticlone_report" : "clone_report"));
    return out;
}

}  // namespace detail

inline RunResult run_clone(const RunConfig& cfg) {
    return detail::run_clone_family(cfg, false);
}

inline RunResult run_anticlone(const RunConfig& cfg) {
    return detail::run_clone_family(cfg, true);
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

inline RunResult run_verify(const RunConfig& cfg) {
    if (cfg.samples <= 0) throw std::invalid_argument("verify: samples must be > 0");
    if (cfg.tolerance <= 0.0)
        throw std::invalid_argument("verify: tolerance must be > 0");
    const auto dir = detail::resolve_out_dir(cfg);
    cptpmap::detail::Rng rng(cfg.seed);
    nlohmann::json checks = nlohmann::json::array();
    nlohmann::json offenders = nlohmann::json::array();
    bool all_pass = true;

    const auto random_pair = [&]() {
        return StatePairAngles{rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0),
                               rng.uniform(0.05, cptpmap::detail::kPi / 2),
                               rng.uniform(0.05, cptpmap::detail::kPi / 2)};
    };

    {  // analytic condition vs trace-norm oracle
        int failures = 0, band = 0;
        for (int i = 0; i < cfg.samples; ++i) {
            const auto pair = random_pair();
            const MixtureWeights w(rng.uniform(), rng.uniform());
            const auto par = au_parameters(pair);
            const bool analytic = au_feasible(w, par);
            const auto st = au_instance_states(pair, w);
            OracleGrid grid;
            grid.points = 2000;
            double margin = au_oracle_margin(st.f1, st.f2, st.rho1, st.rho2, grid);
            bool conflict = (margin >= -grid.tol) != analytic;
            if (conflict) {
                OracleGrid fine;
                fine.points = 10000;
                margin = au_oracle_margin(st.f1, st.f2, st.rho1, st.rho2, fine);
                conflict = (margin >= -fine.tol) != analytic;
            }
            if (!conflict) continue;
            if (std::abs(margin) <= cfg.tolerance) {
                ++band;  // inside the agreement band around the boundary
            } else {
                ++failures;
                if (offenders.size() < 32)
                    offenders.push_back({{"check", "analytic_vs_oracle"},
                                         {"f", pair.f},
                                         {"g", pair.g},
                                         {"phi", pair.phi},
                                         {"theta", pair.theta},
                                         {"p", w.p},
                                         {"q", w.q},
                                         {"margin", margin}});
            }
        }
        checks.push_back({{"name", "analytic_vs_oracle"},
                          {"samples", cfg.samples},
                          {"boundary_band", band},
                          {"disagreements", failures},
                          {"pass", failures == 0}});
        all_pass = all_pass && failures == 0;
    }

    {  // convexity of the feasible set
        const int target = std::max(cfg.samples / 10, 50);
        int tested = 0, failures = 0;
        while (tested < target) {
            const AUParameters par(rng.uniform(0.0, 3.0), rng.uniform(0.0, 20.0),
                                   1.0 + rng.uniform(0.0, 5.0));
            const MixtureWeights w1(rng.uniform(), rng.uniform());
            const MixtureWeights w2(rng.uniform(), rng.uniform());
            if (!au_feasible(w1, par) || !au_feasible(w2, par)) continue;
            const double lam = rng.uniform();
            const MixtureWeights mid(lam * w1.p + (1 - lam) * w2.p,
                                     lam * w1.q + (1 - lam) * w2.q);
            if (!au_feasible(mid, par, 1e-7)) ++failures;
            ++tested;
        }
        checks.push_back({{"name", "convexity"},
                          {"samples", target},
                          {"disagreements", failures},
                          {"pass", failures == 0}});
        all_pass = all_pass && failures == 0;
    }

    {  // closed-form error vs eigensolver
        const int target = std::min(cfg.samples, 1000);
        int failures = 0;
        double worst = 0.0;
        for (int i = 0; i < target; ++i) {
            const double alpha = rng.uniform(0.05, 1.2);
            const RepeaterProblem prob(alpha, alpha + rng.uniform(0.05, 1.5),
                                       rng.uniform(0.1, 0.95), rng.uniform(0.05, 0.95));
            const double p = rng.uniform(), q = rng.uniform();
            const auto e = output_ensemble(p, q, prob.K_p, prob.xi);
            const double d = std::abs(pe_min_closed(p, q, prob) -
                                      helstrom_min_error(e.rho1, e.rho2, prob.xi));
            worst = std::max(worst, d);
            if (d > 1e-10) ++failures;
        }
        checks.push_back({{"name", "pe_closed_vs_eigensolver"},
                          {"samples", target},
                          {"worst", worst},
                          {"disagreements", failures},
                          {"pass", failures == 0}});
        all_pass = all_pass && failures == 0;
    }

    {  // chi: entropy form vs relative-entropy form
        const int target = std::min(cfg.samples, 1000);
        int failures = 0;
        double worst = 0.0;
        for (int i = 0; i < target; ++i) {
            const auto e = output_ensemble(rng.uniform(), rng.uniform(),
                                           rng.uniform(0.0, 0.99), rng.uniform(0.05, 0.95));
            const double d = std::abs(holevo_chi(e) - holevo_chi_relative_entropy(e));
            worst = std::max(worst, d);
            if (d > 1e-10) ++failures;
        }
        checks.push_back({{"name", "chi_dual_form"},
                          {"samples", target},
                          {"worst", worst},
                          {"disagreements", failures},
                          {"pass", failures == 0}});
        all_pass = all_pass && failures == 0;
    }

    RunResult out;
    out.ok = all_pass;
    out.report = nlohmann::json{{"seed", cfg.seed},
                                {"samples", cfg.samples},
                                {"tolerance", cfg.tolerance},
                                {"checks", checks},
                                {"offenders", offenders},
                                {"pass", all_pass}};
    out.files.push_back(detail::write_json(out.report, dir, "verify_report"));
    return out;
}

inline RunResult run(const RunConfig& cfg) {
    switch (cfg.command) {
        case Command::Region: return run_region(cfg);
        case Command::PureRegion: return run_pure_region(cfg);
        case Command::Repeater: return run_repeater(cfg);
        case Command::Clone: return run_clone(cfg);
        case Command::Anticlone: return run_anticlone(cfg);
        case Command::Verify: return run_verify(cfg);
    }
    throw std::invalid_argument("unknown command");
}

}  // namespace cptpmap
