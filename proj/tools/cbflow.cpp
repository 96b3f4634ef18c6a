// cbflow: build cylinder-with-bulb surfaces, evolve them under conformal
// Ricci flow, couple the double-speed shrinking loop, and verify the
// quantitative curvature estimates. Exit codes: 0 success, 1 check failure,
// 2 usage error, 3 solver failure.
#include "cbflow/burst.hpp"
#include "cbflow/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace cbflow;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolverFailure = 3;

struct CommonOpts {
    std::string out;  // empty: fresh timestamped directory under ./runs
    double rc = 0.05;
    double lc = 2.5;
    GridSpec grid;
    SolverConfig solver;
    NooseConfig noose;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->set_config("--config", "", "key=value config file; flags override");
    cmd->add_option("--out", o.out, "output directory (default: fresh runs/<stamp>-<cmd>)");
    cmd->add_option("--rc", o.rc, "cylinder radius r_c in (0, 1/10]");
    cmd->add_option("--lc", o.lc, "cylinder half-length parameter l_c");
    cmd->add_option("--h-base", o.grid.h_base, "base grid spacing");
    cmd->add_option("--h-fine", o.grid.h_fine, "fine spacing near the steep junctions");
    cmd->add_option("--h-plane", o.grid.h_plane, "coarse spacing in the flat plane region");
    cmd->add_option("--s-left", o.grid.s_left, "left domain truncation (0: default)");
    cmd->add_option("--s-max", o.grid.s_max, "right domain truncation (0: default)");
    cmd->add_option("--dt-init", o.solver.dt_init, "initial time step");
    cmd->add_option("--dt-max", o.solver.dt_max, "maximum time step");
    cmd->add_option("--record-dt", o.solver.record_dt, "diagnostics cadence");
    cmd->add_option("--dt-k2-safety", o.solver.dt_k2_safety,
                    "curvature-aware dt cap: dt <= safety/K^2 (0 disables)");
    cmd->add_option("--dt-k2-until", o.solver.dt_k2_until,
                    "time until which the curvature-aware cap applies");
    cmd->add_option("--noose-start", o.noose.start_s, "initial loop coordinate");
}

std::string fresh_out_dir(const CommonOpts& o, const std::string& cmd) {
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        return o.out;
    }
    std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", std::localtime(&now));
    // append-never: probe for a free suffix
    for (int k = 0;; ++k) {
        std::ostringstream dir;
        dir << "runs/" << stamp << '-' << cmd;
        if (k > 0) dir << '-' << k;
        if (!fs::exists(dir.str())) {
            fs::create_directories(dir.str());
            return dir.str();
        }
    }
}

nlohmann::json check_to_json(const CheckReport& c) {
    return {{"name", c.name},
            {"pass", c.pass},
            {"worst_violation", c.worst_violation},
            {"worst_t", c.worst_t},
            {"worst_s", c.worst_s},
            {"samples", c.samples},
            {"tolerance", c.tolerance}};
}

void print_check(const CheckReport& c) {
    std::printf("check %-22s %s  worst=%g tol=%g at (t=%g, s=%g)\n", c.name.c_str(),
                c.pass ? "pass" : "FAIL", c.worst_violation, c.tolerance, c.worst_t,
                c.worst_s);
}

SolverConfig cb_solver_config(const CommonOpts& o, const CBParams& params) {
    SolverConfig s = o.solver;
    s.width_from = -params.lc / params.rc;
    s.bulb_boundary = 0.0;
    return s;
}

// ---------------------------------------------------------------------------

int cmd_build(const CommonOpts& o) {
    CBParams params = solve_junctions(o.rc, o.lc);
    RadialProfile profile = build_cb_profile(params, o.grid);
    CBPropertyReport rep = cb_property_report(profile, params);

    std::string dir = fresh_out_dir(o, "build");
    save_profile(dir + "/profile.txt", profile);
    save_json(dir + "/params.json", params_to_json(params));
    nlohmann::json j = {{"rc", params.rc},
                        {"lc", params.lc},
                        {"min_curvature", rep.min_curvature},
                        {"max_curvature", rep.max_curvature},
                        {"bulb_volume", rep.bulb_volume},
                        {"sb_times_rc", rep.sb_times_rc},
                        {"disc_radius", rep.disc_radius},
                        {"curvature_in_range", rep.curvature_in_range},
                        {"sb_bound_ok", rep.sb_bound_ok},
                        {"bulb_volume_ok", rep.bulb_volume_ok},
                        {"disc_identity_ok", rep.disc_identity_ok},
                        {"pass", rep.pass()}};
    save_json(dir + "/report.json", j);

    std::printf("wrote %s: %zu nodes, K in [%g, %g], Vol U_b = %g, sb*rc = %g\n",
                dir.c_str(), profile.size(), rep.min_curvature, rep.max_curvature,
                rep.bulb_volume, rep.sb_times_rc);
    if (!rep.pass()) {
        std::printf("surface property checks FAILED (see %s/report.json)\n", dir.c_str());
        return kExitCheckFailure;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct OracleOpts {
    std::string name;   // cigar | sphere
    double t_end = 1.0;
    int refine = 1;
};

int cmd_flow_oracle(const CommonOpts& o, const OracleOpts& oo) {
    bool cigar = oo.name == "cigar";
    double lambda = 0.125;
    auto exact_u = [&](double t, double s) {
        if (cigar) return cigar_flow(lambda, t, s);
        return -std::log(std::cosh(s)) + 0.5 * std::log(2.0 * (2.0 - t));
    };
    double a = cigar ? -20.0 : -8.0, b = cigar ? 15.0 : 8.0;
    double h0 = cigar ? 0.1 : 0.04, dt0 = cigar ? 0.01 : 0.004;

    std::string dir = fresh_out_dir(o, "flow-oracle");
    std::vector<double> errs;
    nlohmann::json rows = nlohmann::json::array();
    for (int k = 0; k <= oo.refine; ++k) {
        double h = h0 / std::pow(2.0, k);
        double dt = dt0 / std::pow(4.0, k);
        RadialProfile p;
        p.s = make_uniform_grid(a, b, h);
        for (double x : p.s) p.u.push_back(exact_u(0.0, x));
        SolverConfig cfg;
        cfg.left_slope = cigar ? 0.0 : 1.0;
        cfg.right_slope = -1.0;
        long n = std::lround(oo.t_end / dt);
        for (long i = 0; i < n; ++i) p = step(p, dt, cfg);
        double err = 0.0;
        for (std::size_t i = 0; i < p.s.size(); ++i)
            err = std::max(err, std::fabs(p.u[i] - exact_u(oo.t_end, p.s[i])));
        errs.push_back(err);
        nlohmann::json row = {{"h", h}, {"dt", dt}, {"max_error", err}};
        if (k > 0) row["order"] = std::log2(errs[k - 1] / errs[k]);
        rows.push_back(row);
        std::printf("h=%-10g dt=%-10g max_error=%-12g", h, dt, err);
        if (k > 0) std::printf(" order=%.3f", std::log2(errs[k - 1] / errs[k]));
        std::printf("\n");
    }
    bool pass = errs.front() <= 1e-3;
    double order = 0.0;
    if (oo.refine >= 1) {
        order = std::log2(errs[oo.refine - 1] / errs[oo.refine]);
        pass = pass && order >= 1.8;
    }
    nlohmann::json j = {{"oracle", oo.name}, {"t_end", oo.t_end},
                        {"levels", rows},    {"order", order},
                        {"pass", pass}};
    save_json(dir + "/report.json", j);
    if (!pass) {
        std::printf("oracle study FAILED: coarse error %g, observed order %.3f\n",
                    errs.front(), order);
        return kExitCheckFailure;
    }
    return kExitOk;
}

int cmd_flow_cb(const CommonOpts& o, double horizon) {
    CBParams params = solve_junctions(o.rc, o.lc);
    RadialProfile initial = build_cb_profile(params, o.grid);
    FlowSeries series = run(initial, horizon, cb_solver_config(o, params));

    std::string dir = fresh_out_dir(o, "flow");
    Checkpoint ck = to_checkpoint(series);
    ck.has_params = true;
    ck.params = params;
    save_checkpoint(dir + "/run.chk", ck);
    save_diagnostics_csv(dir + "/diagnostics.csv", series);
    std::printf("wrote %s: %zu frames to t=%s, final sup K=%g\n", dir.c_str(),
                series.size(), fmt(series.times.back()).c_str(),
                series.diags.back().sup_K);
    if (!series.complete) {
        std::printf("solver FAILED to reach the horizon (stalled at t=%s)\n",
                    fmt(series.times.back()).c_str());
        return kExitSolverFailure;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_csf(const CommonOpts& o, double horizon) {
    CBParams params = solve_junctions(o.rc, o.lc);
    RadialProfile initial = build_cb_profile(params, o.grid);
    CoupledResult cr = run_coupled(initial, horizon, cb_solver_config(o, params), o.noose);

    std::string dir = fresh_out_dir(o, "csf");
    Checkpoint ck = to_checkpoint(cr.series);
    ck.has_params = true;
    ck.params = params;
    save_checkpoint(dir + "/run.chk", ck);
    save_diagnostics_csv(dir + "/diagnostics.csv", cr.series);
    double rel = cr.extinct && cr.predicted_T > 0.0
                     ? std::fabs(cr.extinction_time - cr.predicted_T) / cr.predicted_T
                     : std::numeric_limits<double>::quiet_NaN();
    nlohmann::json j = {{"extinct", cr.extinct},
                        {"extinction_time", cr.extinction_time},
                        {"predicted_T", cr.predicted_T},
                        {"relative_error", rel}};
    save_json(dir + "/report.json", j);
    if (cr.extinct)
        std::printf("loop extinct at t=%g (area law predicts %g, error %.2f%%)\n",
                    cr.extinction_time, cr.predicted_T, 100.0 * rel);
    else
        std::printf("loop survived to the horizon t=%g\n", cr.series.times.back());
    if (!cr.series.complete) return kExitSolverFailure;
    return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_verify(const CommonOpts& o, const std::string& series_path,
               const std::string& checks_csv) {
    Checkpoint ck = load_checkpoint(series_path);
    if (!ck.has_params)
        throw CLI::ValidationError("--series", "checkpoint lacks the params block");
    const CBParams& params = ck.params;
    CommonOpts oo = o;
    oo.rc = params.rc;
    oo.lc = params.lc;
    SolverConfig scfg = cb_solver_config(oo, params);

    FlowSeries fs;
    fs.times = ck.times;
    fs.profiles = ck.profiles;
    for (const RadialProfile& p : fs.profiles) fs.diags.push_back(compute_diag(p, scfg));

    std::vector<std::string> wanted;
    std::stringstream ss(checks_csv);
    for (std::string tok; std::getline(ss, tok, ',');) wanted.push_back(tok);
    auto requested = [&](const std::string& name) {
        if (wanted.empty()) return true;  // default: everything
        for (const auto& w : wanted)
            if (w == name) return true;
        return false;
    };

    std::vector<CheckReport> checks;
    double t1 = -1.0;
    try {
        t1 = detect_t1(fs, params.rc, params.lc);
    } catch (const std::runtime_error&) {
    }
    if (requested("chen")) checks.push_back(check_chen(fs));
    if (requested("conformal")) checks.push_back(check_conformal_growth(fs));
    if (requested("plane")) checks.push_back(check_plane_floor(fs, params.se));
    if (requested("barriers")) {
        BarrierCheck b;
        b.name = "sphere_lower";
        b.barrier = {BarrierFn::Family::Sphere, 1.0, params.sb, 0.0};
        b.direction = BarrierCheck::Direction::Lower;
        b.t_hi = 1.0 - 1e-9;
        checks.push_back(check_barrier(fs, b));
        BarrierCheck c;
        c.name = "cigar_upper_early";
        c.barrier = {BarrierFn::Family::Cigar, 1.0 / 8.0, params.sb, 0.0};
        c.t_hi = std::min(fs.times.back(), 1.0 / params.rc);
        c.s_lo = -params.lc / params.rc;
        checks.push_back(check_barrier(fs, c));
    }
    if (requested("claim") && t1 >= 0.0)
        checks.push_back(check_claim_floor(fs, t1, params.rc, params.lc));
    if (requested("cusp") && t1 >= 0.0 && t1 + 1.0 <= fs.times.back() + 1e-9)
        checks.push_back(check_cusp_domination(fs, params, t1 + 1.0, 15.0));
    if (requested("width"))
        checks.push_back(check_width_estimate(fs, fs.times.back(), params.rc, params.lc));
    if (requested("bol")) {
        const RadialProfile& last = fs.profiles.back();
        double total = tip_side_area(last, last.s.front());
        std::vector<double> areas;
        for (int i = 0; i < 20; ++i)
            areas.push_back(total * 0.9 * std::pow(0.02 / 0.9, 1.0 - i / 19.0));
        checks.push_back(check_bol(last, areas));
    }
    if (checks.empty())
        throw CLI::ValidationError("--checks", "no recognized check names in: " + checks_csv);

    std::string dir = fresh_out_dir(o, "verify");
    bool all = true;
    nlohmann::json jchecks = nlohmann::json::array();
    for (const auto& c : checks) {
        print_check(c);
        jchecks.push_back(check_to_json(c));
        all = all && c.pass;
    }
    nlohmann::json j = {{"series", series_path}, {"t1", t1}, {"checks", jchecks},
                        {"pass", all}};
    save_json(dir + "/report.json", j);
    return all ? kExitOk : kExitCheckFailure;
}

// ---------------------------------------------------------------------------

int cmd_sweep(const CommonOpts& o, const std::string& rc_csv, double horizon, int jobs) {
    std::vector<double> rcs;
    std::stringstream ss(rc_csv);
    for (std::string tok; std::getline(ss, tok, ',');) rcs.push_back(std::stod(tok));
    if (rcs.empty()) throw CLI::ValidationError("--rc", "empty r_c list");

    ScenarioConfig cfg;
    cfg.grid = o.grid;
    cfg.solver = o.solver;
    cfg.noose = o.noose;
    SweepResult res = sweep_rc(rcs, horizon, cfg, jobs);

    std::string dir = fresh_out_dir(o, "sweep");
    std::ofstream csv(dir + "/sweep.csv");
    csv << "r_c,t1,burst_start,burst_end,peakK,recovery_time\n";
    nlohmann::json jrows = nlohmann::json::array();
    bool all_ok = true;
    for (const SweepRow& row : res.rows) {
        if (!row.ok) {
            all_ok = false;
            csv << fmt(row.rc) << ",,,,,\n";
            jrows.push_back({{"rc", row.rc}, {"ok", false}, {"error", row.error}});
            std::printf("rc=%-8g FAILED: %s\n", row.rc, row.error.c_str());
            continue;
        }
        const BurstReport& r = row.report;
        csv << fmt(row.rc) << ',' << fmt(r.t1) << ',' << fmt(r.phases.burst_start) << ','
            << fmt(r.phases.burst_end) << ',' << fmt(r.phases.peak_K) << ','
            << fmt(r.phases.recovery_time) << '\n';
        nlohmann::json jchecks = nlohmann::json::array();
        for (const auto& c : r.checks) jchecks.push_back(check_to_json(c));
        jrows.push_back({{"rc", row.rc},
                         {"ok", true},
                         {"t1", r.t1},
                         {"burst_start", r.phases.burst_start},
                         {"burst_end", r.phases.burst_end},
                         {"peakK", r.phases.peak_K},
                         {"recovery_time", r.phases.recovery_time},
                         {"ambiguous", r.phases.ambiguous},
                         {"extinction_time", r.extinction_time},
                         {"predicted_T", r.predicted_T},
                         {"checks", jchecks},
                         {"pass", r.pass()}});
        all_ok = all_ok && r.pass();
        std::printf("rc=%-8g t1=%-7g peakK=%-10g burst=[%g, %g] recovery=%g%s\n", row.rc,
                    r.t1, r.phases.peak_K, r.phases.burst_start, r.phases.burst_end,
                    r.phases.recovery_time, r.pass() ? "" : "  [FAIL]");
    }
    nlohmann::json j = {{"rows", jrows},
                        {"exponent", res.exponent},
                        {"exponent_valid", res.exponent_valid},
                        {"pass", all_ok}};
    save_json(dir + "/report.json", j);
    if (res.exponent_valid)
        std::printf("fitted exponent of peak K vs 1/r_c: %.3f\n", res.exponent);
    return all_ok ? kExitOk : kExitCheckFailure;
}

// ---------------------------------------------------------------------------

int cmd_report(const std::string& path) {
    std::string file = path;
    if (fs::is_directory(path)) file = path + "/report.json";
    nlohmann::json j = load_json(file);
    bool pass = j.value("pass", false);
    if (j.contains("checks")) {
        for (const auto& c : j["checks"]) {
            CheckReport r;
            r.name = c.value("name", "?");
            r.pass = c.value("pass", false);
            r.worst_violation = c.value("worst_violation", 0.0);
            r.worst_t = c.value("worst_t", 0.0);
            r.worst_s = c.value("worst_s", 0.0);
            r.tolerance = c.value("tolerance", 0.0);
            print_check(r);
        }
    }
    for (const char* key : {"t1", "peakK", "exponent", "extinction_time", "predicted_T",
                            "bulb_volume", "order"}) {
        if (j.contains(key) && j[key].is_number())
            std::printf("%s = %g\n", key, j[key].get<double>());
    }
    std::printf("overall: %s\n", pass ? "pass" : "FAIL");
    return pass ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conformal Ricci flow laboratory for cylinder-with-bulb surfaces"};
    app.require_subcommand(1);

    CommonOpts common;
    double horizon = 4.5;
    OracleOpts oracle;
    std::string series_path, checks_csv, rc_csv = "0.1,0.05,0.025", report_path;
    int jobs = 1;

    CLI::App* build = app.add_subcommand("build", "construct a CB surface and check it");
    add_common(build, common);

    CLI::App* flow = app.add_subcommand("flow", "evolve under Ricci flow");
    add_common(flow, common);
    flow->add_option("--horizon", horizon, "final time");
    flow->add_option("--oracle", oracle.name, "closed-form study: cigar | sphere")
        ->check(CLI::IsMember({"cigar", "sphere"}));
    flow->add_option("--t-end", oracle.t_end, "oracle study final time");
    flow->add_option("--refine", oracle.refine, "number of grid refinements");

    CLI::App* csf = app.add_subcommand("csf", "coupled flow + shrinking loop");
    add_common(csf, common);
    csf->add_option("--horizon", horizon, "final time");

    CLI::App* verify = app.add_subcommand("verify", "run harness checks on a saved series");
    add_common(verify, common);
    verify->add_option("--series", series_path, "checkpoint file")->required();
    verify->add_option("--checks", checks_csv,
                       "comma list: chen,conformal,plane,barriers,claim,cusp,width,bol "
                       "(default all)");

    CLI::App* sweep = app.add_subcommand("sweep", "burst scenarios across r_c");
    add_common(sweep, common);
    sweep->add_option("--rc-list", rc_csv, "comma-separated r_c values");
    sweep->add_option("--horizon", horizon, "per-run final time");
    sweep->add_option("--jobs", jobs, "concurrent runs");

    CLI::App* report = app.add_subcommand("report", "summarize a saved report");
    report->add_option("path", report_path, "report.json or run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (build->parsed()) return cmd_build(common);
        if (flow->parsed())
            return oracle.name.empty() ? cmd_flow_cb(common, horizon)
                                       : cmd_flow_oracle(common, oracle);
        if (csf->parsed()) return cmd_csf(common, horizon);
        if (verify->parsed()) return cmd_verify(common, series_path, checks_csv);
        if (sweep->parsed()) return cmd_sweep(common, rc_csv, horizon, jobs);
        if (report->parsed()) return cmd_report(report_path);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const NewtonFailure& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kExitSolverFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCheckFailure;
    }
    return kExitUsage;
}
