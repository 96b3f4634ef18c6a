#include "cbflow/burst.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace cbflow {

PhaseDecomposition detect_phases(const FlowSeries& fs, double rc,
                                 const PhaseThresholds& thresholds) {
    PhaseDecomposition d;
    double burst_th = thresholds.burst > 0.0 ? thresholds.burst : 1.0 / rc;
    bool above_prev = false;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        double t = fs.times[i];
        double k = fs.diags[i].sup_K;
        if (k > d.peak_K) {
            d.peak_K = k;
            d.peak_time = t;
        }
        bool above = k >= burst_th;
        if (above != above_prev || (i == 0 && above)) ++d.threshold_crossings;
        above_prev = above;
        if (above) {
            if (!d.burst_detected) d.burst_start = t;
            d.burst_detected = true;
            d.burst_end = t;
        }
    }
    if (d.burst_detected) {
        for (std::size_t i = 0; i < fs.size(); ++i)
            if (fs.times[i] > d.burst_end && fs.diags[i].sup_K <= thresholds.recovery) {
                d.recovery_time = fs.times[i];
                break;
            }
    }
    d.ambiguous = d.threshold_crossings > 2;
    return d;
}

bool BurstReport::checks_pass() const {
    if (!solver_complete || !envelope.pass) return false;
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

bool BurstReport::pass() const {
    if (!checks_pass() || !phases.burst_detected) return false;
    double lo = std::max(phases.burst_start, 0.75);
    double hi = std::min(phases.burst_end, 8.0 / 3.0 + 0.01);
    return hi - lo >= 0.01 - 1e-9;
}

BurstReport run_cb_scenario(double rc, double lc, double horizon,
                            const ScenarioConfig& cfg, FlowSeries* series_out) {
    if (!(rc > 0.0 && rc <= 0.1 + 1e-12))
        throw std::invalid_argument("run_cb_scenario: rc must lie in (0, 1/10]");
    if (!(lc >= 1.0 / (8.0 * rc) - 1e-12))
        throw std::invalid_argument("run_cb_scenario: need lc >= 1/(8 rc)");

    BurstReport rep;
    rep.rc = rc;
    rep.lc = lc;
    rep.params = solve_junctions(rc, lc);
    RadialProfile initial = build_cb_profile(rep.params, cfg.grid);
    CBPropertyReport prop = cb_property_report(initial, rep.params);
    if (!prop.pass()) {
        std::ostringstream msg;
        msg << "run_cb_scenario: surface property checks failed:"
            << " curvature_in_range=" << prop.curvature_in_range
            << " sb_bound_ok=" << prop.sb_bound_ok
            << " bulb_volume_ok=" << prop.bulb_volume_ok
            << " disc_identity_ok=" << prop.disc_identity_ok
            << " (K in [" << prop.min_curvature << ", " << prop.max_curvature
            << "], Vol U_b = " << prop.bulb_volume << ")";
        throw ScenarioError(msg.str());
    }

    SolverConfig scfg = cfg.solver;
    scfg.width_from = -lc / rc;
    scfg.bulb_boundary = 0.0;

    FlowSeries fs;
    if (cfg.run_noose) {
        CoupledResult cr = run_coupled(initial, horizon, scfg, cfg.noose);
        fs = std::move(cr.series);
        rep.extinction_time = cr.extinction_time;
        rep.predicted_T = cr.predicted_T;
        rep.extinct = cr.extinct;
    } else {
        fs = run(initial, horizon, scfg);
    }
    rep.solver_complete = fs.complete;
    rep.phases = detect_phases(fs, rc, cfg.thresholds);
    rep.envelope = curvature_upper_envelope(fs);

    if (cfg.run_checks) {
        try {
            rep.t1 = detect_t1(fs, rc, lc);
        } catch (const std::runtime_error& e) {
            CheckReport bad;
            bad.name = "t1_detection";
            bad.pass = false;
            bad.worst_violation = std::numeric_limits<double>::infinity();
            rep.checks.push_back(bad);
        }
        rep.checks.push_back(check_chen(fs));
        // barrier suite: sphere floor to extinction, early cigar ceiling, and
        // the post-t1 cigar sandwich
        {
            BarrierCheck b;
            b.name = "sphere_lower";
            b.barrier = {BarrierFn::Family::Sphere, 1.0, rep.params.sb, 0.0};
            b.direction = BarrierCheck::Direction::Lower;
            b.t_hi = 1.0 - 1e-9;
            rep.checks.push_back(check_barrier(fs, b));
        }
        {
            BarrierCheck b;
            b.name = "cigar_upper_early";
            b.barrier = {BarrierFn::Family::Cigar, 1.0 / 8.0, rep.params.sb, 0.0};
            b.t_hi = std::min(horizon, 1.0 / rc);
            b.s_lo = -lc / rc;
            rep.checks.push_back(check_barrier(fs, b));
        }
        if (rep.t1 >= 0.0) {
            BarrierCheck b;
            b.name = "cigar_upper_post_t1";
            b.barrier = {BarrierFn::Family::Cigar, 1.0 / (16.0 * rc * rc), 2.0 / rc, rep.t1};
            b.t_lo = rep.t1;
            b.t_hi = rep.t1 + 1.0;  // the translating cigar only dominates for one unit of time
            b.s_lo = -lc / rc;
            rep.checks.push_back(check_barrier(fs, b));

            BarrierCheck b2;
            b2.name = "cigar_lower_post_t1";
            b2.barrier = {BarrierFn::Family::Cigar, 1.0 / (rc * rc), 0.0, rep.t1};
            b2.direction = BarrierCheck::Direction::Lower;
            b2.t_lo = rep.t1;
            rep.checks.push_back(check_barrier(fs, b2));
        }
        rep.checks.push_back(check_conformal_growth(fs));
        rep.checks.push_back(check_plane_floor(fs, rep.params.se));
        if (rep.t1 >= 0.0) {
            rep.checks.push_back(check_claim_floor(fs, rep.t1, rc, lc));
            if (rep.t1 + 1.0 <= fs.times.back() + 1e-9)
                rep.checks.push_back(check_cusp_domination(fs, rep.params, rep.t1 + 1.0, 15.0));
        }
        if (fs.times.back() >= 3.5 - 1e-9)
            rep.checks.push_back(check_cusp_domination(fs, rep.params, 3.5, 16.0));
        if (rep.extinct)
            rep.checks.push_back(check_width_estimate(fs, rep.extinction_time, rc, lc));
        // Bol on the final geometry, tip-centered balls up to most of the area
        const RadialProfile& last = fs.profiles.back();
        double total = tip_side_area(last, last.s.front());
        std::vector<double> areas;
        for (int i = 0; i < 20; ++i)
            areas.push_back(total * 0.9 * std::pow(0.02 / 0.9, 1.0 - i / 19.0));
        rep.checks.push_back(check_bol(last, areas));
    }

    if (series_out) *series_out = std::move(fs);
    return rep;
}

SweepResult sweep_rc(const std::vector<double>& rc_list, double horizon,
                     const ScenarioConfig& cfg, int jobs) {
    SweepResult res;
    res.rows.resize(rc_list.size());

    auto one = [&](std::size_t i) {
        SweepRow& row = res.rows[i];
        row.rc = rc_list[i];
        row.lc = 1.0 / (8.0 * rc_list[i]);
        try {
            row.report = run_cb_scenario(row.rc, row.lc, horizon, cfg);
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    if (jobs <= 1) {
        for (std::size_t i = 0; i < rc_list.size(); ++i) one(i);
    } else {
        std::vector<std::future<void>> pending;
        for (std::size_t i = 0; i < rc_list.size(); ++i) {
            if (pending.size() >= static_cast<std::size_t>(jobs)) {
                pending.front().get();
                pending.erase(pending.begin());
            }
            pending.push_back(std::async(std::launch::async, one, i));
        }
        for (auto& f : pending) f.get();
    }

    // least-squares slope of log(peak K) against log(1/rc)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (const auto& row : res.rows) {
        if (!row.ok || row.report.phases.peak_K <= 0.0) continue;
        double x = std::log(1.0 / row.rc);
        double y = std::log(row.report.phases.peak_K);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m >= 2) {
        double denom = m * sxx - sx * sx;
        if (denom > 1e-12) {
            res.exponent = (m * sxy - sx * sy) / denom;
            res.exponent_valid = true;
        }
    }
    return res;
}

}  // namespace cbflow
