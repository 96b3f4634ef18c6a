#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cbflow/cb_builder.hpp"
#include "cbflow/exact.hpp"
#include "cbflow/verify.hpp"

#include <cmath>

using namespace cbflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

// analytic series on a fixed grid with diagnostics filled in
FlowSeries analytic_series(double a, double b, double h, double t_end, double dt,
                           const std::function<double(double, double)>& u) {
    FlowSeries fs;
    std::vector<double> grid = make_uniform_grid(a, b, h);
    SolverConfig cfg;
    cfg.width_from = a;
    cfg.bulb_boundary = a;
    long n = std::lround(t_end / dt);
    for (long k = 0; k <= n; ++k) {
        double t = dt * static_cast<double>(k);
        RadialProfile p;
        p.s = grid;
        for (double x : grid) p.u.push_back(u(t, x));
        fs.times.push_back(t);
        fs.diags.push_back(compute_diag(p, cfg));
        fs.profiles.push_back(std::move(p));
    }
    return fs;
}

double sphere_ext2(double t, double s) {
    return -std::log(std::cosh(s)) + 0.5 * std::log(2.0 * (2.0 - t));
}

}  // namespace

TEST_CASE("barrier check: exact sphere flow against shifted copies") {
    FlowSeries fs = analytic_series(-6.0, 6.0, 0.05, 1.0, 0.1, sphere_ext2);

    BarrierCheck up;
    up.name = "upper";
    up.barrier = {BarrierFn::Family::Sphere, 2.0, 0.0, 0.05};  // slightly delayed clock
    CheckReport ru = check_barrier(fs, up);
    CHECK(ru.pass);
    CHECK(ru.worst_violation < 0.0);
    CHECK(ru.samples == 11 * fs.profiles.front().s.size());

    BarrierCheck lo = up;
    lo.name = "lower";
    lo.barrier.t_shift = -0.05;
    lo.direction = BarrierCheck::Direction::Lower;
    CheckReport rl = check_barrier(fs, lo);
    CHECK(rl.pass);

    // window restrictions shrink the sample count
    BarrierCheck win = up;
    win.t_lo = 0.45;
    win.t_hi = 0.55;
    win.s_lo = 0.0;
    CheckReport rw = check_barrier(fs, win);
    CHECK(rw.samples < ru.samples / 10);

    // a bumped node is reported with its exact witness
    FlowSeries bad = fs;
    std::size_t jmid = bad.profiles[5].s.size() / 2;
    bad.profiles[5].u[jmid] += 0.5;
    CheckReport rb = check_barrier(bad, up);
    CHECK_FALSE(rb.pass);
    CHECK(rb.worst_violation == doctest::Approx(0.5).epsilon(0.1));
    CHECK(rb.worst_t == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::fabs(rb.worst_s - bad.profiles[5].s[jmid]) < 1e-12);
}

TEST_CASE("barrier check skips times where the barrier is undefined") {
    // frames past the barrier's extinction are silently excluded ...
    FlowSeries fs = analytic_series(-4.0, 4.0, 0.1, 1.0, 0.1,
                                    [](double, double s) { return -std::fabs(s); });
    BarrierCheck b;
    b.name = "short_lived";
    b.barrier = {BarrierFn::Family::Sphere, 0.5, 0.0, 0.0};  // extinct at t = 1/2
    CheckReport r = check_barrier(fs, b);
    CHECK(r.samples == 5 * fs.profiles.front().s.size());
    // ... and an entirely empty window is an error, not a silent pass
    b.t_lo = 0.6;
    CHECK_THROWS_AS(check_barrier(fs, b), std::runtime_error);
}

TEST_CASE("t1 detection on a synthetic collapse") {
    double rc = 0.1, lc = 1.25;
    // bulb height decays linearly; crosses log(rc) + 1/2 log 8 at t = 1.3
    auto u = [rc](double t, double s) {
        double bump = std::exp(-s * s) * (2.6 - t) * 0.5 * std::log(8.0) / 1.3;
        return std::log(rc) + std::max(bump, 0.0);
    };
    FlowSeries fs = analytic_series(-15.0, 10.0, 0.05, 2.0, 0.1, u);
    double t1 = detect_t1(fs, rc, lc);
    CHECK(t1 == doctest::Approx(1.3).epsilon(1e-9));

    // never collapsing: the detector must refuse rather than extrapolate
    FlowSeries flat = analytic_series(-15.0, 10.0, 0.05, 3.0, 0.1,
                                      [rc](double, double) { return std::log(rc) + 2.0; });
    CHECK_THROWS_AS(detect_t1(flat, rc, lc), std::runtime_error);
}

TEST_CASE("claim floor holds with equality on a flat cylinder") {
    double rc = 0.1, lc = 1.25;
    FlowSeries fs = analytic_series(-15.0, 10.0, 0.05, 1.0, 0.5,
                                    [rc](double, double) { return std::log(rc); });
    CheckReport r = check_claim_floor(fs, 0.5, rc, lc);
    CHECK(r.pass);
    CHECK(std::fabs(r.worst_violation) < 1e-12);  // exact equality left of s1

    FlowSeries bad = fs;
    bad.profiles[1].u[50] -= 0.2;  // a dent below the floor, right at s = -lc/rc
    CheckReport rb = check_claim_floor(bad, 0.5, rc, lc);
    CHECK_FALSE(rb.pass);
    CHECK(rb.worst_violation == doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("cusp domination on the static plane") {
    CBParams params = solve_junctions(0.1, 1.25);
    auto plane = [&](double, double s) { return -s + params.se; };
    FlowSeries fs = analytic_series(params.se - 5.0, params.se + 30.0, 0.05, 1.0, 0.5, plane);
    // sup_x x e^{-x} = 1/e, far below the constant 15
    CheckReport r = check_cusp_domination(fs, params, 1.0, 15.0);
    CHECK(r.pass);
    CheckReport tight = check_cusp_domination(fs, params, 1.0, 1.0 / std::exp(1.0) + 1e-6);
    CHECK(tight.pass);
    CHECK(tight.worst_violation > -1e-2);  // saturated at s - se = 1
    CHECK_FALSE(check_cusp_domination(fs, params, 1.0, 0.2).pass);
}

TEST_CASE("Bol is an equality on round spherical caps and fails on a capless cylinder") {
    RadialProfile sph;
    sph.s = make_uniform_grid(-8.0, 8.0, 0.01);
    for (double x : sph.s) sph.u.push_back(-std::log(std::cosh(x)) + 0.5 * std::log(2.0));
    sph.cap.family = CapModel::Family::Sphere;
    sph.cap.attach_s = sph.s.back();
    sph.cap.a = 0.0;
    sph.cap.c = 0.5 * std::log(2.0);
    // total area 8 pi; equality (L)^2 = 4 pi V - V^2 / 2 for every cap
    CheckReport r = check_bol(sph, {0.5, 2.0, 4.0 * kPi, 20.0}, 1e-4);
    CHECK(r.pass);
    CHECK(r.worst_violation > -2e-4);  // genuinely saturated, not just slack

    // a long capless cylinder band is not a disc and must be flagged
    RadialProfile cyl;
    cyl.s = make_uniform_grid(0.0, 200.0, 0.5);
    for (std::size_t i = 0; i < cyl.s.size(); ++i) cyl.u.push_back(0.0);
    CheckReport rc = check_bol(cyl, {400.0 * kPi});
    CHECK_FALSE(rc.pass);
}

TEST_CASE("pseudolocality verdicts") {
    // static unit-width cylinder: hypotheses hold, curvature persists forever
    auto flat = [](double, double) { return 0.0; };
    FlowSeries fs = analytic_series(-20.0, 20.0, 0.05, 1.0, 0.1, flat);
    PseudolocalityReport ok = check_pseudolocality(fs, 0.0, 1.0, 1.0);
    CHECK(ok.hypotheses_met);
    CHECK(ok.holds_to_horizon);
    CHECK(ok.B_emp == 0.0);

    // curvature spike appearing at t = 0.5 inside the half-ball breaks persistence
    FlowSeries spiked = fs;
    for (std::size_t i = 5; i < spiked.size(); ++i) {
        RadialProfile& p = spiked.profiles[i];
        for (std::size_t j = 0; j < p.s.size(); ++j)
            p.u[j] += -2.0 * std::exp(-p.s[j] * p.s[j] / 0.02);
    }
    PseudolocalityReport broken = check_pseudolocality(spiked, 0.0, 1.0, 1.0);
    CHECK(broken.hypotheses_met);
    CHECK_FALSE(broken.holds_to_horizon);
    CHECK(broken.t_star == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(broken.B_emp == doctest::Approx(1.0 / 0.4).epsilon(1e-9));

    // initial data violating the curvature hypothesis is reported as such
    FlowSeries sph = analytic_series(-6.0, 6.0, 0.02, 0.1, 0.1, sphere_ext2);
    PseudolocalityReport hyp = check_pseudolocality(sph, 0.0, 4.0, 1e-6);
    CHECK_FALSE(hyp.hypotheses_met);  // |K| = 1/4 > 1/r0^2 = 1/16
}

TEST_CASE("Chen lower bound on the exact sphere and an injected violation") {
    FlowSeries fs = analytic_series(-6.0, 6.0, 0.02, 1.0, 0.1, sphere_ext2);
    CheckReport r = check_chen(fs);
    CHECK(r.pass);  // inf K = 1/(2(2-t)) > 0 > -1/(2t+1)

    FlowSeries bad = fs;
    bad.diags[5].inf_K = -1.0;  // bound at t = 0.5 is -1/2
    CheckReport rb = check_chen(bad);
    CHECK_FALSE(rb.pass);
    CHECK(rb.worst_violation == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rb.worst_t == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("conformal growth covers every ordered pair of frames") {
    // translating cigar: u is pointwise nonincreasing, so w is too
    double lambda = 0.25;
    FlowSeries fs = analytic_series(-10.0, 10.0, 0.05, 1.0, 0.1, [lambda](double t, double s) {
        return cigar_flow(lambda, t, s);
    });
    CheckReport r = check_conformal_growth(fs);
    CHECK(r.pass);

    // a late bump must be caught even against the much earlier minimum
    FlowSeries bad = fs;
    bad.profiles.back().u[200] += 0.3;
    CheckReport rb = check_conformal_growth(bad);
    CHECK_FALSE(rb.pass);
    CHECK(rb.worst_t == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("width estimate and plane floor") {
    double rc = 0.1, lc = 1.25;
    // cylinder fattening exactly at the allowed sqrt(2t+1) rate
    auto u = [rc, lc](double t, double s) {
        double base = std::log(rc) + 0.5 * std::log(2.0 * t + 1.0);
        return (s < -lc / rc) ? base + 1.0 : base;  // excess only outside the window
    };
    FlowSeries fs = analytic_series(-30.0, 10.0, 0.05, 2.0, 0.1, u);
    CheckReport r = check_width_estimate(fs, 2.0, rc, lc);
    CHECK(r.pass);
    CHECK(std::fabs(r.worst_violation) < 1e-9);  // saturated
    // fattening beyond the sqrt(2t+1) budget must be caught
    FlowSeries fat = analytic_series(-30.0, 10.0, 0.05, 2.0, 0.1, [rc](double t, double) {
        return std::log(rc) + 0.6 * std::log(2.0 * t + 1.0);
    });
    CHECK_FALSE(check_width_estimate(fat, 2.0, rc, lc).pass);

    CBParams params = solve_junctions(rc, lc);
    auto plane = [&](double, double s) { return std::max(-s + params.se, std::log(rc)); };
    FlowSeries pf = analytic_series(params.se - 8.0, params.se + 8.0, 0.05, 1.0, 0.5, plane);
    CheckReport rp = check_plane_floor(pf, params.se);
    CHECK(rp.pass);
    FlowSeries sag = pf;
    for (double& v : sag.profiles.back().u) v -= 0.1;
    CHECK_FALSE(check_plane_floor(sag, params.se).pass);
}
