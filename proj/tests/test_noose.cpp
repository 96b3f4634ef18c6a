#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cbflow/cb_builder.hpp"
#include "cbflow/noose.hpp"

#include <cmath>

using namespace cbflow;

namespace {

constexpr double kPi = 3.14159265358979323846;

RadialProfile sphere_profile(double offset) {
    // u = -log cosh(s) + offset, capped analytically on the right
    RadialProfile p;
    p.s = make_uniform_grid(-8.0, 8.0, 0.02);
    for (double x : p.s) p.u.push_back(-std::log(std::cosh(x)) + offset);
    p.cap.family = CapModel::Family::Sphere;
    p.cap.attach_s = p.s.back();
    p.cap.a = 0.0;
    p.cap.c = offset;
    return p;
}

}  // namespace

TEST_CASE("velocity matches the closed form and vanishes on a cylinder") {
    RadialProfile cyl;
    cyl.s = make_uniform_grid(0.0, 5.0, 0.05);
    for (std::size_t i = 0; i < cyl.s.size(); ++i) cyl.u.push_back(std::log(0.3));
    CHECK(std::fabs(noose_velocity(cyl, 2.5)) < 1e-12);

    RadialProfile sph = sphere_profile(0.5 * std::log(2.0));
    for (double rho : {-2.0, -0.5, 0.37, 3.0}) {
        double u = -std::log(std::cosh(rho)) + 0.5 * std::log(2.0);
        double expected = -2.0 * std::exp(-2.0 * u) * (-std::tanh(rho));
        CHECK(noose_velocity(sph, rho) == doctest::Approx(expected).epsilon(1e-3));
    }
    // the equator is a fixed point
    CHECK(std::fabs(noose_velocity(sph, 0.0)) < 1e-8);

    CHECK_THROWS_AS(noose_velocity(sph, -9.0), std::out_of_range);
    CHECK_THROWS_AS(noose_velocity(sph, 8.0), std::out_of_range);
}

TEST_CASE("enclosed area drains at exactly 4 pi on the shrinking sphere") {
    // extinction-2 sphere; the noose starts on the equator and stays there by
    // symmetry, so the tracked area is half the total: 8 pi - 4 pi t
    RadialProfile p = sphere_profile(0.5 * std::log(4.0));
    SolverConfig scfg;
    scfg.left_slope = 1.0;
    scfg.right_slope = -1.0;
    NooseConfig ncfg;
    ncfg.start_s = 0.0;
    CoupledResult cr = run_coupled(p, 1.0, scfg, ncfg);
    REQUIRE(cr.series.complete);
    CHECK(cr.predicted_T == doctest::Approx(2.0).epsilon(1e-3));
    CHECK_FALSE(cr.extinct);
    for (std::size_t i = 0; i < cr.series.size(); ++i) {
        double t = cr.series.times[i];
        double expected = 8.0 * kPi - 4.0 * kPi * t;
        CHECK(cr.series.diags[i].noose_area == doctest::Approx(expected).epsilon(0.01));
        CHECK(std::fabs(cr.per_frame[i].rho) < 0.05);  // pinned to the equator
    }
    // circle length follows the shrinking equator: 2 pi sqrt(2(2-t))
    double l_end = cr.per_frame.back().length;
    CHECK(l_end == doctest::Approx(2.0 * kPi * std::sqrt(2.0)).epsilon(0.01));
}

TEST_CASE("noose reaches extinction on the collapsing bulb") {
    CBParams params = solve_junctions(0.1, 1.25);
    RadialProfile initial = build_cb_profile(params);
    SolverConfig scfg;
    scfg.width_from = -params.lc / params.rc;
    NooseConfig ncfg;  // starts on the bulb boundary s = 0
    CoupledResult cr = run_coupled(initial, 3.0, scfg, ncfg);
    REQUIRE(cr.series.complete);
    REQUIRE(cr.extinct);
    // both the measured extinction time and the area-law prediction agree with
    // the closed-form bulb volume over 4 pi
    double q = std::sqrt((2.0 - params.rc * params.rc) / 3.0);
    double T = 1.0 + 1.5 * q;
    CHECK(cr.predicted_T == doctest::Approx(T).epsilon(1e-3));
    CHECK(cr.extinction_time == doctest::Approx(T).epsilon(0.05));
    // the fattening bulb first pushes the noose into the cylinder; it stays
    // well inside the domain throughout
    CHECK(cr.per_frame[cr.series.frame_at(1.0)].rho < -0.5);
    for (const NooseState& ns : cr.per_frame)
        if (ns.alive) {
            CHECK(ns.rho > initial.s.front() + 1.0);
            CHECK(ns.rho < initial.s.back());
        }
    // diagnostics columns are populated while alive, NaN after extinction
    bool saw_nan = false;
    for (std::size_t i = 0; i < cr.series.size(); ++i) {
        if (cr.series.times[i] > cr.extinction_time + 0.011) {
            CHECK(std::isnan(cr.series.diags[i].noose_rho));
            saw_nan = true;
        }
    }
    CHECK(saw_nan);
}

TEST_CASE("tracked circle growth obeys the sqrt-ratio bound") {
    CBParams params = solve_junctions(0.1, 1.25);
    RadialProfile initial = build_cb_profile(params);
    SolverConfig scfg;
    FlowSeries fs = run(initial, 0.5, scfg);
    REQUIRE(fs.complete);
    RatioReport r = tracked_circle_growth(fs, 0.0, 0.5, -params.lc / params.rc,
                                          params.s2, 1e-6);
    CHECK(r.pass);
    CHECK(r.circles > 10);

    // an artificially fattened late frame must be flagged
    FlowSeries bad = fs;
    for (double& u : bad.profiles.back().u) u += 1.0;
    RatioReport rb = tracked_circle_growth(bad, 0.0, 0.5, -params.lc / params.rc,
                                           params.s2, 1e-6);
    CHECK_FALSE(rb.pass);
    CHECK(rb.worst_violation > 0.1);

    CHECK_THROWS_AS(tracked_circle_growth(fs, 0.5, 0.0, 0.0, 1.0, 1e-6),
                    std::invalid_argument);
}
