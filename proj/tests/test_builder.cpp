#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cbflow/cb_builder.hpp"

#include <cmath>

using namespace cbflow;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("closed-form junction constants") {
    CBParams p = solve_junctions(0.1, 1.25);
    CHECK(p.s0 == doctest::Approx(-27.2112767430).epsilon(1e-10));
    CHECK(p.se == doctest::Approx(p.s0 + 0.5 * std::log(1.01)).epsilon(1e-14));
    CHECK(p.se == doctest::Approx(-27.2063014).epsilon(1e-7));

    // independent root of u2'(s0) = -1, i.e. rc tan(rc s + lc) = -1
    double a = -(1.25 + kPi / 2.0 - 1e-9) / 0.1, b = -1.25 / 0.1;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (a + b);
        double slope = 0.1 * std::tan(0.1 * mid + 1.25);
        (slope < -1.0 ? a : b) = mid;
    }
    CHECK(p.s0 == doctest::Approx(0.5 * (a + b)).epsilon(1e-10));
}

TEST_CASE("s2 solves the C1 matching system with the analytic invariant") {
    // eliminating (s2, sb) from the matching equations forces
    // q = rc tan(rc s2) = tanh(sb - s2) = sqrt((2 - rc^2)/3)
    for (double rc : {0.1, 0.05, 0.025, 0.0125}) {
        CBParams p = solve_junctions(rc, 2.5);
        double q = std::sqrt((2.0 - rc * rc) / 3.0);
        CHECK(rc * std::tan(rc * p.s2) == doctest::Approx(q).epsilon(1e-10));
        CHECK(std::tanh(p.sb - p.s2) == doctest::Approx(q).epsilon(1e-10));
        // residuals of the defining equations
        double res_slope = rc * std::tan(rc * p.s2) - std::tanh(p.sb - p.s2);
        double res_value = -std::log(std::cos(rc * p.s2) / rc) +
                           std::log(std::cosh(p.s2 - p.sb)) - 0.5 * std::log(2.0);
        CHECK(std::fabs(res_slope) < 1e-12);
        CHECK(std::fabs(res_value) < 1e-12);
        // bounds
        CHECK(p.sb * rc <= 1.75);
        CHECK(p.s2 > 0.0);
        CHECK(p.s2 < std::atan(1.0 / rc) / rc);
        CHECK(p.sb > p.s2);
    }
    CHECK_THROWS_AS(solve_junctions(1.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_junctions(0.1, -1.0), std::invalid_argument);
}

TEST_CASE("assembled profile is C0 and C1 at the junctions") {
    CBParams p = solve_junctions(0.05, 2.5);
    const double junctions[] = {p.s0, -p.lc / p.rc, 0.0, p.s2};
    for (double j : junctions) {
        double eps = 1e-7;
        double gap = std::fabs(u_cb(p, j - eps) - u_cb(p, j + eps));
        double kink = std::fabs(u_cb_slope(p, j - eps) - u_cb_slope(p, j + eps));
        CHECK(gap < 1e-6);
        CHECK(kink < 1e-6);
    }
    // continuity values pinned at the cylinder junctions
    CHECK(u_cb(p, -p.lc / p.rc) == doctest::Approx(std::log(p.rc)).epsilon(1e-12));
    CHECK(u_cb(p, 0.0) == doctest::Approx(std::log(p.rc)).epsilon(1e-12));
    CHECK(u_cb(p, p.s0 - 5.0) == doctest::Approx(-(p.s0 - 5.0) + p.se).epsilon(1e-12));
}

TEST_CASE("default grid covers the junctions exactly with bounded grading") {
    CBParams p = solve_junctions(0.05, 2.5);
    std::vector<double> g = make_cb_grid(p, {});
    REQUIRE(g.size() > 100);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) CHECK(g[i] < g[i + 1]);
    // junctions are nodes
    for (double j : {p.s0, -p.lc / p.rc, 0.0, p.s2}) {
        double best = 1e9;
        for (double x : g) best = std::min(best, std::fabs(x - j));
        CHECK(best < 1e-12);
    }
    // spacing ratio contract
    double worst_ratio = 1.0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        double r = (g[i + 1] - g[i]) / (g[i] - g[i - 1]);
        worst_ratio = std::max(worst_ratio, std::max(r, 1.0 / r));
    }
    CHECK(worst_ratio <= 1.2);
}

TEST_CASE("bulb volume quadrature matches the closed form") {
    CBParams p = solve_junctions(0.05, 2.5);
    RadialProfile prof = build_cb_profile(p);
    double exact = cb_bulb_volume_exact(p);
    double quad = volume(prof, 0.0, std::numeric_limits<double>::infinity());
    CHECK(quad == doctest::Approx(exact).epsilon(1e-5));
    // analytic identity: Vol U_b = 4 pi + 6 pi q
    double q = std::sqrt((2.0 - p.rc * p.rc) / 3.0);
    CHECK(exact == doctest::Approx(4.0 * kPi + 6.0 * kPi * q).epsilon(1e-12));
}

TEST_CASE("surface property report across the rc sweep") {
    for (double rc : {0.1, 0.05, 0.025, 0.0125}) {
        CBParams p = solve_junctions(rc, 2.5);
        RadialProfile prof = build_cb_profile(p);
        CBPropertyReport r = cb_property_report(prof, p);
        CAPTURE(rc);
        CHECK(r.curvature_in_range);
        CHECK(r.min_curvature >= -1.0 - 1e-3);
        CHECK(r.max_curvature <= 0.5 + 1e-3);
        CHECK(r.sb_bound_ok);
        CHECK(r.bulb_volume_ok);
        CHECK(r.bulb_volume > 2.0 * kPi);
        CHECK(r.bulb_volume < 10.0 * kPi);
        CHECK(r.disc_identity_ok);
        CHECK(r.pass());
    }
}

TEST_CASE("grid must cover the junctions") {
    CBParams p = solve_junctions(0.05, 2.5);
    GridSpec bad;
    bad.s_left = p.s0 + 1.0;  // starts right of the plane junction
    CHECK_THROWS_AS(make_cb_grid(p, bad), std::invalid_argument);
}
