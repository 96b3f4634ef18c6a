#include "cbflow/cb_builder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace cbflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

double log_cosh(double x) {
    double ax = std::fabs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

// u4(s2) - u5(s2) with sb eliminated through the slope matching condition
// rc tan(rc s2) = tanh(sb - s2). Negative at s2 -> 0+, positive towards the
// upper end of the bracket.
double junction_gap(double rc, double s2) {
    double q = rc * std::tan(rc * s2);
    if (!(q < 1.0)) return std::numeric_limits<double>::infinity();
    double u4 = -std::log(std::cos(rc * s2) / rc);
    double u5 = -log_cosh(std::atanh(q)) + 0.5 * std::log(2.0);
    return u4 - u5;
}

}  // namespace

CBParams solve_junctions(double rc, double lc) {
    if (!(rc > 0.0 && rc < 1.0)) throw std::invalid_argument("solve_junctions: rc must be in (0,1)");
    if (!(lc > 0.0)) throw std::invalid_argument("solve_junctions: lc must be positive");
    CBParams p;
    p.rc = rc;
    p.lc = lc;
    p.s0 = -(lc + std::atan(1.0 / rc)) / rc;
    p.se = p.s0 + 0.5 * std::log1p(rc * rc);

    // bisect on s2 in (0, arctan(1/rc)/rc)
    double hi = std::atan(1.0 / rc) / rc;
    double lo = 1e-12 * hi;
    if (!(junction_gap(rc, lo) < 0.0))
        throw std::runtime_error("solve_junctions: failed to bracket the s2 root");
    double fhi = junction_gap(rc, hi * (1.0 - 1e-14));
    if (!(fhi > 0.0) && !std::isinf(fhi))
        throw std::runtime_error("solve_junctions: failed to bracket the s2 root");
    double a = lo, b = hi * (1.0 - 1e-14);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (a + b);
        double f = junction_gap(rc, mid);
        (f < 0.0 ? a : b) = mid;
        if (b - a < 1e-15 * hi) break;
    }
    p.s2 = 0.5 * (a + b);
    p.sb = p.s2 + std::atanh(rc * std::tan(rc * p.s2));

    // the defining equations must be met to solver tolerance
    double res_slope = rc * std::tan(rc * p.s2) - std::tanh(p.sb - p.s2);
    double res_value = (-std::log(std::cos(rc * p.s2) / rc)) -
                       (-log_cosh(p.s2 - p.sb) + 0.5 * std::log(2.0));
    if (std::fabs(res_slope) > 1e-12 || std::fabs(res_value) > 1e-12)
        throw std::runtime_error("solve_junctions: matching residual above tolerance");
    if (!(p.sb <= 1.75 / rc) || !(p.s2 < hi))
        throw std::runtime_error("solve_junctions: solution violates the sb/s2 bounds");
    return p;
}

double u_cb(const CBParams& p, double s) {
    if (s <= p.s0) return -s + p.se;
    if (s < -p.lc / p.rc) return -std::log(std::cos(p.rc * s + p.lc) / p.rc);
    if (s <= 0.0) return std::log(p.rc);
    if (s <= p.s2) return -std::log(std::cos(p.rc * s) / p.rc);
    return -log_cosh(s - p.sb) + 0.5 * std::log(2.0);
}

double u_cb_slope(const CBParams& p, double s) {
    if (s <= p.s0) return -1.0;
    if (s < -p.lc / p.rc) return p.rc * std::tan(p.rc * s + p.lc);
    if (s <= 0.0) return 0.0;
    if (s <= p.s2) return p.rc * std::tan(p.rc * s);
    return -std::tanh(s - p.sb);
}

std::vector<double> make_uniform_grid(double a, double b, double h) {
    if (!(b > a) || !(h > 0.0)) throw std::invalid_argument("make_uniform_grid: bad range");
    std::size_t n = static_cast<std::size_t>(std::ceil((b - a) / h)) + 1;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

namespace {

// Fill (a, b) marching with the local target spacing, then rescale the
// increments so the segment lands exactly on b. Keeps ratios under the
// grading bound as long as the target varies slowly.
void fill_segment(std::vector<double>& out, double a, double b,
                  const std::function<double(double)>& target) {
    std::vector<double> steps;
    double x = a;
    while (x < b - 1e-12) {
        double h = target(x);
        // overshoot rather than emit a tiny final cell; the uniform rescale
        // below keeps neighbour ratios intact
        steps.push_back(h);
        x += h;
    }
    if (steps.empty()) steps.push_back(b - a);
    double sum = 0.0;
    for (double h : steps) sum += h;
    double scale = (b - a) / sum;
    x = a;
    for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
        x += steps[i] * scale;
        out.push_back(x);
    }
    out.push_back(b);
}

}  // namespace

std::vector<double> make_cb_grid(const CBParams& p, const GridSpec& spec) {
    double s_left = spec.s_left != 0.0 ? spec.s_left : p.se - 10.0;
    double s_max = spec.s_max != 0.0 ? spec.s_max : p.sb + 8.0;
    double cyl_left = -p.lc / p.rc;
    if (!(s_left < p.s0) || !(s_max > p.sb))
        throw std::invalid_argument("make_cb_grid: grid does not cover the junctions");

    // local spacing target: fine near the steep junctions s0 and s2, base
    // elsewhere, coarse in the exactly flat plane region
    auto target = [&](double x) {
        double d = std::min(std::fabs(x - p.s0), std::fabs(x - p.s2));
        double h = spec.h_fine;
        if (d > spec.fine_halfwidth)
            h = std::min(spec.h_base, spec.h_fine + spec.growth * (d - spec.fine_halfwidth));
        if (x < p.s0) {
            double dp = p.s0 - x;
            double hp = (dp > spec.fine_halfwidth)
                            ? std::min(spec.h_plane,
                                       spec.h_fine + spec.growth * (dp - spec.fine_halfwidth))
                            : spec.h_fine;
            h = hp;
        }
        return h;
    };

    std::vector<double> g;
    g.push_back(s_left);
    const double anchors[] = {p.s0, cyl_left, 0.0, p.s2, s_max};
    double prev = s_left;
    for (double a : anchors) {
        fill_segment(g, prev, a, target);
        prev = a;
    }
    return g;
}

RadialProfile build_cb_profile(const CBParams& p, const std::vector<double>& grid) {
    if (grid.size() < 3) throw std::invalid_argument("build_cb_profile: grid too small");
    if (!(grid.front() < p.s0) || !(grid.back() > p.sb))
        throw std::invalid_argument("build_cb_profile: grid does not cover the junctions");
    RadialProfile prof;
    prof.s = grid;
    prof.u.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) prof.u[i] = u_cb(p, grid[i]);
    prof.cap.family = CapModel::Family::Sphere;
    prof.cap.attach_s = grid.back();
    prof.cap.a = p.sb;
    prof.cap.c = 0.5 * std::log(2.0);
    prof.validate();
    return prof;
}

RadialProfile build_cb_profile(const CBParams& p, const GridSpec& spec) {
    return build_cb_profile(p, make_cb_grid(p, spec));
}

double cb_bulb_volume_exact(const CBParams& p) {
    return 2.0 * kPi * p.rc * std::tan(p.rc * p.s2) +
           4.0 * kPi * (1.0 + std::tanh(p.sb - p.s2));
}

CBPropertyReport cb_property_report(const RadialProfile& profile, const CBParams& p) {
    CBPropertyReport r;
    CurvatureField f = curvature(profile);
    const double junctions[] = {p.s0, -p.lc / p.rc, 0.0, p.s2};
    double kmin = std::numeric_limits<double>::infinity();
    double kmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < profile.s.size(); ++i) {
        if (!f.trusted[i]) continue;
        double hl = profile.s[i] - profile.s[i - 1];
        double hr = profile.s[i + 1] - profile.s[i];
        bool near_junction = false;
        for (double j : junctions)
            if (std::fabs(profile.s[i] - j) < 2.5 * std::max(hl, hr)) near_junction = true;
        if (near_junction) continue;
        kmin = std::min(kmin, f.K[i]);
        kmax = std::max(kmax, f.K[i]);
    }
    r.min_curvature = kmin;
    r.max_curvature = kmax;
    r.bulb_volume = volume(profile, 0.0, std::numeric_limits<double>::infinity());
    r.sb_times_rc = p.sb * p.rc;
    r.disc_radius = std::exp(-p.s0 + p.se);

    double eps = 1e-3;
    r.curvature_in_range = kmin >= -1.0 - eps && kmax <= 0.5 + eps;
    r.sb_bound_ok = r.sb_times_rc <= 1.75 + 1e-12;
    r.bulb_volume_ok = r.bulb_volume > 2.0 * kPi && r.bulb_volume < 10.0 * kPi;
    r.disc_identity_ok = std::fabs(r.disc_radius - std::sqrt(1.0 + p.rc * p.rc)) < 1e-12;
    return r;
}

}  // namespace cbflow
