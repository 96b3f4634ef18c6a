#include "cbflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

void note(CheckReport& r, double violation, double t, double s) {
    ++r.samples;
    if (violation > r.worst_violation) {
        r.worst_violation = violation;
        r.worst_t = t;
        r.worst_s = s;
    }
}

void finalize(CheckReport& r) {
    if (r.samples == 0) throw std::runtime_error(r.name + ": empty sample window");
    r.pass = r.worst_violation <= r.tolerance;
}

}  // namespace

CheckReport check_barrier(const FlowSeries& fs, const BarrierCheck& check) {
    CheckReport r;
    r.name = check.name;
    r.tolerance = check.tolerance;
    bool upper = check.direction == BarrierCheck::Direction::Upper;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        double t = fs.times[i];
        if (t < check.t_lo - 1e-12 || t > check.t_hi + 1e-12) continue;
        const RadialProfile& p = fs.profiles[i];
        for (std::size_t j = 0; j < p.s.size(); ++j) {
            double s = p.s[j];
            if (s < check.s_lo || s > check.s_hi) continue;
            double b;
            try {
                b = check.barrier.eval(t, s);
            } catch (const std::domain_error&) {
                continue;  // barrier undefined at this point
            }
            note(r, upper ? p.u[j] - b : b - p.u[j], t, s);
        }
    }
    finalize(r);
    return r;
}

double detect_t1(const FlowSeries& fs, double rc, double lc) {
    double threshold = std::log(rc) + 0.5 * std::log(8.0);
    double s_lo = -lc / rc;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const RadialProfile& p = fs.profiles[i];
        double umax = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < p.s.size(); ++j)
            if (p.s[j] >= s_lo) umax = std::max(umax, p.u[j]);
        if (umax <= threshold) return fs.times[i];
        if (fs.times[i] > 2.5) break;
    }
    throw std::runtime_error("detect_t1: bulb width never dropped below sqrt(8) rc by t = 5/2");
}

CheckReport check_claim_floor(const FlowSeries& fs, double t1, double rc, double lc) {
    CheckReport r;
    r.name = "claim_floor";
    r.tolerance = 1e-3;
    const RadialProfile& p = fs.profiles[fs.frame_at(t1)];
    double s_lo = -lc / rc;
    // argmax of u over the bulb-side window
    double s1 = s_lo, umax = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < p.s.size(); ++j)
        if (p.s[j] >= s_lo && p.u[j] > umax) {
            umax = p.u[j];
            s1 = p.s[j];
        }
    double lrc = std::log(rc);
    for (std::size_t j = 0; j < p.s.size(); ++j) {
        double s = p.s[j];
        if (s < s_lo) continue;
        double floor = (s <= s1) ? lrc : s1 - s + lrc;
        note(r, floor - p.u[j], t1, s);
    }
    finalize(r);
    return r;
}

CheckReport check_cusp_domination(const FlowSeries& fs, const CBParams& params,
                                  double t_eval, double c_cusp, double tol) {
    CheckReport r;
    r.name = "cusp_domination";
    r.tolerance = tol;
    const RadialProfile& p = fs.profiles[fs.frame_at(t_eval)];
    double t = fs.times[fs.frame_at(t_eval)];
    for (std::size_t j = 0; j < p.s.size(); ++j) {
        double s = p.s[j];
        if (s <= params.se) continue;
        double b = -std::log(s - params.se) + std::log(c_cusp);
        note(r, p.u[j] - b, t, s);
    }
    finalize(r);
    return r;
}

CheckReport check_bol(const RadialProfile& profile, const std::vector<double>& target_areas,
                      double rel_tol) {
    CheckReport r;
    r.name = "bol";
    r.tolerance = 0.0;
    CurvatureField f = curvature(profile);
    for (double A : target_areas) {
        GeodesicBall ball = ball_of_area(profile, A);
        double supK = profile.cap.present() ? profile.cap.sup_curvature()
                                            : -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < profile.s.size(); ++j)
            if (f.trusted[j] && profile.s[j] >= ball.coordinate_radius)
                supK = std::max(supK, f.K[j]);
        double V = ball.area;
        double lhs = ball.boundary_length * ball.boundary_length;
        double rhs = 4.0 * kPi * V - V * V * supK;
        double scale = std::max(4.0 * kPi * V, 1.0);
        note(r, (rhs - lhs) / scale - rel_tol, 0.0, ball.coordinate_radius);
    }
    finalize(r);
    return r;
}

namespace {

// band of nodes within metric distance r0 of s_center along the s-direction
std::pair<std::size_t, std::size_t> metric_band(const RadialProfile& p, double s_center,
                                                double r0) {
    std::size_t c = p.nearest_node(s_center);
    std::size_t lo = c, hi = c;
    double d = 0.0;
    while (hi + 1 < p.s.size()) {
        double h = p.s[hi + 1] - p.s[hi];
        double seg = 0.5 * (std::exp(p.u[hi]) + std::exp(p.u[hi + 1])) * h;
        if (d + seg > r0) break;
        d += seg;
        ++hi;
    }
    d = 0.0;
    while (lo > 0) {
        double h = p.s[lo] - p.s[lo - 1];
        double seg = 0.5 * (std::exp(p.u[lo]) + std::exp(p.u[lo - 1])) * h;
        if (d + seg > r0) break;
        d += seg;
        --lo;
    }
    return {lo, hi};
}

double band_abs_curvature(const RadialProfile& p, std::size_t lo, std::size_t hi) {
    CurvatureField f = curvature(p);
    double m = 0.0;
    for (std::size_t j = lo; j <= hi; ++j)
        if (f.trusted[j]) m = std::max(m, std::fabs(f.K[j]));
    return m;
}

}  // namespace

PseudolocalityReport check_pseudolocality(const FlowSeries& fs, double s_center,
                                          double r0, double v0) {
    PseudolocalityReport rep;
    const RadialProfile& p0 = fs.profiles.front();
    auto [lo0, hi0] = metric_band(p0, s_center, r0);
    double vol0 = volume(p0, p0.s[lo0], p0.s[hi0]);
    rep.hypotheses_met = band_abs_curvature(p0, lo0, hi0) <= 1.0 / (r0 * r0) &&
                         vol0 >= v0 * r0 * r0;

    // persistence is tracked on the half-ball of radius r0/2
    rep.holds_to_horizon = true;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const RadialProfile& p = fs.profiles[i];
        auto [lo, hi] = metric_band(p, s_center, 0.5 * r0);
        if (band_abs_curvature(p, lo, hi) > 2.0 / (r0 * r0)) {
            rep.holds_to_horizon = false;
            break;
        }
        rep.t_star = fs.times[i];
    }
    rep.B_emp = (!rep.holds_to_horizon && rep.t_star > 0.0) ? r0 * r0 / rep.t_star : 0.0;
    return rep;
}

CheckReport check_chen(const FlowSeries& fs, double tol) {
    CheckReport r;
    r.name = "chen_lower_bound";
    r.tolerance = tol;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        double bound = -1.0 / (2.0 * fs.times[i] + 1.0);
        note(r, bound - fs.diags[i].inf_K, fs.times[i], 0.0);
    }
    finalize(r);
    return r;
}

CheckReport check_conformal_growth(const FlowSeries& fs, double tol) {
    CheckReport r;
    r.name = "conformal_growth";
    r.tolerance = tol;
    // w = u - 1/2 log(2t+1) must be nonincreasing in t at every node; a running
    // minimum covers every ordered pair of frames.
    std::size_t n = fs.profiles.front().s.size();
    std::vector<double> runmin(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const RadialProfile& p = fs.profiles[i];
        double shift = 0.5 * std::log(2.0 * fs.times[i] + 1.0);
        for (std::size_t j = 0; j < n; ++j) {
            double w = p.u[j] - shift;
            if (i > 0) note(r, w - runmin[j], fs.times[i], p.s[j]);
            runmin[j] = std::min(runmin[j], w);
        }
    }
    finalize(r);
    return r;
}

CheckReport check_width_estimate(const FlowSeries& fs, double T, double rc, double lc,
                                 double tol) {
    CheckReport r;
    r.name = "width_estimate";
    r.tolerance = tol;
    double t_clamped = std::min(T, fs.times.back());
    std::size_t i = fs.frame_at(t_clamped);
    const RadialProfile& p = fs.profiles[i];
    double bound = std::log(rc) + 0.5 * std::log(2.0 * T + 1.0);
    double s_lo = -lc / rc;
    for (std::size_t j = 0; j < p.s.size(); ++j) {
        if (p.s[j] < s_lo) continue;
        note(r, p.u[j] - bound, fs.times[i], p.s[j]);
    }
    finalize(r);
    return r;
}

CheckReport check_plane_floor(const FlowSeries& fs, double se, double tol) {
    CheckReport r;
    r.name = "plane_floor";
    r.tolerance = tol;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const RadialProfile& p = fs.profiles[i];
        for (std::size_t j = 0; j < p.s.size(); ++j)
            note(r, (-p.s[j] + se) - p.u[j], fs.times[i], p.s[j]);
    }
    finalize(r);
    return r;
}

}  // namespace cbflow
