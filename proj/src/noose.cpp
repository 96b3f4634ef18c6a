#include "cbflow/noose.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

double safe_exp(double x) { return std::exp(std::clamp(x, -700.0, 700.0)); }

double slope_interp(const RadialProfile& p, double x) {
    std::size_t j = p.nearest_node(x);
    std::size_t n = p.s.size();
    if (j == 0) j = 1;
    if (j == n - 1) j = n - 2;
    double sj = p.s[j];
    if (x >= sj && j + 1 < n - 1) {
        double w = (x - sj) / (p.s[j + 1] - sj);
        return (1.0 - w) * p.slope_at(j) + w * p.slope_at(j + 1);
    }
    if (x < sj && j >= 2) {
        double w = (sj - x) / (sj - p.s[j - 1]);
        return (1.0 - w) * p.slope_at(j) + w * p.slope_at(j - 1);
    }
    return p.slope_at(j);
}

// profile interpolated linearly in time between two snapshots on one grid
struct BlendedProfile {
    const RadialProfile* a;
    const RadialProfile* b;
    double w = 0.0;  // 0 -> a, 1 -> b
    RadialProfile materialize() const {
        RadialProfile out;
        out.s = a->s;
        out.u.resize(a->u.size());
        for (std::size_t i = 0; i < out.u.size(); ++i)
            out.u[i] = (1.0 - w) * a->u[i] + w * b->u[i];
        out.cap = (w < 0.5) ? a->cap : b->cap;
        return out;
    }
};

}  // namespace

double noose_velocity(const RadialProfile& p, double rho) {
    if (!(rho > p.s.front() && rho < p.s.back()))
        throw std::out_of_range("noose_velocity: rho at or beyond the grid boundary");
    double u = p.interp_u(rho);
    double us = slope_interp(p, rho);
    return -2.0 * safe_exp(-2.0 * u) * us;
}

CoupledResult run_coupled(const RadialProfile& initial, double horizon,
                          const SolverConfig& scfg, const NooseConfig& ncfg) {
    initial.validate();
    if (!(ncfg.start_s > initial.s.front() && ncfg.start_s < initial.s.back()))
        throw std::invalid_argument("run_coupled: noose start outside the domain");

    CoupledResult res;
    NooseState st;
    st.rho = ncfg.start_s;
    st.length = circle_length(initial, st.rho);
    st.enclosed_area = tip_side_area(initial, st.rho);
    res.predicted_T = st.enclosed_area / (4.0 * kPi);

    RadialProfile prev = initial;
    double t_prev = 0.0;

    auto local_h = [](const RadialProfile& p, double x) {
        std::size_t j = p.nearest_node(x);
        if (j + 1 < p.s.size()) return p.s[j + 1] - p.s[j];
        return p.s[j] - p.s[j - 1];
    };
    double cap_guard = initial.s[initial.s.size() - 3];  // two cells from the cap

    // noose samples at record times (run() lands steps exactly on them)
    std::vector<std::pair<double, NooseState>> samples;
    samples.emplace_back(0.0, st);

    StepObserver obs = [&](double t_new, const RadialProfile& cur, double /*dt*/) {
        if (st.alive) {
            double t = t_prev;
            BlendedProfile bp{&prev, &cur, 0.0};
            while (t < t_new - 1e-15 && st.alive) {
                bp.w = (t - t_prev) / (t_new - t_prev);
                RadialProfile blend = bp.materialize();
                double u = blend.interp_u(st.rho);
                double us = slope_interp(blend, st.rho);
                double uss_scale = std::max(1.0, us * us);
                double lip = 4.0 * safe_exp(-2.0 * u) * uss_scale;
                double dt_n = std::min(t_new - t, ncfg.substep_safety / lip);
                // explicit midpoint
                double v1 = noose_velocity(blend, st.rho);
                double rho_half = st.rho + 0.5 * dt_n * v1;
                if (rho_half >= cap_guard) {
                    st.rho = cap_guard;
                } else {
                    bp.w = (t + 0.5 * dt_n - t_prev) / (t_new - t_prev);
                    RadialProfile mid = bp.materialize();
                    double v2 = noose_velocity(mid, rho_half);
                    st.rho = std::min(st.rho + dt_n * v2, cap_guard);
                }
                t += dt_n;
                bp.w = (t - t_prev) / (t_new - t_prev);
                RadialProfile now = bp.materialize();
                st.length = circle_length(now, st.rho);
                st.enclosed_area = tip_side_area(now, st.rho);
                double cell = 2.0 * kPi * safe_exp(2.0 * now.interp_u(st.rho)) *
                              local_h(now, st.rho);
                if (st.enclosed_area < ncfg.extinct_cells * cell || st.rho >= cap_guard) {
                    st.alive = false;
                    res.extinct = true;
                    res.extinction_time = t;
                }
            }
        }
        prev = cur;
        t_prev = t_new;
        // sample on the record cadence
        double k = std::round(t_new / scfg.record_dt);
        if (std::fabs(t_new - k * scfg.record_dt) < 1e-9) samples.emplace_back(t_new, st);
    };

    res.series = run(initial, horizon, scfg, {obs});

    // merge noose samples into the per-frame diagnostics
    res.per_frame.resize(res.series.size());
    std::size_t si = 0;
    for (std::size_t i = 0; i < res.series.size(); ++i) {
        while (si + 1 < samples.size() && samples[si].first < res.series.times[i] - 1e-9) ++si;
        const NooseState& ns = samples[si].second;
        res.per_frame[i] = ns;
        if (ns.alive || (res.extinct && samples[si].first <= res.extinction_time + 1e-9)) {
            res.series.diags[i].noose_rho = ns.rho;
            res.series.diags[i].noose_len = ns.length;
            res.series.diags[i].noose_area = ns.enclosed_area;
        }
    }
    return res;
}

RatioReport tracked_circle_growth(const FlowSeries& fs, double t1, double t2,
                                  double s_lo, double s_hi, double tol) {
    if (!(t1 <= t2)) throw std::invalid_argument("tracked_circle_growth: need t1 <= t2");
    RatioReport r;
    const RadialProfile& p1 = fs.profiles[fs.frame_at(t1)];
    const RadialProfile& p2 = fs.profiles[fs.frame_at(t2)];
    double ratio = std::sqrt((2.0 * t2 + 1.0) / (2.0 * t1 + 1.0));
    for (std::size_t i = 0; i < p1.s.size(); ++i) {
        double s = p1.s[i];
        if (s < s_lo || s > s_hi) continue;
        double l1 = circle_length(p1, s);
        double l2 = circle_length(p2, s);
        double excess = l2 - ratio * l1;
        ++r.circles;
        if (excess > r.worst_violation) {
            r.worst_violation = excess;
            r.worst_s = s;
        }
    }
    r.pass = r.worst_violation <= tol;
    return r;
}

}  // namespace cbflow
