#include "cbflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbflow {

namespace {

double safe_exp(double x) { return std::exp(std::clamp(x, -700.0, 700.0)); }

// Thomas algorithm; overwrites the inputs.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs) {
    std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

std::size_t FlowSeries::frame_at(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] >= t - 1e-9) return i;
    throw std::out_of_range("FlowSeries::frame_at: time beyond recorded horizon");
}

RadialProfile step(const RadialProfile& p, double dt, const SolverConfig& cfg) {
    std::size_t n = p.s.size();
    std::vector<double> v = p.u;
    std::vector<double> lower(n), diag(n), upper(n), rhs(n);

    for (int iter = 0; iter < cfg.newton_max_iter; ++iter) {
        // residual and tridiagonal Jacobian of
        //   F_i = v_i - u_i - dt e^{-2 v_i} (D2 v)_i      (interior)
        //   F_0 = (v_1 - v_0) - slopeL h0,  F_{n-1} = (v_{n-1} - v_{n-2}) - slopeR h
        double h0 = p.s[1] - p.s[0];
        rhs[0] = -((v[1] - v[0]) - cfg.left_slope * h0);
        diag[0] = -1.0;
        upper[0] = 1.0;
        double hn = p.s[n - 1] - p.s[n - 2];
        rhs[n - 1] = -((v[n - 1] - v[n - 2]) - cfg.right_slope * hn);
        diag[n - 1] = 1.0;
        lower[n - 1] = -1.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double hl = p.s[i] - p.s[i - 1], hr = p.s[i + 1] - p.s[i];
            double cl = 2.0 / (hl * (hl + hr));
            double cc = 2.0 / (hl * hr);
            double cr = 2.0 / (hr * (hl + hr));
            double d2 = cl * v[i - 1] - cc * v[i] + cr * v[i + 1];
            double e = std::min(safe_exp(-2.0 * v[i]), cfg.diffusion_cap);
            double F = v[i] - p.u[i] - dt * e * d2;
            if (!std::isfinite(F)) throw NewtonFailure("step: non-finite residual");
            rhs[i] = -F;
            lower[i] = -dt * e * cl;
            diag[i] = 1.0 + 2.0 * dt * e * d2 + dt * e * cc;
            upper[i] = -dt * e * cr;
        }
        solve_tridiagonal(lower, diag, upper, rhs);
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(rhs[i])) throw NewtonFailure("step: non-finite update");
            v[i] += rhs[i];
            delta = std::max(delta, std::fabs(rhs[i]));
        }
        if (delta <= cfg.newton_tol) {
            RadialProfile out;
            out.s = p.s;
            out.u = std::move(v);
            out.cap = p.cap;
            if (out.cap.present() && n >= 3) {
                // refit the analytic tip cap at the last interior node
                std::size_t i = n - 2;
                double hl = p.s[i] - p.s[i - 1], hr = p.s[i + 1] - p.s[i];
                double us = (-hr / (hl * (hl + hr))) * out.u[i - 1] +
                            ((hr - hl) / (hl * hr)) * out.u[i] +
                            (hl / (hr * (hl + hr))) * out.u[i + 1];
                double uss = 2.0 * (out.u[i - 1] / (hl * (hl + hr)) - out.u[i] / (hl * hr) +
                                    out.u[i + 1] / (hr * (hl + hr)));
                // roundoff noise in the second difference: eps * |u| / h^2
                double floor = 1e-13 * std::max(1.0, std::fabs(out.u[i])) / (hl * hr);
                CapModel m = CapModel::fit(p.s[i], out.u[i], us, uss, floor);
                m.attach_s = p.s[n - 1];
                out.cap = m;
            }
            return out;
        }
    }
    throw NewtonFailure("step: Newton iteration did not converge");
}

FrameDiag compute_diag(const RadialProfile& p, const SolverConfig& cfg) {
    FrameDiag d;
    CurvatureField f = curvature(p);
    // sup/inf over the resolved grid only: the analytic tail cap is a boundary
    // closure whose extrapolated curvature is not a measurement (it still
    // feeds the conservative step-size limiter)
    d.sup_K = f.sup_trusted();
    d.inf_K = f.inf_trusted();
    double inf = std::numeric_limits<double>::infinity();
    d.vol_total = volume(p, p.s.front(), p.cap.present() ? inf : p.s.back());
    d.vol_bulb = volume(p, cfg.bulb_boundary, p.cap.present() ? inf : p.s.back());
    d.width = width(p, cfg.width_from, p.s.back());
    return d;
}

FlowSeries run(const RadialProfile& initial, double t_end, const SolverConfig& cfg,
               const std::vector<StepObserver>& observers) {
    initial.validate();
    if (!(t_end > 0.0)) throw std::invalid_argument("run: t_end must be positive");
    FlowSeries fs;
    RadialProfile cur = initial;
    double t = 0.0;
    double dt = cfg.dt_init;
    fs.times.push_back(0.0);
    fs.profiles.push_back(cur);
    fs.diags.push_back(compute_diag(cur, cfg));

    auto abs_curvature_scale = [&](const RadialProfile& p) {
        CurvatureField f = curvature(p);
        double m = std::max(std::fabs(f.sup_trusted()), std::fabs(f.inf_trusted()));
        if (p.cap.present()) m = std::max(m, p.cap.sup_curvature());
        return m;
    };
    double k_scale = (cfg.dt_k2_safety > 0.0) ? abs_curvature_scale(cur) : 0.0;

    long frame = 1;
    double next_record = cfg.record_dt;
    while (t < t_end - 1e-12) {
        double dt_try = std::min({dt, cfg.dt_max, next_record - t, t_end - t});
        if (cfg.dt_k2_safety > 0.0 && t < cfg.dt_k2_until)
            dt_try = std::min(dt_try, cfg.dt_k2_safety / std::max(k_scale * k_scale, 0.25));
        RadialProfile next;
        bool ok = false, halved = false;
        while (!ok) {
            try {
                next = step(cur, dt_try, cfg);
                double change = 0.0;
                for (std::size_t i = 0; i < cur.u.size(); ++i)
                    change = std::max(change, std::fabs(next.u[i] - cur.u[i]));
                if (change > cfg.max_step_change) throw NewtonFailure("step change too large");
                ok = true;
            } catch (const NewtonFailure&) {
                dt_try *= 0.5;
                halved = true;
                if (dt_try < cfg.dt_min) {
                    fs.complete = false;
                    return fs;
                }
            }
        }
        if (halved) dt = dt_try;  // keep the controller off the record-time clamp
        t += dt_try;
        cur = std::move(next);
        if (cfg.dt_k2_safety > 0.0 && t < cfg.dt_k2_until) k_scale = abs_curvature_scale(cur);
        for (const auto& obs : observers) obs(t, cur, dt_try);
        if (t >= next_record - 1e-12) {
            fs.times.push_back(t);
            fs.profiles.push_back(cur);
            fs.diags.push_back(compute_diag(cur, cfg));
            ++frame;
            next_record = cfg.record_dt * static_cast<double>(frame);
        }
        dt = std::min(dt * cfg.grow, cfg.dt_max);
    }
    return fs;
}

CurvatureEnvelope curvature_upper_envelope(const FlowSeries& fs, double tol) {
    CurvatureEnvelope env;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        EnvelopePoint pt;
        pt.t = fs.times[i];
        pt.sup_K = fs.diags[i].sup_K;
        pt.bound = pt.t < 1.0 ? 1.0 / (2.0 * (1.0 - pt.t))
                              : std::numeric_limits<double>::infinity();
        env.points.push_back(pt);
        if (pt.t < 1.0) {
            double v = pt.sup_K - pt.bound;
            if (v > env.worst_violation) {
                env.worst_violation = v;
                env.worst_t = pt.t;
            }
        }
    }
    env.pass = env.worst_violation <= tol;
    return env;
}

}  // namespace cbflow
