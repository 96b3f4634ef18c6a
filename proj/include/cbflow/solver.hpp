#pragma once

#include "cbflow/profile.hpp"

#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cbflow {

struct SolverConfig {
    double dt_init = 1e-4;
    double dt_max = 2e-3;
    double dt_min = 1e-12;
    double grow = 1.2;
    double max_step_change = 0.05;  // accepted step must keep max|du| below this
    double newton_tol = 1e-10;      // on the max-norm of the Newton update
    int newton_max_iter = 25;
    double left_slope = -1.0;       // Neumann slope at s_left
    double right_slope = -1.0;      // Neumann slope at s_max
    double record_dt = 0.01;        // diagnostics cadence
    // implicit-Euler time error in K scales like K^2 dt; while t < dt_k2_until
    // cap dt at dt_k2_safety / max(K^2, 1/4) so near-saturated bounds (Chen,
    // the pre-collapse ceiling) are not breached by time discretization alone
    double dt_k2_safety = 0.0;      // 0 disables the limiter
    double dt_k2_until = 0.0;
    // ceiling on the diffusion coefficient e^{-2u}. Deeper than the matching
    // depth (u < -9.2 at the default), true u_ss values fall below roundoff
    // and the uncapped coefficient amplifies that noise catastrophically; the
    // capped equation relaxes such nodes quasi-statically to a linear profile,
    // which is the correct thin-tail limit e^{-2u} -> infinity.
    double diffusion_cap = 1e8;
    double width_from = 0.0;        // left end of the width window
    double bulb_boundary = 0.0;     // s-coordinate of the bulb-side volume split
};

struct FrameDiag {
    double sup_K = 0.0;
    double inf_K = 0.0;
    double vol_total = 0.0;
    double vol_bulb = 0.0;
    double width = 0.0;
    double noose_rho = std::numeric_limits<double>::quiet_NaN();
    double noose_len = std::numeric_limits<double>::quiet_NaN();
    double noose_area = std::numeric_limits<double>::quiet_NaN();
};

struct FlowSeries {
    std::vector<double> times;
    std::vector<RadialProfile> profiles;
    std::vector<FrameDiag> diags;
    bool complete = true;

    std::size_t size() const { return times.size(); }
    // index of the first recorded frame with time >= t (throws past the end)
    std::size_t frame_at(double t) const;
};

struct NewtonFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One backward-Euler step of u_t = e^{-2u} u_ss, Newton iteration with a
// tridiagonal Jacobian solve; boundary rows impose the configured slopes.
RadialProfile step(const RadialProfile& p, double dt, const SolverConfig& cfg);

// Called after every accepted step with (t_new, profile, dt_used).
using StepObserver = std::function<void(double, const RadialProfile&, double)>;

FrameDiag compute_diag(const RadialProfile& p, const SolverConfig& cfg);

// Adaptive time stepping to t_end; halves dt on Newton failure or oversized
// steps, records diagnostics at the configured cadence (frame times are exact
// multiples of record_dt, including t = 0).
FlowSeries run(const RadialProfile& initial, double t_end, const SolverConfig& cfg,
               const std::vector<StepObserver>& observers = {});

struct EnvelopePoint {
    double t = 0.0;
    double sup_K = 0.0;
    double bound = 0.0;  // 1/(2(1-t)) for t < 1, +inf afterwards
};

struct CurvatureEnvelope {
    std::vector<EnvelopePoint> points;
    bool pass = true;            // no violation beyond tolerance for t < 1
    double worst_violation = 0.0;
    double worst_t = 0.0;
};

CurvatureEnvelope curvature_upper_envelope(const FlowSeries& fs, double tol = 1e-2);

}  // namespace cbflow
