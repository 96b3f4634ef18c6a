#pragma once

#include "cbflow/cb_builder.hpp"
#include "cbflow/exact.hpp"
#include "cbflow/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cbflow {

struct BarrierCheck {
    std::string name;
    BarrierFn barrier;
    enum class Direction { Upper, Lower } direction = Direction::Upper;
    double t_lo = 0.0;
    double t_hi = std::numeric_limits<double>::infinity();
    double s_lo = -std::numeric_limits<double>::infinity();
    double s_hi = std::numeric_limits<double>::infinity();
    double tolerance = 1e-3;  // in u
};

struct CheckReport {
    std::string name;
    bool pass = true;
    double worst_violation = -std::numeric_limits<double>::infinity();
    double worst_t = 0.0;
    double worst_s = 0.0;
    std::size_t samples = 0;
    double tolerance = 0.0;
};

// Evaluates the barrier at every recorded (t, node) in the check's space-time
// window; a positive violation means the ordering fails by that much in u.
CheckReport check_barrier(const FlowSeries& fs, const BarrierCheck& check);

// First recorded time with max_{s >= -lc/rc} u(t, s) <= log rc + 1/2 log 8.
// Throws if the condition is not met by t = 5/2.
double detect_t1(const FlowSeries& fs, double rc, double lc);

// Two-piece floor at time t1: u >= log rc left of the argmax node s1 and
// u >= s1 - s + log rc beyond it (over s >= -lc/rc).
CheckReport check_claim_floor(const FlowSeries& fs, double t1, double rc, double lc);

// u(t_eval, s) <= -log(s - se) + log c_cusp for s > se.
CheckReport check_cusp_domination(const FlowSeries& fs, const CBParams& params,
                                  double t_eval, double c_cusp, double tol = 1e-3);

// Bol's inequality (L dOmega)^2 >= 4 pi V - V^2 sup K on tip-centered balls.
CheckReport check_bol(const RadialProfile& profile, const std::vector<double>& target_areas,
                      double rel_tol = 1e-9);

struct PseudolocalityReport {
    bool hypotheses_met = false;
    double t_star = 0.0;        // largest recorded t with |K| <= 2/r0^2 on the half-ball
    double B_emp = 0.0;         // r0^2 / t_star (0 when t_star covers the horizon)
    bool holds_to_horizon = false;
};

// Empirical two-sided curvature persistence on the metric half-ball around
// the point at coordinate s_center.
PseudolocalityReport check_pseudolocality(const FlowSeries& fs, double s_center,
                                          double r0, double v0);

// Chen's lower curvature bound with K0 = 1: inf K >= -1/(2t+1) - tol.
CheckReport check_chen(const FlowSeries& fs, double tol = 1e-3);

// Nodewise growth bound u(t2) <= u(t1) + 1/2 log((2 t2 + 1)/(2 t1 + 1)) over
// every recorded pair t1 < t2.
CheckReport check_conformal_growth(const FlowSeries& fs, double tol = 1e-4);

// Post-collapse width estimate u(T, s) <= log rc + 1/2 log(2T+1) for
// s >= -lc/rc, evaluated at the recorded frame nearest T.
CheckReport check_width_estimate(const FlowSeries& fs, double T, double rc, double lc,
                                 double tol = 1e-3);

// Static plane floor u(t, s) >= -s + se at every recorded node.
CheckReport check_plane_floor(const FlowSeries& fs, double se, double tol = 1e-3);

}  // namespace cbflow
