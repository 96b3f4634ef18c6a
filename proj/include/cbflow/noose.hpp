#pragma once

#include "cbflow/solver.hpp"

namespace cbflow {

// Rotationally symmetric double-speed curve shortening loop, tracked by its
// s-coordinate. The normal points away from the enclosed tip-side region, so
// the enclosed area drains at exactly 4 pi along the coupled flow.
struct NooseState {
    double rho = 0.0;
    double length = 0.0;
    double enclosed_area = 0.0;
    bool alive = true;
};

// d rho / dt = -2 e^{-2u(rho)} u_s(rho)
double noose_velocity(const RadialProfile& p, double rho);

struct NooseConfig {
    double start_s = 0.0;          // boundary of the bulb region
    double substep_safety = 0.2;   // fraction of the local stability bound
    double extinct_cells = 10.0;   // area threshold in units of the local cell area
};

struct CoupledResult {
    FlowSeries series;                  // with noose diagnostics filled in
    std::vector<NooseState> per_frame;  // one entry per recorded frame
    double extinction_time = -1.0;      // T_emp, < 0 if never extinct
    double predicted_T = 0.0;           // enclosed area at t=0 over 4 pi
    bool extinct = false;
};

// Co-evolves the flow and the loop; the loop ODE is substepped with explicit
// midpoint inside each accepted flow step, on the profile interpolated
// linearly in time.
CoupledResult run_coupled(const RadialProfile& initial, double horizon,
                          const SolverConfig& scfg, const NooseConfig& ncfg);

struct RatioReport {
    bool pass = true;
    double worst_violation = 0.0;  // length excess over the sqrt-ratio bound
    double worst_s = 0.0;
    std::size_t circles = 0;
};

// Checks L_{t2}(s) <= sqrt((2 t2 + 1)/(2 t1 + 1)) L_{t1}(s) + tol for every
// grid circle in [s_lo, s_hi].
RatioReport tracked_circle_growth(const FlowSeries& fs, double t1, double t2,
                                  double s_lo, double s_hi, double tol);

}  // namespace cbflow
