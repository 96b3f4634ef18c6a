#pragma once

#include "cbflow/profile.hpp"

#include <vector>

namespace cbflow {

// Matching constants of the five-piece cylinder-with-bulb surface.
struct CBParams {
    double rc = 0.0;  // cylinder radius, in (0, 1)
    double lc = 0.0;  // cylinder half-length parameter, > 0
    double s0 = 0.0;  // plane / interpolation junction
    double se = 0.0;  // plane asymptote offset
    double s2 = 0.0;  // bulb cusp / sphere junction
    double sb = 0.0;  // sphere center coordinate
};

// Closed form for s0, se; bracketed bisection for (s2, sb) after eliminating
// sb = s2 + atanh(rc tan(rc s2)). Residuals of both C^1 equations <= 1e-12.
CBParams solve_junctions(double rc, double lc);

// Piecewise conformal factor of the assembled surface.
double u_cb(const CBParams& p, double s);
double u_cb_slope(const CBParams& p, double s);

struct GridSpec {
    double s_left = 0.0;   // 0 => default se - 10
    double s_max = 0.0;    // 0 => default sb + 8
    double h_base = 0.04;
    double h_fine = 0.012;         // near the steep junctions s0 and s2
    double fine_halfwidth = 4.0;
    double h_plane = 0.5;          // coarse cap in the exactly flat region
    // spacing ratio stays under 1 + growth; kept small because the 3-point
    // second difference picks up an O((hr-hl) u''') error in graded cells,
    // which e^{-2u} amplifies to ~growth*h/3 in curvature on the curved pieces
    double growth = 0.05;
};

// Graded node list covering [s_left, s_max] with the junction coordinates
// inserted exactly.
std::vector<double> make_cb_grid(const CBParams& p, const GridSpec& spec);
std::vector<double> make_uniform_grid(double a, double b, double h);

// Samples the five pieces on the grid and attaches the exact sphere cap.
RadialProfile build_cb_profile(const CBParams& p, const std::vector<double>& grid);
RadialProfile build_cb_profile(const CBParams& p, const GridSpec& spec = {});

struct CBPropertyReport {
    double min_curvature = 0.0;      // away from junction nodes
    double max_curvature = 0.0;
    double bulb_volume = 0.0;        // Vol U_b, quadrature + cap
    double sb_times_rc = 0.0;
    double disc_radius = 0.0;        // e^{-s0+se}, should equal sqrt(1+rc^2)
    bool curvature_in_range = false;    // within [-1, 1/2] up to discretization
    bool sb_bound_ok = false;           // sb * rc <= 7/4
    bool bulb_volume_ok = false;        // 2 pi < Vol U_b < 10 pi
    bool disc_identity_ok = false;
    bool pass() const {
        return curvature_in_range && sb_bound_ok && bulb_volume_ok && disc_identity_ok;
    }
};

CBPropertyReport cb_property_report(const RadialProfile& profile, const CBParams& p);

// Analytic bulb volume 2 pi rc tan(rc s2) + 4 pi (1 + tanh(sb - s2)).
double cb_bulb_volume_exact(const CBParams& p);

}  // namespace cbflow
