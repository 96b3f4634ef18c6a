#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace cbflow {

// Analytic model for the capped end beyond the last grid node (s -> +infinity,
// i.e. the tip z = 0). Both families match u and u_s at the attachment point.
struct CapModel {
    enum class Family { None, Sphere, Cigar, Linear };

    Family family = Family::None;
    double attach_s = 0.0;  // s-coordinate where the cap takes over
    double a = 0.0;         // center / translation parameter
    double c = 0.0;         // additive offset of the conformal factor

    bool present() const { return family != Family::None; }

    double eval(double s) const;
    double slope(double s) const;
    // 2*pi Integral of e^{2u} over [s, infinity), s >= attach_s.
    double tail_volume(double s) const;
    double tail_volume() const { return tail_volume(attach_s); }
    // Supremum of the Gauss curvature over the cap region.
    double sup_curvature() const;

    std::string family_name() const;

    // Fit a cap from (u, u_s) at s. Requires u_s in (-1, 0) for the sphere and
    // cigar families; falls back to a linear tail otherwise. The family is
    // chosen by whichever predicts the supplied u_ss better; if neither comes
    // within 25% (or |u_ss| is below uss_floor, the finite-difference noise
    // level) the fit is unidentifiable and the linear tail is used.
    static CapModel fit(double s, double u, double us, double uss, double uss_floor = 0.0);
};

// Rotationally symmetric conformal metric g = e^{2u}(ds^2 + dtheta^2),
// discretized on a strictly increasing grid. Immutable by convention:
// operations return new values.
struct RadialProfile {
    std::vector<double> s;
    std::vector<double> u;
    CapModel cap;

    std::size_t size() const { return s.size(); }
    double s_left() const { return s.front(); }
    double s_max() const { return s.back(); }

    void validate() const;  // throws std::invalid_argument

    // Linear interpolation of u; uses the cap beyond s_max.
    double interp_u(double x) const;
    // Centered slope at node i (one-sided at the ends).
    double slope_at(std::size_t i) const;

    std::size_t nearest_node(double x) const;
};

struct CurvatureField {
    std::vector<double> K;       // per node, K = -e^{-2u} u_ss
    std::vector<bool> trusted;   // false where finite differences are unreliable
    double sup_trusted() const;
    double inf_trusted() const;
};

// Ball centered at the tip end (s -> +infinity), bounded by the circle at a
// coordinate threshold.
struct GeodesicBall {
    double coordinate_radius = 0.0;  // s-threshold: ball is [s, infinity) x S^1
    double area = 0.0;
    double boundary_length = 0.0;
};

// Second differences on the (nonuniform) grid; endpoints get one-sided values
// and are never trusted. Interior nodes where roundoff amplification through
// e^{-2u}/h^2 exceeds 1e-4 in K are flagged untrusted as well.
CurvatureField curvature(const RadialProfile& p);

// 2*pi Integral of e^{2u} ds over [sa, sb] by trapezoid rule; sb may be
// +infinity, in which case the analytic cap tail is included.
double volume(const RadialProfile& p, double sa, double sb);

// Length of the theta-circle at s: 2*pi e^{u(s)}.
double circle_length(const RadialProfile& p, double s);

// max of circle_length over grid nodes in [sa, sb] (cap attachment included).
double width(const RadialProfile& p, double sa, double sb);

// Largest ball [s, infinity) x S^1 around the tip with area <= target_area.
GeodesicBall ball_of_area(const RadialProfile& p, double target_area);

// Total area represented on the tip side of sa (grid + cap tail when present).
inline double tip_side_area(const RadialProfile& p, double sa) {
    return volume(p, sa,
                  p.cap.present() ? std::numeric_limits<double>::infinity() : p.s.back());
}

}  // namespace cbflow
