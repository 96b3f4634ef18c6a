#pragma once

#include <functional>
#include <string>
#include <vector>

namespace cbflow {

// Stable evaluation of the standard cigar profile -1/2 log(e^{2s} + 1).
double cigar_profile(double s);
// Scaled/translated cigar soliton at time t: C_lambda(2 lambda t + s).
double cigar_flow(double lambda, double t, double s);

// Closed-form comparison metrics. All are conformal factors u(t, s) of
// g = e^{2u}(ds^2 + dtheta^2).
struct BarrierFn {
    enum class Family { Cigar, Sphere, Cusp, Plane, Cylinder };

    Family family = Family::Cylinder;
    double scale = 1.0;    // cigar: lambda; sphere: extinction time; cusp:
                           // conformal multiplier; cylinder: radius
    double s_shift = 0.0;  // cigar/sphere: center; cusp/plane: s_e
    double t_shift = 0.0;

    double eval(double t, double s) const;  // throws on domain violation
    std::string family_name() const;
};

struct EnvelopeReport {
    bool pass = true;
    double worst_violation = 0.0;
    double worst_s = 0.0;
    std::size_t samples = 0;
};

// Verifies the two-sided elementary bounds on C(s) and the domination of the
// unit sphere by the quarter-scale cigar on the given sample points.
EnvelopeReport cigar_envelope_checks(double lambda, const std::vector<double>& sample);

struct TailArea {
    double exact = 0.0;
    double linear_bound = 0.0;
};

// Area of the cigar tail [s, infinity) x S^1 at time t together with its
// linear-in-s lower bound; requires s < -2 lambda t.
TailArea cigar_tail_area(double lambda, double t, double s);

// Analytic Ricci-flow residual u_t - e^{-2u} u_ss for the exact flow
// families; throws for the static cusp, which is not a Ricci flow.
std::function<double(double, double)> is_exact_flow(const BarrierFn& b);

}  // namespace cbflow
