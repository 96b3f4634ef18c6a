#include "cbflow/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace cbflow {

namespace {

double log_cosh(double x) {
    double ax = std::fabs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

// p(sigma) = e^{2 sigma} / (e^{2 sigma} + 1), evaluated without overflow
double cigar_p(double sigma) { return 1.0 / (1.0 + std::exp(-2.0 * std::min(sigma, 355.0))); }

}  // namespace

double cigar_profile(double s) {
    if (s > 0.0) return -s - 0.5 * std::log1p(std::exp(-2.0 * s));
    return -0.5 * std::log1p(std::exp(2.0 * s));
}

double cigar_flow(double lambda, double t, double s) {
    return cigar_profile(2.0 * lambda * t + s) - 0.5 * std::log(lambda);
}

double BarrierFn::eval(double t, double s) const {
    double tt = t - t_shift;
    switch (family) {
        case Family::Cigar:
            return cigar_flow(scale, tt, s - s_shift);
        case Family::Sphere:
            if (!(tt < scale)) throw std::domain_error("sphere barrier: past extinction time");
            return -log_cosh(s - s_shift) + 0.5 * std::log(2.0 * (scale - tt));
        case Family::Cusp:
            if (!(s > s_shift)) throw std::domain_error("cusp barrier: need s > s_e");
            return -std::log(s - s_shift) + std::log(scale);
        case Family::Plane:
            return -s + s_shift;
        case Family::Cylinder:
            return std::log(scale);
    }
    throw std::logic_error("BarrierFn::eval: bad family");
}

std::string BarrierFn::family_name() const {
    switch (family) {
        case Family::Cigar: return "cigar";
        case Family::Sphere: return "sphere";
        case Family::Cusp: return "cusp";
        case Family::Plane: return "plane";
        case Family::Cylinder: return "cylinder";
    }
    return "?";
}

EnvelopeReport cigar_envelope_checks(double lambda, const std::vector<double>& sample) {
    if (!(lambda > 0.0)) throw std::invalid_argument("cigar_envelope_checks: lambda > 0 required");
    EnvelopeReport r;
    auto note = [&](double violation, double s) {
        if (violation > r.worst_violation) {
            r.worst_violation = violation;
            r.worst_s = s;
            r.pass = r.worst_violation <= 1e-12;
        }
    };
    for (double s : sample) {
        double C = cigar_profile(s);
        double lower = (s <= 0.0) ? -0.5 * std::log(2.0) : -0.5 * std::log(2.0) - s;
        double upper = (s <= 0.0) ? 0.0 : -s;
        note(lower - C, s);
        note(C - upper, s);
        // unit sphere below the quarter-scale cigar
        double sphere = -log_cosh(s);
        note(sphere - cigar_flow(0.25, 0.0, s), s);
        ++r.samples;
    }
    return r;
}

TailArea cigar_tail_area(double lambda, double t, double s) {
    double front = 2.0 * lambda * t + s;
    if (!(front < 0.0)) throw std::domain_error("cigar_tail_area: need s < -2 lambda t");
    TailArea a;
    constexpr double kPi = 3.14159265358979323846;
    a.exact = kPi / lambda * (std::log1p(std::exp(2.0 * front)) - 2.0 * front);
    a.linear_bound = -2.0 * kPi / lambda * front;
    return a;
}

std::function<double(double, double)> is_exact_flow(const BarrierFn& b) {
    switch (b.family) {
        case BarrierFn::Family::Cigar: {
            double lambda = b.scale, s0 = b.s_shift, t0 = b.t_shift;
            return [lambda, s0, t0](double t, double s) {
                double sigma = 2.0 * lambda * (t - t0) + (s - s0);
                double p = cigar_p(sigma);
                double q = std::max(1.0 - p, 1e-300);  // e^{-2s}/(e^{-2s}+1)
                double u_t = 2.0 * lambda * (-p);
                // e^{-2u} = lambda (e^{2 sigma}+1) = lambda / q,
                // u_ss = C'' = -2 p q
                double diffusion = lambda / q * (-2.0 * p * q);
                return u_t - diffusion;
            };
        }
        case BarrierFn::Family::Sphere: {
            double text = b.scale, t0 = b.t_shift;
            return [text, t0](double t, double s) {
                (void)s;
                double rem = text - (t - t0);
                if (!(rem > 0.0)) throw std::domain_error("sphere flow: past extinction");
                double u_t = -0.5 / rem;
                double diffusion = -0.5 / rem;  // cosh^2/(2 rem) * (-sech^2)
                return u_t - diffusion;
            };
        }
        case BarrierFn::Family::Plane:
        case BarrierFn::Family::Cylinder:
            return [](double, double) { return 0.0; };
        case BarrierFn::Family::Cusp:
            throw std::invalid_argument("is_exact_flow: the static cusp is not a Ricci flow");
    }
    throw std::logic_error("is_exact_flow: bad family");
}

}  // namespace cbflow
