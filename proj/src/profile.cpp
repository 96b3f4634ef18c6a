#include "cbflow/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

double safe_exp(double x) { return std::exp(std::clamp(x, -700.0, 700.0)); }

// Stable standard cigar profile C(s) = -1/2 log(e^{2s} + 1).
double cigar_C(double s) {
    if (s > 0.0) return -s - 0.5 * std::log1p(std::exp(-2.0 * s));
    return -0.5 * std::log1p(std::exp(2.0 * s));
}

double log_cosh(double x) {
    double ax = std::fabs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

}  // namespace

double CapModel::eval(double s) const {
    double x = s - a;
    switch (family) {
        case Family::Sphere: return -log_cosh(x) + c;
        case Family::Cigar: return cigar_C(x) + c;
        case Family::Linear: return c - (s - a);
        case Family::None: break;
    }
    throw std::logic_error("CapModel::eval: no cap present");
}

double CapModel::slope(double s) const {
    double x = s - a;
    switch (family) {
        case Family::Sphere: return -std::tanh(x);
        case Family::Cigar: return -1.0 / (1.0 + std::exp(-2.0 * x));
        case Family::Linear: return -1.0;
        case Family::None: break;
    }
    throw std::logic_error("CapModel::slope: no cap present");
}

double CapModel::tail_volume(double s) const {
    double x = s - a;
    switch (family) {
        case Family::Sphere: {
            // 2 pi e^{2c} (1 - tanh x), written to avoid overflow in e^{2x}
            double one_minus_tanh;
            if (x >= 0.0) {
                double t = std::exp(-2.0 * x);
                one_minus_tanh = 2.0 * t / (1.0 + t);
            } else {
                one_minus_tanh = 2.0 / (std::exp(2.0 * x) + 1.0);
            }
            return 2.0 * kPi * safe_exp(2.0 * c) * one_minus_tanh;
        }
        case Family::Cigar:
            return kPi * safe_exp(2.0 * c) *
                   (x > 0 ? std::log1p(std::exp(-2.0 * x))
                          : std::log1p(std::exp(2.0 * x)) - 2.0 * x);
        case Family::Linear:
            return kPi * safe_exp(2.0 * (c - (s - a)));
        case Family::None: break;
    }
    throw std::logic_error("CapModel::tail_volume: no cap present");
}

double CapModel::sup_curvature() const {
    switch (family) {
        case Family::Sphere: return safe_exp(-2.0 * c);
        case Family::Cigar: return 2.0 * safe_exp(-2.0 * c);
        case Family::Linear: return 0.0;
        case Family::None: break;
    }
    return 0.0;
}

std::string CapModel::family_name() const {
    switch (family) {
        case Family::Sphere: return "sphere";
        case Family::Cigar: return "cigar";
        case Family::Linear: return "linear";
        case Family::None: break;
    }
    return "none";
}

CapModel CapModel::fit(double s, double u, double us, double uss, double uss_floor) {
    CapModel m;
    m.attach_s = s;
    double p = -us;
    auto linear_tail = [&]() {
        m.family = Family::Linear;
        m.a = s;
        m.c = u;
        return m;
    };
    if (!(p > 1e-12) || !(p < 1.0 - 1e-14)) return linear_tail();
    // below the finite-difference noise floor the family is unidentifiable
    if (std::fabs(uss) <= uss_floor) return linear_tail();
    // sphere: u_ss = -(1 - p^2);  cigar: u_ss = -2 p (1 - p)
    double err_sphere = std::fabs(uss + (1.0 - p * p));
    double err_cigar = std::fabs(uss + 2.0 * p * (1.0 - p));
    // neither family explains the observed u_ss: a bad fit here would report a
    // wildly wrong cap curvature, so prefer the curvature-free linear tail
    double pred = err_sphere <= err_cigar ? (1.0 - p * p) : 2.0 * p * (1.0 - p);
    if (std::min(err_sphere, err_cigar) > 0.25 * std::max(std::fabs(uss), pred))
        return linear_tail();
    if (err_sphere <= err_cigar) {
        m.family = Family::Sphere;
        double sigma = std::atanh(p);
        m.a = s - sigma;
        m.c = u - 0.5 * std::log1p(-p * p);  // u + log cosh(sigma)
    } else {
        m.family = Family::Cigar;
        double sigma = 0.5 * (std::log(p) - std::log1p(-p));
        m.a = s - sigma;
        m.c = u - cigar_C(sigma);
    }
    return m;
}

void RadialProfile::validate() const {
    if (s.size() < 3) throw std::invalid_argument("profile: need at least 3 nodes");
    if (s.size() != u.size()) throw std::invalid_argument("profile: s/u size mismatch");
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (!(s[i] < s[i + 1])) throw std::invalid_argument("profile: s not strictly increasing");
    for (double v : u)
        if (!std::isfinite(v)) throw std::invalid_argument("profile: non-finite u");
}

double RadialProfile::interp_u(double x) const {
    if (x < s.front()) throw std::out_of_range("profile: s below represented domain");
    if (x > s.back()) {
        if (!cap.present()) throw std::out_of_range("profile: s beyond grid and no cap");
        return cap.eval(x);
    }
    auto it = std::lower_bound(s.begin(), s.end(), x);
    std::size_t j = static_cast<std::size_t>(it - s.begin());
    if (j == 0) return u.front();
    double w = (x - s[j - 1]) / (s[j] - s[j - 1]);
    return (1.0 - w) * u[j - 1] + w * u[j];
}

double RadialProfile::slope_at(std::size_t i) const {
    std::size_t n = s.size();
    if (i == 0) return (u[1] - u[0]) / (s[1] - s[0]);
    if (i == n - 1) return (u[n - 1] - u[n - 2]) / (s[n - 1] - s[n - 2]);
    double hl = s[i] - s[i - 1], hr = s[i + 1] - s[i];
    // three-point first derivative on a nonuniform grid
    return (-hr / (hl * (hl + hr))) * u[i - 1] + ((hr - hl) / (hl * hr)) * u[i] +
           (hl / (hr * (hl + hr))) * u[i + 1];
}

std::size_t RadialProfile::nearest_node(double x) const {
    auto it = std::lower_bound(s.begin(), s.end(), x);
    if (it == s.end()) return s.size() - 1;
    if (it == s.begin()) return 0;
    std::size_t j = static_cast<std::size_t>(it - s.begin());
    return (x - s[j - 1] < s[j] - x) ? j - 1 : j;
}

double CurvatureField::sup_trusted() const {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < K.size(); ++i)
        if (trusted[i]) m = std::max(m, K[i]);
    return m;
}

double CurvatureField::inf_trusted() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < K.size(); ++i)
        if (trusted[i]) m = std::min(m, K[i]);
    return m;
}

CurvatureField curvature(const RadialProfile& p) {
    p.validate();
    std::size_t n = p.s.size();
    CurvatureField f;
    f.K.resize(n);
    f.trusted.assign(n, false);
    auto uss3 = [&](std::size_t i0) {
        // second derivative from nodes i0, i0+1, i0+2 (exact on quadratics)
        double h1 = p.s[i0 + 1] - p.s[i0], h2 = p.s[i0 + 2] - p.s[i0 + 1];
        return 2.0 * (p.u[i0] / (h1 * (h1 + h2)) - p.u[i0 + 1] / (h1 * h2) +
                      p.u[i0 + 2] / (h2 * (h1 + h2)));
    };
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double hl = p.s[i] - p.s[i - 1], hr = p.s[i + 1] - p.s[i];
        double uss = uss3(i - 1);
        double em2u = safe_exp(-2.0 * p.u[i]);
        f.K[i] = -em2u * uss;
        // roundoff in u is amplified by e^{-2u}/h^2; mask where that noise
        // floor exceeds 1e-4 in K. Also require the grid to resolve the
        // feature: |u_ss| h^2 small means several nodes per curvature scale.
        double noise = 1e-13 * em2u / (hl * hr);
        f.trusted[i] = noise <= 1e-4 && std::fabs(uss) * hl * hr <= 0.1;
    }
    f.K[0] = -safe_exp(-2.0 * p.u[0]) * uss3(0);
    f.K[n - 1] = -safe_exp(-2.0 * p.u[n - 1]) * uss3(n - 3);
    return f;
}

namespace {

// trapezoid contribution of e^{2u} over [x0, x1] with endpoint values u0, u1
double cell_area(double x0, double u0, double x1, double u1) {
    return kPi * (x1 - x0) * (safe_exp(2.0 * u0) + safe_exp(2.0 * u1));
}

}  // namespace

double volume(const RadialProfile& p, double sa, double sb) {
    p.validate();
    if (!(sa < sb)) throw std::invalid_argument("volume: need sa < sb");
    if (sa < p.s.front() - 1e-12) throw std::out_of_range("volume: sa below domain");
    bool infinite = std::isinf(sb);
    double smax = p.s.back();
    if ((infinite || sb > smax + 1e-9) && !p.cap.present())
        throw std::out_of_range("volume: range beyond grid and no cap");

    double total = 0.0;
    double grid_hi = std::min(sb, smax);
    if (sa < grid_hi) {
        auto lo = std::lower_bound(p.s.begin(), p.s.end(), sa);
        auto hi = std::upper_bound(p.s.begin(), p.s.end(), grid_hi);
        std::size_t i0 = static_cast<std::size_t>(lo - p.s.begin());
        std::size_t i1 = static_cast<std::size_t>(hi - p.s.begin());  // first past
        if (i0 >= i1) {
            total += cell_area(sa, p.interp_u(sa), grid_hi, p.interp_u(grid_hi));
        } else {
            if (sa < p.s[i0]) total += cell_area(sa, p.interp_u(sa), p.s[i0], p.u[i0]);
            for (std::size_t i = i0; i + 1 < i1; ++i)
                total += cell_area(p.s[i], p.u[i], p.s[i + 1], p.u[i + 1]);
            if (grid_hi > p.s[i1 - 1])
                total += cell_area(p.s[i1 - 1], p.u[i1 - 1], grid_hi, p.interp_u(grid_hi));
        }
    }
    if (infinite) {
        total += p.cap.tail_volume(std::max(sa, smax));
    } else if (sb > smax + 1e-9) {
        total += p.cap.tail_volume(std::max(sa, smax)) - p.cap.tail_volume(sb);
    }
    return total;
}

double circle_length(const RadialProfile& p, double s) {
    return 2.0 * kPi * safe_exp(p.interp_u(s));
}

double width(const RadialProfile& p, double sa, double sb) {
    p.validate();
    if (!(sa <= sb)) throw std::invalid_argument("width: empty range");
    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < p.s.size(); ++i) {
        if (p.s[i] >= sa && p.s[i] <= sb) {
            best = std::max(best, p.u[i]);
            any = true;
        }
    }
    // endpoints of the requested range
    if (sa >= p.s.front() && (sa <= p.s.back() || p.cap.present())) {
        best = std::max(best, p.interp_u(sa));
        any = true;
    }
    if (sb >= p.s.front() && (sb <= p.s.back() || p.cap.present())) {
        best = std::max(best, p.interp_u(std::min(sb, p.cap.present()
                                                          ? sb
                                                          : p.s.back())));
        any = true;
    }
    if (!any) throw std::invalid_argument("width: range contains no samples");
    return 2.0 * kPi * safe_exp(best);
}

GeodesicBall ball_of_area(const RadialProfile& p, double target_area) {
    p.validate();
    if (!(target_area > 0.0)) throw std::invalid_argument("ball_of_area: target must be positive");
    double total = tip_side_area(p, p.s.front());
    if (target_area >= total)
        throw std::invalid_argument("ball_of_area: target exceeds represented tip-side area");
    // cumulative tip-side area per node, from the right
    std::size_t n = p.s.size();
    std::vector<double> acc(n);
    acc[n - 1] = p.cap.present() ? p.cap.tail_volume() : 0.0;
    for (std::size_t i = n - 1; i-- > 0;)
        acc[i] = acc[i + 1] + cell_area(p.s[i], p.u[i], p.s[i + 1], p.u[i + 1]);
    // find the crossing cell and bisect inside it
    double lo = p.s.front(), hi = p.s.back();
    if (acc[n - 1] >= target_area) {
        // crossing inside the cap: bisect on the tail volume
        lo = p.s.back();
        hi = p.s.back() + 2.0;
        while (p.cap.tail_volume(hi) > target_area) hi += 2.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (p.cap.tail_volume(mid) > target_area ? lo : hi) = mid;
        }
    } else {
        std::size_t j = 0;
        while (j + 1 < n && acc[j + 1] > target_area) ++j;
        lo = p.s[j];
        hi = p.s[j + 1];
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            double area = acc[j + 1] + cell_area(mid, p.interp_u(mid), p.s[j + 1], p.u[j + 1]);
            (area > target_area ? lo : hi) = mid;
        }
    }
    GeodesicBall b;
    b.coordinate_radius = 0.5 * (lo + hi);
    b.area = target_area;
    b.boundary_length = circle_length(p, b.coordinate_radius);
    return b;
}

}  // namespace cbflow
