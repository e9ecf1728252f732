#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "config.hpp"

namespace hypgreen {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

struct Point {
    double x = 0, y = 1;
    Point() = default;
    Point(double x_, double y_) : x(x_), y(y_) {
        if (!(y_ > 0) || !std::isfinite(x_) || !std::isfinite(y_))
            throw ContractError("point must satisfy y > 0");
    }
    cplx z() const { return {x, y}; }
};

// element of PSL2(R); the constructor normalizes det and sign
struct MoebiusMap {
    double a = 1, b = 0, c = 0, d = 1;
    MoebiusMap() = default;
    MoebiusMap(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) { normalize(); }

    void normalize() {
        double det = a * d - b * c;
        if (!(det > 0)) throw ContractError("Moebius map needs positive determinant");
        double s = 1.0 / std::sqrt(det);
        a *= s, b *= s, c *= s, d *= s;
        double lead = a != 0 ? a : (b != 0 ? b : c);
        if (lead < 0) a = -a, b = -b, c = -c, d = -d;
    }
    double trace() const { return a + d; }
    MoebiusMap inverse() const { return {d, -b, -c, a}; }
};

inline MoebiusMap operator*(const MoebiusMap& m, const MoebiusMap& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

inline bool equal_psl(const MoebiusMap& m, const MoebiusMap& n, double tol = 1e-10) {
    auto close = [&](double s) {
        return std::abs(m.a - s * n.a) < tol && std::abs(m.b - s * n.b) < tol &&
               std::abs(m.c - s * n.c) < tol && std::abs(m.d - s * n.d) < tol;
    };
    return close(1) || close(-1);
}

inline Point apply(const MoebiusMap& m, const Point& p) {
    double cx = m.c * p.x + m.d, cy = m.c * p.y;
    double den = cx * cx + cy * cy;
    double x = ((m.a * p.x + m.b) * cx + m.a * m.c * p.y * p.y) / den;
    return Point(x, p.y / den);
}

inline double point_pair_u(const Point& z, const Point& w) {
    double dx = z.x - w.x, dy = z.y - w.y;
    return (dx * dx + dy * dy) / (4 * z.y * w.y);
}

// acosh(1+2u) written to stay accurate for tiny u
inline double distance_from_u(double u) { return 2 * std::asinh(std::sqrt(u)); }
inline double u_from_distance(double rho) {
    double s = std::sinh(rho / 2);
    return s * s;
}

inline double distance(const Point& z, const Point& w) { return distance_from_u(point_pair_u(z, w)); }

inline double free_green_u(double u) {
    if (!(u > 0)) throw SingularityError("free Green's function at coincident points");
    return std::log1p(1 / u);
}

inline double free_green(const Point& z, const Point& w) { return free_green_u(point_pair_u(z, w)); }

// g_{H,s}(u) = Gamma(s)^2/Gamma(2s) u^{-s} F(s,s;2s;-1/u)
inline double free_green_s_u(double u, double s, int max_terms = 2000) {
    if (!(s > 0.5)) throw ContractError("free_green_s needs s > 1/2");
    if (!(u > 0)) throw SingularityError("free Green's function at coincident points");
    if (u >= 2) {
        double x = -1 / u, term = 1, sum = 1;
        for (int n = 0; n < max_terms; ++n) {
            term *= (s + n) * (s + n) / ((2 * s + n) * (n + 1)) * x;
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) {
                double lg = 2 * std::lgamma(s) - std::lgamma(2 * s) - s * std::log(u);
                return std::exp(lg) * sum;
            }
        }
        std::ostringstream os;
        os << "hypergeometric series did not converge: u=" << u << " s=" << s << " last term " << term;
        throw ConvergenceError(os.str(), std::abs(term));
    }
    // Euler integral: int_0^1 (t(1-t))^{s-1} (u+t)^{-s} dt
    using boost::math::quadrature::gauss_kronrod;
    auto low = [&](double sig) {
        double t = std::exp(sig);
        return t * std::pow(t * (1 - t), s - 1) * std::pow(u + t, -s);
    };
    double s0 = std::min(std::log(u), std::log(0.5)) - 40 / s;
    double err = 0;
    double lo = gauss_kronrod<double, 61>::integrate(low, s0, std::log(0.5), 20, 1e-13, &err);
    double hi;
    if (s == 1) {
        hi = std::log((u + 1) / (u + 0.5));
    } else {
        boost::math::quadrature::tanh_sinh<double> ts;
        auto high = [&](double t, double tc) {
            double omt = tc > 0 ? tc : 1 - t;
            return std::pow(t * omt, s - 1) * std::pow(u + t, -s);
        };
        hi = ts.integrate(high, 0.5, 1.0);
    }
    return lo + hi;
}

inline double free_green_s(const Point& z, const Point& w, double s) {
    return free_green_s_u(point_pair_u(z, w), s);
}

enum class Kind { identity, elliptic, parabolic, hyperbolic };

inline const char* kind_name(Kind k) {
    switch (k) {
        case Kind::identity: return "identity";
        case Kind::elliptic: return "elliptic";
        case Kind::parabolic: return "parabolic";
        default: return "hyperbolic";
    }
}

struct ElementClass {
    Kind kind = Kind::identity;
    double length = 0;
    int order_hint = 0;
};

inline ElementClass classify(const MoebiusMap& m) {
    const double tol = tolerances().trace;
    ElementClass out;
    if (equal_psl(m, MoebiusMap{}, tol)) return out;
    double t = std::abs(m.trace());
    if (t < 2 - tol) {
        out.kind = Kind::elliptic;
        double theta = std::acos(std::clamp(t / 2, -1.0, 1.0));
        for (int k = 2; k <= 64; ++k) {
            double r = k * theta / pi;
            if (std::abs(r - std::round(r)) < 1e-8) {
                out.order_hint = k;
                break;
            }
        }
    } else if (t <= 2 + tol) {
        out.kind = Kind::parabolic;
    } else {
        out.kind = Kind::hyperbolic;
        out.length = 2 * std::acosh(t / 2);
    }
    return out;
}

// f(x) / (f(x) + f(1-x)) with f = exp(-1/x): smooth step from 0 to 1 on [0,1]
inline double smooth_step(double x) {
    if (x <= 0) return 0;
    if (x >= 1) return 1;
    double a = std::exp(-1 / x), b = std::exp(-1 / (1 - x));
    return a / (a + b);
}

}  // namespace hypgreen
