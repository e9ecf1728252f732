#pragma once

#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "domain.hpp"

namespace hypgreen {

namespace detail {

inline double log_sinh(double x) {
    if (x > 20) return x - std::log(2.0) + std::log1p(-std::exp(-2 * x));
    return std::log(std::sinh(x));
}

// e^{x^2} erfc(x)
inline double erfcx(double x) {
    if (x < 25) return std::exp(x * x) * std::erfc(x);
    double x2 = 2 * x * x, term = 1, sum = 1;
    for (int k = 1; k < 12; ++k) {
        term *= -(2 * k - 1) / x2;
        sum += term;
    }
    return sum / (x * std::sqrt(pi));
}

}  // namespace detail

struct HeatValue {
    double value = 0;
    double error = 0;
};

// K_H(t; rho) with the substitution r = rho + v^2; returns log K and the quadrature error of the v-integral
inline HeatValue log_heat_kernel(double t, double rho) {
    if (!(t > 0) || !(rho >= 0)) throw ContractError("heat kernel needs t > 0 and rho >= 0");
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double v) {
        if (v == 0) return rho > 0 ? 2 / std::sqrt(std::sinh(rho)) : 0.0;
        double v2 = v * v, r = rho + v2;
        double lg = std::log(2 * v * r) - v2 * (2 * rho + v2) / (4 * t) -
                    0.5 * (std::log(2.0) + detail::log_sinh(rho + v2 / 2) + detail::log_sinh(v2 / 2));
        return std::exp(lg);
    };
    double vmax = std::sqrt(-rho + std::sqrt(rho * rho + 4 * t * 60));
    double err = 0, l1 = 0;
    double I = gauss_kronrod<double, 31>::integrate(f, 0, vmax, 18, tolerances().heat_rel, &err, &l1);
    if (!(I > 0) || err > 1e-6 * I)
        throw ConvergenceError("heat kernel quadrature did not converge at t=" + std::to_string(t) +
                                   " rho=" + std::to_string(rho),
                               err);
    double pre = 0.5 * std::log(2.0) - t / 4 - 1.5 * std::log(4 * pi * t) - rho * rho / (4 * t);
    return {pre + std::log(I), err / I};
}

inline double heat_kernel(double t, double rho) { return std::exp(log_heat_kernel(t, rho).value); }

// 2 pi int_0^inf K_H(t; rho) sinh(rho) d rho
inline double heat_mass(double t) {
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double rho) { return 2 * pi * heat_kernel(t, rho) * std::sinh(rho); };
    double rmax = 2 * std::sqrt(t * 40) + t + 10;
    double err;
    return gauss_kronrod<double, 31>::integrate(f, 0, rmax, 12, 1e-10, &err);
}

// 4 pi int_0^T K_H(t; rho) dt by direct quadrature in t, plus the analytic tail bound 4 c_inf e^{-T/4}
struct TimeIntegral {
    double value;
    double tail_bound;
    double quad_error;
};

inline TimeIntegral heat_time_integral(double rho, double T = 80, double c_inf = 0.2) {
    if (!(rho > 0)) throw SingularityError("time integral diverges at rho = 0");
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double t) { return t <= 0 ? 0.0 : heat_kernel(t, rho); };
    double peak = rho * rho / 6;
    std::vector<double> cuts{0, peak / 4, peak, 4 * peak + 0.5, 10, 30, T};
    std::sort(cuts.begin(), cuts.end());
    double sum = 0, errsum = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i] || cuts[i] >= T) continue;
        double e;
        sum += gauss_kronrod<double, 31>::integrate(f, cuts[i], std::min(cuts[i + 1], T), 12, 1e-11, &e);
        errsum += e;
    }
    return {4 * pi * sum, 4 * pi * 4 * c_inf * std::exp(-T / 4), 4 * pi * errsum};
}

// int_0^T sqrt2 e^{-t/4} (4 pi t)^{-3/2} e^{-r^2/4t} dt in closed form
inline double heat_time_factor(double r, double T) {
    const double a = 0.25, b = r * r / 4;
    double X = std::sqrt(b / T), Y = std::sqrt(a * T);
    double e = std::exp(-X * X - Y * Y);
    double t1 = X > Y ? e * detail::erfcx(X - Y) : std::exp(-2 * X * Y) * std::erfc(X - Y);
    double t2 = e * detail::erfcx(X + Y);
    double I = 0.5 * std::sqrt(pi / b) * (t1 + t2);
    return std::sqrt(2.0) * std::pow(4 * pi, -1.5) * I;
}

// G_T(rho) = 4 pi int_0^T K_H(t; rho) dt, via the closed-form time factor and one radial quadrature
inline double truncated_green_kernel(double rho, double T) {
    if (!(rho > 0)) throw SingularityError("G_T diverges at rho = 0");
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double v) {
        if (v == 0) return 2 * rho * heat_time_factor(rho, T) / std::sqrt(std::sinh(rho));
        double v2 = v * v, r = rho + v2;
        double den = std::exp(0.5 * (std::log(2.0) + detail::log_sinh(rho + v2 / 2) + detail::log_sinh(v2 / 2)));
        return 2 * v * r * heat_time_factor(r, T) / den;
    };
    // integrand decays like e^{-r}; stop where e^{-(r - rho)} < 1e-18
    double vmax = std::sqrt(42.0 + 2 * std::sqrt(T));
    double err;
    double I = gauss_kronrod<double, 31>::integrate(f, 0, vmax, 18, 1e-12, &err);
    return 4 * pi * I;
}

struct HeatCalibration {
    double t0 = 0.5;
    double c0 = 0;
    double c_inf = 0;
    double beta = 0;
    double delta0 = 0;
    double delta_X = 0;
    double C_HK = 0;
};

struct Grid1D {
    double lo, hi;
    int n;
    std::vector<double> points() const {
        std::vector<double> p;
        for (int i = 0; i < n; ++i) p.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
        return p;
    }
};

struct CalibrationGrids {
    Grid1D rho{0, 1.5, 31};          // radii for beta and delta0
    Grid1D rho_wide{0, 12, 49};      // radii for c0 and c_inf
    Grid1D t_small{0.01, 0.5, 50};   // (0, t0]
    Grid1D t_large{0.5, 20, 79};     // [t0, T_max]
};

inline HeatCalibration calibrate(double t0, double ell_X, CalibrationGrids g = {}) {
    if (!(t0 > 0 && t0 < 1)) throw ContractError("t0 must lie in (0,1)");
    g.t_small.hi = t0;
    g.t_large.lo = t0;
    HeatCalibration c;
    c.t0 = t0;
    const double safety = tolerances().safety;
    for (double t : g.t_small.points())
        for (double rho : g.rho_wide.points()) {
            double lk = log_heat_kernel(t, rho).value;
            c.c0 = std::max(c.c0, 4 * pi * t * std::exp(lk + rho * rho / (4 * t)));
        }
    for (double t : g.t_large.points())
        for (double rho : g.rho_wide.points()) c.c_inf = std::max(c.c_inf, std::exp(t / 4) * heat_kernel(t, rho));
    c.c0 *= safety;
    c.c_inf *= safety;
    auto tl = g.t_large.points();
    auto rl = g.rho.points();
    std::vector<std::vector<double>> lk(rl.size(), std::vector<double>(tl.size()));
    for (std::size_t i = 0; i < rl.size(); ++i)
        for (std::size_t j = 0; j < tl.size(); ++j) lk[i][j] = log_heat_kernel(tl[j], rl[i]).value;
    for (double beta : {0.24, 0.2, 0.15, 0.1}) {
        bool ok = true;
        for (std::size_t i = 0; i < rl.size() && ok; ++i)
            for (std::size_t j = 0; j + 1 < tl.size() && ok; ++j)
                if (beta * tl[j + 1] + lk[i][j + 1] > beta * tl[j] + lk[i][j] + 1e-12) ok = false;
        if (ok) {
            c.beta = beta;
            break;
        }
    }
    if (c.beta == 0) throw ConvergenceError("no admissible beta in {0.24, 0.2, 0.15, 0.1}", 0);
    // delta0: smallest positive grid radius beyond which K_H(t; .) is non-increasing for t <= t0
    auto ts = g.t_small.points();
    c.delta0 = rl.back();
    for (std::size_t i = rl.size(); i-- > 0;) {
        bool mono = true;
        for (double t : ts)
            for (std::size_t k = i; k + 1 < rl.size() && mono; ++k)
                if (log_heat_kernel(t, rl[k + 1]).value > log_heat_kernel(t, rl[k]).value + 1e-12) mono = false;
        if (!mono) break;
        if (rl[i] > 0) c.delta0 = rl[i];
    }
    c.delta_X = std::max(c.delta0, 4 * ell_X + 5) + 0.1;
    return c;
}

// max over the grid of K_H(t0;0) + elliptic and parabolic sums at t0
inline double c_hk_constant(const HeatCalibration& calib, const GroupData& G, const GridSpec& grid) {
    const double t0 = calib.t0;
    // tail: K_H(t0; rho) <= c0/(4 pi t0) e^{-rho^2/4t0}; shell counts bounded by 4 (cosh(r+1) - 1) 2 pi / V
    double R = 2;
    auto tail = [&](double R) {
        double s = 0;
        for (int k = 0; k < 200; ++k) {
            double r = R + k;
            s += calib.c0 / (4 * pi * t0) * std::exp(-r * r / (4 * t0)) * 4 * ball_count_estimate(G, r + 1);
        }
        return s;
    };
    while (tail(R) > tolerances().tail) R += 0.5;
    double k0 = heat_kernel(t0, 0), best = 0;
    for (const Point& z : sup_grid(G, grid)) {
        double s = k0;
        for_each_in_ball(G, R, z, z, [&](const IMat& g, double u) {
            Kind k = int_kind(g);
            if (k == Kind::elliptic || k == Kind::parabolic) s += heat_kernel(t0, distance_from_u(u));
        });
        best = std::max(best, s);
    }
    return best;
}

}  // namespace hypgreen
