#pragma once

#include <vector>

#include "greens.hpp"

namespace hypgreen {

struct SeriesValue {
    double value = 0;
    double tail_bound = 0;
};

inline double p_gen_closed(double y) {
    if (!(y > 0)) throw ContractError("p_gen_closed needs y > 0");
    double x = 2 * pi * y;
    if (x < 1e-4) return 2 * std::log1p(x * x / 6);
    // log(sinh x / x) = x - log(2x) + log1p(-e^{-2x})
    if (x > 20) return 2 * (x - std::log(2 * x) + std::log1p(-std::exp(-2 * x)));
    return 2 * std::log(std::sinh(x) / x);
}

// Delta_hyp of one orbit term; <= 0
inline double laplacian_p_gen(double y) {
    double x = 2 * pi * y;
    if (x < 1e-4) return -2 * x * x / 3;
    if (x > 700) return -2;
    double r = x / std::sinh(x);
    return 2 * r * r - 2;
}

namespace detail {
// height cutoff so that the rows below it contribute at most tol * (sum of Y^s)
inline double row_cutoff(const CuspData& p, const Point& z, double s, double tol) {
    double Y = 0.05;
    for (int it = 0; it < 60; ++it, Y *= 0.5)
        if (cusp_tail_bound(p, z, Y, s) <= tol) return Y;
    throw CapacityError("cusp row tail not reached");
}

inline Point reduced(const GroupData& G, const Point& z) { return reduce_gamma0(G.level, z).z; }

// rows of height in [Y, Y + dY] have mean density dY / (V Y^2), so the rows below Y0
// contribute Y0^(s-1) / ((s-1) V) to sum Y^s on average
inline double mean_field_tail(const GroupData& G, double Y0, double s) {
    return std::pow(Y0, s - 1) / ((s - 1) * G.volume);
}
}  // namespace detail

inline SeriesValue eisenstein_parabolic(const GroupData& G, const CuspData& p, const Point& z0, double s,
                                        double tol = 1e-6) {
    if (s < 2) throw ContractError("eisenstein_parabolic needs s >= 2");
    Point z = detail::reduced(G, z0);
    double Y0 = detail::row_cutoff(p, z, s, tol);
    SeriesValue r;
    for_each_cusp_row(G, p, z, Y0, [&](double Y) { r.value += std::pow(Y, s); });
    r.value += detail::mean_field_tail(G, Y0, s);
    r.tail_bound = cusp_tail_bound(p, z, Y0, s);
    return r;
}

inline SeriesValue p_sum(const GroupData& G, const Point& z0, double tol = 1e-5) {
    Point z = detail::reduced(G, z0);
    SeriesValue r;
    for (auto& p : G.cusps) {
        double Y0 = detail::row_cutoff(p, z, 2, tol);
        for_each_cusp_row(G, p, z, Y0, [&](double Y) { r.value += p_gen_closed(Y); });
        r.value += 4 * pi * pi / 3 * detail::mean_field_tail(G, Y0, 2);
        r.tail_bound += 4 * pi * pi / 3 * cusp_tail_bound(p, z, Y0, 2);
    }
    return r;
}

inline SeriesValue laplacian_p_sum(const GroupData& G, const Point& z0, double tol = 1e-5) {
    Point z = detail::reduced(G, z0);
    SeriesValue r;
    for (auto& p : G.cusps) {
        double Y0 = detail::row_cutoff(p, z, 2, tol);
        for_each_cusp_row(G, p, z, Y0, [&](double Y) { r.value += laplacian_p_gen(Y); });
        r.value -= 8 * pi * pi / 3 * detail::mean_field_tail(G, Y0, 2);
        r.tail_bound += 8 * pi * pi / 3 * cusp_tail_bound(p, z, Y0, 2);
    }
    return r;
}

// ---- elliptic orbit sums ----

// tail estimate for sum over orbit points at distance > R from e of f(d): orbit points have
// asymptotic density 2 pi sinh r / (m V); safety factor 2
template <class F>
double orbit_tail_estimate(const GroupData& G, int m, double R, F&& f) {
    using boost::math::quadrature::gauss_kronrod;
    double err;
    auto g = [&](double r) { return std::sinh(r) * f(r); };
    return 2 * 2 * pi / (m * G.volume) * gauss_kronrod<double, 31>::integrate(g, R, R + 60, 15, 1e-10, &err);
}

// f(rho) for each orbit point of z, rho = d(e, eta z), over Gamma_e \ Gamma
template <class F>
void for_each_elliptic_orbit_point(const GroupData& G, const EllipticData& e, const Point& z, double R, F&& f) {
    for_each_in_ball(G, R, e.point, z, [&](const IMat&, double u) { f(distance_from_u(u), 1.0 / e.order); });
}

inline SeriesValue eisenstein_elliptic(const GroupData& G, const EllipticData& e, const Point& z0, double s,
                                       double tol = 1e-6) {
    if (s < 2) throw ContractError("eisenstein_elliptic needs s >= 2");
    Point z = detail::reduced(G, z0);
    auto f = [s](double r) { return std::pow(std::sinh(r), -s); };
    double R = 4;
    while (orbit_tail_estimate(G, e.order, R, f) > tol) R += 1;
    SeriesValue out;
    for_each_elliptic_orbit_point(G, e, z, R, [&](double rho, double wgt) {
        if (rho < 1e-12) throw SingularityError("z is the elliptic fixed point");
        out.value += wgt * std::pow(std::sinh(rho), -s);
    });
    out.tail_bound = orbit_tail_estimate(G, e.order, R, f);
    return out;
}

inline double elliptic_term(double rho, int m, int n) {
    double a = std::sin(n * pi / m) * std::sinh(rho);
    return std::log1p(1 / (a * a));
}

inline SeriesValue e_sum(const GroupData& G, const Point& z0, double tol = 1e-6) {
    SeriesValue out;
    if (G.elliptic.empty()) return out;
    Point z = detail::reduced(G, z0);
    for (auto& e : G.elliptic) {
        int m = e.order;
        auto f = [m](double r) {
            double t = 0;
            for (int n = 1; n < m; ++n) t += elliptic_term(r, m, n);
            return t;
        };
        double R = 4;
        while (orbit_tail_estimate(G, m, R, f) > tol) R += 1;
        for_each_elliptic_orbit_point(G, e, z, R, [&](double rho, double wgt) {
            if (rho < 1e-12) throw SingularityError("z is an elliptic fixed point");
            for (int n = 1; n < m; ++n) out.value += wgt * elliptic_term(rho, m, n);
        });
        out.tail_bound += orbit_tail_estimate(G, m, R, f);
    }
    return out;
}

// ---- H_X ----

struct HValue {
    double value = 0;
    double error_estimate = 0;
    double diagonal = 0;  // lim (g_hyp - g_H)
    double P = 0, E = 0;
};

// route A: diagonal limit minus E and P
inline HValue h_sum(const GreenContext& ctx, const Point& z0) {
    const GroupData& G = ctx.group();
    Point z = detail::reduced(G, z0);
    auto d = ctx.diagonal(z);
    auto P = p_sum(G, z), E = e_sum(G, z);
    HValue h;
    h.diagonal = d.value;
    h.P = P.value;
    h.E = E.value;
    h.value = d.value - P.value - E.value;
    h.error_estimate = d.error_estimate + P.tail_bound + E.tail_bound;
    return h;
}

namespace detail {
// sum_{k != 0} (1 - chi(rho_k)) log(1 + a^2/k^2), u_k = k^2/a^2, a = 2Y
inline double parabolic_window_complement(double Y, const Window& w) {
    double a = 2 * Y;
    double kin = a * std::sinh(std::max(w.R - w.width, 0.0) / 2), kout = a * std::sinh(w.R / 2);
    long long k0 = std::max<long long>(1, (long long)std::floor(kin)), k1 = (long long)std::ceil(kout);
    double s = 0;
    for (long long k = k0; k <= k1; ++k) {
        double u = double(k) * k / (a * a);
        s += (1 - w.chi(distance_from_u(u))) * std::log1p(a * a / (double(k) * k));
    }
    // k > k1 by the midpoint rule: int_X^oo log(1 + a^2/x^2) dx
    double X = k1 + 0.5;
    s += a * pi - X * std::log1p(a * a / (X * X)) - 2 * a * std::atan(X / a);
    return 2 * s;
}
}  // namespace detail

// route B: windowed sum over hyperbolic elements only, minus the parabolic and elliptic
// contributions that fall outside the window
inline HValue h_sum_direct(const GreenContext& ctx, const Point& z0, double tol = 1e-6) {
    const GroupData& G = ctx.group();
    Point z = detail::reduced(G, z0);
    auto r = ctx.heat_summer().eval(z, z, Exclude::non_hyperbolic);
    const auto& windows = ctx.heat_summer().windows();
    std::vector<double> comp(windows.size(), 0.0);
    double bound = 0;
    for (auto& p : G.cusps) {
        double Y0 = std::min(detail::row_cutoff(p, z, 2, tol), 0.5 / std::sinh(windows[0].R / 2));
        for_each_cusp_row(G, p, z, Y0, [&](double Y) {
            for (std::size_t k = 0; k < windows.size(); ++k)
                comp[k] += detail::parabolic_window_complement(Y, windows[k]);
        });
        // lower rows have no translate inside the window
        for (auto& c : comp) c += 4 * pi * pi / 3 * detail::mean_field_tail(G, Y0, 2);
        bound += 4 * pi * pi / 3 * cusp_tail_bound(p, z, Y0, 2);
    }
    for (auto& e : G.elliptic) {
        int m = e.order;
        auto f = [m](double r) {
            double t = 0;
            for (int n = 1; n < m; ++n) t += elliptic_term(r, m, n);
            return t;
        };
        double R = std::max(4.0, windows[0].R / 2 + 1);
        while (orbit_tail_estimate(G, m, R, f) > tol) R += 1;
        for_each_elliptic_orbit_point(G, e, z, R, [&](double rho, double wgt) {
            for (int n = 1; n < m; ++n) {
                double a = std::sin(n * pi / m) * std::sinh(rho);
                double t = wgt * elliptic_term(rho, m, n), d = distance_from_u(a * a);
                for (std::size_t k = 0; k < windows.size(); ++k) comp[k] += (1 - windows[k].chi(d)) * t;
            }
        });
            bound += orbit_tail_estimate(G, m, R, f);
    }
    for (std::size_t k = 0; k < windows.size(); ++k) r.value[0][k] -= comp[k];
    auto ev = ctx.from_heat_sums(r);
    HValue h;
    h.value = ev.value + ctx.diagonal_identity_term();
    h.error_estimate = ev.error_estimate + bound;
    return h;
}

// ---- grid constants ----

struct SeriesConstants {
    double C_par = 0, C_ell = 0, c_ell = 1, C_aux_par = 0;
    bool converged = true;
    std::size_t grid_points = 0;
    double height_cap = 50;
    double safety = 1.05;
    struct Raw {
        double C_par, C_ell, C_aux_par;
    } coarse{}, fine{};
};

inline double c_ell_small(const GroupData& G) {
    double c = 1;  // empty max convention
    for (auto& e : G.elliptic)
        for (int n = 1; n < e.order; ++n) c = std::max(c, 1 / std::pow(std::sin(n * pi / e.order), 2));
    return c;
}

namespace detail {
inline SeriesConstants::Raw series_point(const GroupData& G, const Point& z0) {
    Point z = reduced(G, z0);
    double cell = c_ell_small(G);
    double cp = 0;
    for (auto& p : G.cusps) {
        double top = cusp_height(G, p, z);
        auto ep = eisenstein_parabolic(G, p, z, 2, 1e-5);
        cp += ep.value + ep.tail_bound - top * top;
    }
    double ce = 0;
    for (auto& e : G.elliptic) {
        double near = 1e300;
        for_each_elliptic_orbit_point(G, e, z, 3, [&](double rho, double) { near = std::min(near, rho); });
        double lead = near < 1e299 ? std::pow(std::sinh(near), -2) : 0;
        auto ee = eisenstein_elliptic(G, e, z, 2, 1e-3);
        ce += (e.order - 1) * (ee.value + ee.tail_bound - lead);
    }
    auto lp = laplacian_p_sum(G, z, 1e-5);
    return {cp, cell * ce, std::abs(lp.value) + lp.tail_bound};
}

// compass search for a local maximum in (x, log y)
template <class F>
double local_max(F&& f, Point z, double v, double height_cap) {
    double step = 0.05;
    while (step > 1e-3) {
        bool moved = false;
        for (auto [dx, dl] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            double y = z.y * std::exp(dl * step);
            if (y > height_cap) continue;
            Point c(z.x + dx * step * z.y, y);
            double fc;
            try {
                fc = f(c);
            } catch (const SingularityError&) {
                continue;
            }
            if (fc > v) z = c, v = fc, moved = true;
        }
        if (!moved) step /= 2;
    }
    return v;
}

inline SeriesConstants::Raw series_sup(const GroupData& G, const GridSpec& grid) {
    auto pts = sup_grid(G, grid);
    std::vector<SeriesConstants::Raw> v(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { v[i] = series_point(G, pts[i]); });
    SeriesConstants::Raw m{0, 0, 0};
    double SeriesConstants::Raw::*fields[] = {&SeriesConstants::Raw::C_par, &SeriesConstants::Raw::C_ell,
                                             &SeriesConstants::Raw::C_aux_par};
    for (auto fld : fields) {
        std::vector<std::size_t> idx(pts.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::size_t k = std::min<std::size_t>(4, idx.size());
        std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                          [&](auto a, auto b) { return v[a].*fld > v[b].*fld; });
        double best = 0;
        for (std::size_t j = 0; j < k; ++j) {
            auto f = [&](const Point& z) { return series_point(G, z).*fld; };
            best = std::max(best, v[idx[j]].*fld > 0 ? local_max(f, pts[idx[j]], v[idx[j]].*fld, grid.height_cap)
                                                     : v[idx[j]].*fld);
        }
        m.*fld = best;
    }
    return m;
}
}  // namespace detail

inline SeriesConstants series_constants(const GroupData& G, const GridSpec& grid = {{8, 8, 1, 1}, 50, 0}) {
    SeriesConstants c;
    c.c_ell = c_ell_small(G);
    c.height_cap = grid.height_cap;
    c.safety = tolerances().safety;
    c.coarse = detail::series_sup(G, grid);
    c.fine = detail::series_sup(G, grid.refined());
    c.grid_points = sup_grid(G, grid.refined()).size();
    auto close = [](double a, double b) { return std::abs(a - b) <= 0.01 * std::max(std::abs(b), 1e-12) + 1e-9; };
    c.converged = close(c.coarse.C_par, c.fine.C_par) && close(c.coarse.C_ell, c.fine.C_ell) &&
                  close(c.coarse.C_aux_par, c.fine.C_aux_par);
    c.C_par = c.safety * std::max(c.coarse.C_par, c.fine.C_par);
    c.C_ell = c.safety * std::max(c.coarse.C_ell, c.fine.C_ell);
    c.C_aux_par = c.safety * std::max(c.coarse.C_aux_par, c.fine.C_aux_par);
    return c;
}

}  // namespace hypgreen
