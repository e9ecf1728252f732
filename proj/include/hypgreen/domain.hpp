#pragma once

#include <random>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "group.hpp"

namespace hypgreen {

// Gauss-Legendre nodes on [0,1]
inline std::vector<std::pair<double, double>> gauss_legendre01(int n) {
    auto build = [](auto rule) {
        std::vector<std::pair<double, double>> out;
        auto& x = rule.abscissa();
        auto& w = rule.weights();
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0) {
                out.push_back({0.5, 0.5 * w[i]});
                continue;
            }
            out.push_back({0.5 * (1 - x[i]), 0.5 * w[i]});
            out.push_back({0.5 * (1 + x[i]), 0.5 * w[i]});
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    using boost::math::quadrature::gauss;
    switch (n) {
        case 4: return build(gauss<double, 4>());
        case 6: return build(gauss<double, 6>());
        case 8: return build(gauss<double, 8>());
        case 10: return build(gauss<double, 10>());
        case 12: return build(gauss<double, 12>());
        case 16: return build(gauss<double, 16>());
        case 20: return build(gauss<double, 20>());
        case 24: return build(gauss<double, 24>());
        case 32: return build(gauss<double, 32>());
        case 40: return build(gauss<double, 40>());
        case 48: return build(gauss<double, 48>());
        case 64: return build(gauss<double, 64>());
        default: throw ContractError("unsupported Gauss-Legendre order " + std::to_string(n));
    }
}

struct QuadSpec {
    int nx = 16;       // nodes across the modular triangle
    int nt = 16;       // nodes in t = 1/y, with t = tau^2 t_max
    int panels_x = 1;  // panels in x; doubling them refines the rule
    int panels_t = 1;
    double cusp_cap = 0;  // > 0: keep only heights <= cusp_cap in every cusp frame
    QuadSpec refined() const { return {nx, nt, 2 * panels_x, 2 * panels_t, cusp_cap}; }
};

struct QuadNode {
    Point z;        // node in the coset image (unreduced)
    double weight;  // hyperbolic area weight
    int coset;
};

// nodes for int_X h dmu_hyp = sum_j int_{F_1} h(g_j z) dx dt, t = 1/y
inline std::vector<QuadNode> domain_quadrature(const GroupData& G, const QuadSpec& q) {
    auto gx = gauss_legendre01(q.nx), gt = gauss_legendre01(q.nt);
    std::vector<QuadNode> out;
    for (int j = 0; j < G.index; ++j)
        for (int px = 0; px < q.panels_x; ++px)
            for (auto [sx, wx] : gx) {
                double x = -0.5 + (px + sx) / q.panels_x;
                double tmax = 1 / std::sqrt(1 - x * x);
                if (q.cusp_cap > 0) {
                    // coset j covers part of its cusp's neighbourhood, at height y / width in that frame
                    double tmin = 1 / (q.cusp_cap * G.cusps[G.coset_cusp[j]].width);
                    for (int pt = 0; pt < q.panels_t; ++pt)
                        for (auto [st, wt] : gt) {
                            double t = tmin + (pt + st) / q.panels_t * (tmax - tmin);
                            double w = (wx / q.panels_x) * (wt / q.panels_t) * (tmax - tmin);
                            out.push_back({apply(G.coset_reps[j], Point(x, 1 / t)), w, j});
                        }
                    continue;
                }
                for (int pt = 0; pt < q.panels_t; ++pt)
                    for (auto [st, wt] : gt) {
                        double tau = (pt + st) / q.panels_t;
                        double t = tau * tau * tmax;
                        double w = (wx / q.panels_x) * (wt / q.panels_t) * 2 * tau * tmax;
                        out.push_back({apply(G.coset_reps[j], Point(x, 1 / t)), w, j});
                    }
            }
    return out;
}

// uniform sample on X
template <class Rng>
Point sample_uniform(const GroupData& G, Rng& rng) {
    std::uniform_int_distribution<int> pick(0, G.index - 1);
    std::uniform_real_distribution<double> ux(-0.5, 0.5), ut(0, 1);
    for (;;) {
        double x = ux(rng), t = ut(rng);
        if (t == 0 || x * x + 1 / (t * t) < 1) continue;
        return reduce_gamma0(G.level, apply(G.coset_reps[pick(rng)], Point(x, 1 / t))).z;
    }
}

// height of the horocycle bounding the cusp neighbourhood U_eps(p): |exp(2 pi i sigma_p^-1 z)| < eps
inline double cusp_neighbourhood_height(double eps) { return std::log(1 / eps) / (2 * pi); }

// min over the orbit of e of d(z, g e), capped at cap
inline double elliptic_orbit_distance(const GroupData& G, const EllipticData& e, const Point& z, double cap = 3) {
    double best = u_from_distance(cap);
    for_each_in_ball(G, cap, z, e.point, [&](const IMat&, double u) { best = std::min(best, u); });
    return distance_from_u(best);
}

inline bool in_Y_eps(const GroupData& G, const Point& z, double eps) {
    double h = cusp_neighbourhood_height(eps);
    for (auto& p : G.cusps)
        if (cusp_height(G, p, z) > h) return false;
    for (auto& e : G.elliptic)
        if (elliptic_orbit_distance(G, e, z, 2 * eps + 1) < eps) return false;
    return true;
}

template <class Rng>
Point sample_Y_eps(const GroupData& G, double eps, Rng& rng) {
    for (int k = 0; k < 100000; ++k) {
        Point z = sample_uniform(G, rng);
        if (in_Y_eps(G, z, eps)) return z;
    }
    throw ConvergenceError("rejection sampler for Y_eps did not find a point", 0);
}

struct GridSpec {
    QuadSpec quad{12, 12, 1, 1};
    double height_cap = 50;  // max cusp height kept
    double eps = 0;          // when > 0 keep only points of Y_eps
    GridSpec refined() const { return {quad.refined(), height_cap, eps}; }
};

// reduced grid points for suprema over X
inline std::vector<Point> sup_grid(const GroupData& G, const GridSpec& g) {
    std::vector<Point> out;
    for (auto& n : domain_quadrature(G, g.quad)) {
        Point z = reduce_gamma0(G.level, n.z).z;
        if (g.eps > 0 && !in_Y_eps(G, z, g.eps)) continue;
        bool keep = true;
        for (auto& p : G.cusps)
            if (cusp_height(G, p, z) > g.height_cap) keep = false;
        if (keep) out.push_back(z);
    }
    // cusp approach: points at the cap height in every cusp frame
    for (auto& p : G.cusps)
        for (int k = 0; k < 8; ++k) {
            double h = g.eps > 0 ? cusp_neighbourhood_height(g.eps) : g.height_cap;
            Point z = apply(p.sigma, Point((k + 0.5) / 8, h));
            out.push_back(reduce_gamma0(G.level, z).z);
        }
    return out;
}

}  // namespace hypgreen
