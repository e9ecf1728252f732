#pragma once

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "greens.hpp"
#include "heatkernel.hpp"
#include "series.hpp"

namespace hypgreen {

// L = |log(eps/2)|; the signed reading makes the square root argument fine but the quotient negative
inline double epsilon_tilde(double eps) {
    if (!(eps > 0 && eps < 1)) throw ContractError("epsilon must lie in (0,1)");
    double a = 3 * std::abs(std::log(eps / 2));
    return 2 * std::log((1 + std::sqrt(1 + a * a)) / a);
}

struct EpsilonValidation {
    bool range = false;      // eps < min(1, ell_X)
    bool cusp_invariant = false;
    bool cusps_disjoint = false;
    bool elliptic_disjoint = false;
    bool cusp_elliptic_disjoint = false;
    bool elliptic_orbit = false;  // condition (3)
    std::vector<std::string> failures;
    bool condition1() const { return cusp_invariant && cusps_disjoint; }
    bool condition2() const { return elliptic_disjoint && cusp_elliptic_disjoint; }
    bool condition3() const { return elliptic_orbit; }
    bool passed() const { return range && condition1() && condition2() && condition3(); }
};

struct EpsilonConfig {
    double epsilon = 0;
    double epsilon_tilde = 0;
    double ell_X = 0;
    EpsilonValidation validation;
};

// point at hyperbolic distance r from c in direction theta
inline Point hyperbolic_circle_point(const Point& c, double r, double theta) {
    return Point(c.x + c.y * std::sinh(r) * std::cos(theta), c.y * std::cosh(r) + c.y * std::sinh(r) * std::sin(theta));
}

inline EpsilonConfig validate_epsilon(const GroupData& G, double eps, int boundary_samples = 64, int trace_limit = 64) {
    if (!(eps > 0)) throw ContractError("epsilon must be positive");
    EpsilonConfig cfg;
    cfg.epsilon = eps;
    cfg.ell_X = shortest_geodesic(G, trace_limit).length;
    auto& v = cfg.validation;
    v.range = eps < std::min(1.0, cfg.ell_X);
    if (!v.range) v.failures.push_back("epsilon >= min(1, ell_X)");
    if (eps >= 1) return cfg;  // no neighbourhood geometry to check
    cfg.epsilon_tilde = epsilon_tilde(eps);
    const double h = cusp_neighbourhood_height(eps);
    const double tol = 1e-9;
    const int n = boundary_samples;

    v.cusp_invariant = v.cusps_disjoint = true;
    for (std::size_t i = 0; i < G.cusps.size(); ++i) {
        auto& p = G.cusps[i];
        for (int k = 0; k < n; ++k) {
            for (double lift : {1.0, 1.5, 3.0}) {
                Point z = apply(p.sigma, Point((k + 0.5) / n, h * lift));
                bool first = true, bad = false;
                for_each_cusp_row(G, p, z, h * lift * (1 - tol), [&](double Y) {
                    if (first) {
                        first = false;
                        return;
                    }
                    if (Y > h * lift * (1 + tol)) bad = true;
                });
                if (bad && v.cusp_invariant) {
                    v.cusp_invariant = false;
                    v.failures.push_back("U_eps(" + p.representative.str() + ") is not precisely invariant");
                }
            }
            Point z = apply(p.sigma, Point((k + 0.5) / n, h));
            for (std::size_t j = 0; j < G.cusps.size(); ++j)
                if (j != i && cusp_height(G, G.cusps[j], z) > h * (1 + tol) && v.cusps_disjoint) {
                    v.cusps_disjoint = false;
                    v.failures.push_back("U_eps(" + p.representative.str() + ") meets U_eps(" +
                                         G.cusps[j].representative.str() + ")");
                }
        }
    }

    v.elliptic_disjoint = v.cusp_elliptic_disjoint = v.elliptic_orbit = true;
    for (std::size_t i = 0; i < G.elliptic.size(); ++i) {
        auto& e = G.elliptic[i];
        for (std::size_t j = i + 1; j < G.elliptic.size(); ++j)
            if (elliptic_orbit_distance(G, G.elliptic[j], e.point, 2 * eps + 1) < 2 * eps && v.elliptic_disjoint) {
                v.elliptic_disjoint = false;
                v.failures.push_back("elliptic neighbourhoods overlap");
            }
        for (int k = 0; k < n; ++k) {
            Point z = hyperbolic_circle_point(e.point, eps, 2 * pi * (k + 0.5) / n);
            for (auto& q : G.cusps)
                if (cusp_height(G, q, z) > h * (1 + tol) && v.cusp_elliptic_disjoint) {
                    v.cusp_elliptic_disjoint = false;
                    v.failures.push_back("U_eps(" + q.representative.str() + ") meets an elliptic neighbourhood");
                }
            for (auto& f : G.elliptic)
                if (elliptic_orbit_distance(G, f, z, 2 * eps + 1) < eps * (1 - tol) && v.elliptic_orbit) {
                    v.elliptic_orbit = false;
                    v.failures.push_back("condition (3) fails on the boundary of U_eps(e)");
                }
        }
    }
    return cfg;
}

// ---- bound expressions ----

enum class BoundKind { B, B_prime, C, two_C_plus_B };

inline const char* bound_kind_name(BoundKind k) {
    switch (k) {
        case BoundKind::B: return "B";
        case BoundKind::B_prime: return "B_prime";
        case BoundKind::C: return "C";
        default: return "two_C_plus_B";
    }
}

struct BoundInputs {
    double epsilon = 0, alpha = 0, delta = 0;
    HeatCalibration heat;
    SeriesConstants consts;
    double ell_X = 0, volume = 0, lambda1 = 0;
    int cusps = 0, genus = 0;
    std::vector<int> orders;
    std::optional<double> d_X;
    std::optional<double> c_X_minus_1;  // |c_X - 1|; absent means parametric
};

struct BoundReport {
    BoundKind kind = BoundKind::B;
    double value = 0;
    std::vector<std::pair<std::string, double>> terms;
    BoundInputs inputs;
    bool partial = false;                 // a symbolic term was left out of value
    std::vector<std::string> symbolic;    // terms reported only by coefficient
    std::vector<std::string> conventions;
    double term(const std::string& name) const {
        for (auto& [k, x] : terms)
            if (k == name) return x;
        return 0;
    }
    void add(std::string name, double x) {
        terms.emplace_back(std::move(name), x);
        value += x;
    }
};

inline double sum_terms(const BoundReport& r) {
    double s = 0;
    for (auto& t : r.terms) s += t.second;
    return s;
}

namespace detail {

inline void check_alpha(const GroupData& G, double alpha) {
    if (!(alpha > 0 && alpha < G.lambda1)) throw ContractError("alpha must lie in (0, lambda1)");
}

inline BoundInputs snapshot(const GroupData& G, const HeatCalibration& heat, const SeriesConstants& c,
                            const EpsilonConfig& eps, double alpha, double delta) {
    BoundInputs in;
    in.epsilon = eps.epsilon;
    in.alpha = alpha;
    in.delta = delta;
    in.heat = heat;
    in.consts = c;
    in.ell_X = eps.ell_X;
    in.volume = G.volume;
    in.lambda1 = G.lambda1;
    in.cusps = int(G.cusps.size());
    in.genus = G.genus;
    for (auto& e : G.elliptic) in.orders.push_back(e.order);
    return in;
}

// B with the neighbourhood size nb (eps for B, eps/2 for B')
inline BoundReport bound_B_at(const GroupData& G, const HeatCalibration& heat, const SeriesConstants& c,
                              const EpsilonConfig& eps, double alpha, double delta, double nb, BoundKind kind) {
    check_alpha(G, alpha);
    if (!(delta > 0)) throw ContractError("delta must be positive");
    if (!(eps.ell_X > 0)) throw ContractError("EpsilonConfig carries no ell_X");
    if (!(heat.beta > 0 && heat.delta_X > 0)) throw ContractError("heat calibration is incomplete");
    BoundReport r;
    r.kind = kind;
    r.inputs = snapshot(G, heat, c, eps, alpha, delta);
    const double l = eps.ell_X, V = G.volume, sh2 = std::pow(std::sinh(l / 2), 2);
    const double d = std::max(delta, heat.delta_X);
    r.add("vol", 4 * pi / V);
    r.add("c0_sinh_delta", 4 * pi * heat.c0 * std::sinh(l) * std::sinh(d) / (8 * d * d * sh2));
    r.add("c0_exp_ell", 4 * pi * heat.c0 * std::exp(2 * l) / (2 * pi * sh2));
    r.add("c_inf_sinh", 4 * pi * 4 * heat.c_inf * std::sinh(d + l) / std::sinh(l));
    r.add("heat_kernel_CHK", 4 * pi * heat.C_HK / heat.beta);
    double L = std::log(nb / 2);
    r.add("cusp_log", 7 * double(G.cusps.size()) * L * L);
    r.add("C_par", 41 * c.C_par);
    double s = 0;
    for (auto& e : G.elliptic) s -= (e.order - 1) * std::log(std::pow(std::tanh(nb / 2), 2) / c.c_ell);
    r.add("elliptic", G.elliptic.empty() ? 0.0 : 14 / std::tanh(nb / 4) * (s + c.C_ell));
    if (delta < heat.delta_X)
        r.add("delta_correction",
              std::sinh(heat.delta_X + l) / std::sinh(l) * std::abs(std::log(std::pow(std::tanh(delta / 2), 2))));
    r.conventions.push_back("cusp term uses (log(eps/2))^2");
    if (kind == BoundKind::B_prime) r.conventions.push_back("neighbourhood terms evaluated at eps/2");
    return r;
}

}  // namespace detail

inline BoundReport bound_B(const GroupData& G, const HeatCalibration& heat, const SeriesConstants& c,
                           const EpsilonConfig& eps, double alpha, double delta) {
    return detail::bound_B_at(G, heat, c, eps, alpha, delta, eps.epsilon, BoundKind::B);
}

inline BoundReport bound_B_prime(const GroupData& G, const HeatCalibration& heat, const SeriesConstants& c,
                                 const EpsilonConfig& eps, double alpha, double delta) {
    if (!(delta < eps.epsilon_tilde)) throw ContractError("B' needs delta in (0, eps~)");
    return detail::bound_B_at(G, heat, c, eps, alpha, delta, eps.epsilon / 2, BoundKind::B_prime);
}

inline BoundReport bound_C(const GroupData& G, const HeatCalibration& heat, const SeriesConstants& c,
                           const EpsilonConfig& eps, double alpha, double delta, double d_X,
                           std::optional<double> c_X_abs_minus_1 = std::nullopt) {
    if (!(delta > 0 && delta < std::min(eps.epsilon, eps.epsilon_tilde)))
        throw ContractError("C needs delta in (0, min(eps, eps~))");
    if (G.genus < 1) throw ContractError("C needs genus >= 1");
    BoundReport Bp = bound_B_prime(G, heat, c, eps, alpha, delta);
    BoundReport r;
    r.kind = BoundKind::C;
    r.inputs = Bp.inputs;
    r.inputs.d_X = d_X;
    r.inputs.c_X_minus_1 = c_X_abs_minus_1;
    r.conventions = Bp.conventions;
    r.conventions.push_back("eps~ uses |log(eps/2)|");
    const double g = G.genus, V = G.volume, P = double(G.cusps.size()), E = double(G.elliptic.size());
    const double L = std::log(eps.epsilon / 2);
    r.add("B_prime_part", Bp.value / (2 * g) * (P * (1 - c.C_aux_par / (2 * L)) + E + 1));
    r.add("cusp_log", -4 * P * L / g);
    r.add("C_par", 16 * c.C_par / g);
    r.add("elliptic", 5 * c.c_ell / (g * V) * double(G.elliptic_order_sum()));
    r.add("d_X", 2 * pi * (d_X + 1) * (d_X + 1) / (G.lambda1 * V));
    if (c_X_abs_minus_1) {
        r.add("selberg", 2 * pi * *c_X_abs_minus_1 / (g * V));
    } else {
        r.partial = true;
        r.symbolic.push_back("selberg = " + std::to_string(2 * pi / (g * V)) + " * |c_X - 1|");
    }
    r.add("aux", -pi * P * c.C_aux_par / (g * V * L));
    return r;
}

inline BoundReport two_C_plus_B(const BoundReport& C, const BoundReport& B) {
    if (C.kind != BoundKind::C || B.kind != BoundKind::B) throw ContractError("two_C_plus_B needs a C and a B report");
    BoundReport r;
    r.kind = BoundKind::two_C_plus_B;
    r.inputs = C.inputs;
    r.partial = C.partial;
    r.symbolic = C.symbolic;
    r.conventions = C.conventions;
    r.add("two_C", 2 * C.value);
    r.add("B", B.value);
    return r;
}

// ---- certification ----

struct CertificationSample {
    std::size_t index = 0;
    Point z, w;
    double g_hyp = 0, subtracted = 0, lhs = 0, error_estimate = 0, margin = 0;
    std::size_t elements = 0;  // |S_Gamma(delta; z, w)|
    bool violation = false;
};

struct CertificationReport {
    double bound = 0;
    double epsilon = 0, delta = 0;
    std::uint64_t seed = 0;
    std::vector<CertificationSample> samples;
    std::size_t violations() const {
        std::size_t n = 0;
        for (auto& s : samples) n += s.violation;
        return n;
    }
    double min_margin() const {
        double m = std::numeric_limits<double>::infinity();
        for (auto& s : samples) m = std::min(m, s.margin);
        return m;
    }
};

inline CertificationSample certify_pair(const GreenContext& ctx, double delta, double bound, const Point& z,
                                        const Point& w) {
    CertificationSample s;
    s.z = z;
    s.w = w;
    auto g = green_heat(ctx, z, w);
    s.g_hyp = g.value;
    s.error_estimate = g.error_estimate;
    for_each_in_ball(ctx.group(), delta, z, w, [&](const IMat& m, double u) {
        Kind k = int_kind(m);
        if (k != Kind::hyperbolic && k != Kind::identity) return;
        s.subtracted += free_green_u(u);
        ++s.elements;
    });
    s.lhs = std::abs(s.g_hyp - s.subtracted);
    s.margin = bound - s.lhs;
    s.violation = s.lhs > bound + s.error_estimate;
    return s;
}

inline CertificationReport certify_hyperbolic(const GreenContext& ctx, const BoundReport& B, const EpsilonConfig& eps,
                                              std::size_t samples, std::uint64_t seed = 1) {
    if (B.kind != BoundKind::B) throw ContractError("certification needs a B report");
    const GroupData& G = ctx.group();
    CertificationReport rep;
    rep.bound = B.value;
    rep.epsilon = eps.epsilon;
    rep.delta = B.inputs.delta;
    rep.seed = seed;
    // draw all pairs first so the result does not depend on the thread count
    std::mt19937_64 rng(seed);
    std::vector<std::pair<Point, Point>> pairs;
    while (pairs.size() < samples) {
        Point z = sample_Y_eps(G, eps.epsilon, rng), w = sample_Y_eps(G, eps.epsilon, rng);
        bool near = false;
        for_each_in_ball(G, 1e-3, z, w, [&](const IMat&, double) { near = true; });
        if (!near) pairs.emplace_back(z, w);
    }
    rep.samples.resize(samples);
    parallel_for(samples, [&](std::size_t i) {
        rep.samples[i] = certify_pair(ctx, rep.delta, rep.bound, pairs[i].first, pairs[i].second);
        rep.samples[i].index = i;
    });
    return rep;
}

// ---- elliptic lemmas ----

struct EllipticLemmaReport {
    double epsilon = 0;
    double const7 = 0, const14 = 0;  // 7 coth(eps/2), 14 coth(eps/4)
    std::size_t checks = 0, violations7 = 0, violations14 = 0;
    double worst_ratio7 = 0, worst_ratio14 = 0;  // max lhs / rhs
};

inline EllipticLemmaReport elliptic_lemma_check(const GroupData& G, double eps, std::size_t samples,
                                                double radius = 6, std::uint64_t seed = 1) {
    if (G.elliptic.empty()) throw ContractError("group has no elliptic points");
    if (!(eps > 0 && eps < 1)) throw ContractError("epsilon must lie in (0,1)");
    EllipticLemmaReport r;
    r.epsilon = eps;
    r.const7 = 7 / std::tanh(eps / 2);
    r.const14 = 14 / std::tanh(eps / 4);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0, 2 * pi);
    for (std::size_t k = 0; k < samples; ++k) {
        const auto& e = G.elliptic[k % G.elliptic.size()];
        Point z = hyperbolic_circle_point(e.point, eps, angle(rng));
        // z on the boundary of U_eps(e): compare gamma z with gamma e
        for_each_in_ball(G, radius, z, e.point, [&](const IMat& g, double u_ze) {
            double lhs = point_pair_u(z, apply(g.moebius(), z));  // sinh^2(d/2)
            double rhs = r.const7 * u_ze;
            ++r.checks;
            if (lhs > rhs * (1 + 1e-12)) ++r.violations7;
            r.worst_ratio7 = std::max(r.worst_ratio7, lhs / rhs);
        });
        // z on the boundary of U_{eps/2}(e), w on the boundary of U_eps(e)
        Point z2 = hyperbolic_circle_point(e.point, eps / 2, angle(rng));
        Point w = hyperbolic_circle_point(e.point, eps, angle(rng));
        for_each_in_ball(G, radius, z2, w, [&](const IMat& g, double u_zw) {
            double lhs = point_pair_u(z2, apply(g.moebius(), z2));
            double rhs = r.const14 * u_zw;
            ++r.checks;
            if (lhs > rhs * (1 + 1e-12)) ++r.violations14;
            r.worst_ratio14 = std::max(r.worst_ratio14, lhs / rhs);
        });
    }
    return r;
}

// ---- standard inputs ----

struct BoundInputsBundle {
    EpsilonConfig eps;
    HeatCalibration heat;
    SeriesConstants consts;
};

// calibration on default grids, C^HK as a sup over Y_eps, series constants on the default grid
inline BoundInputsBundle standard_bound_inputs(const GroupData& G, double eps, double t0 = 0.5,
                                               GridSpec hk_grid = {{8, 8, 1, 1}, 50, 0},
                                               const GridSpec& series_grid = {{8, 8, 1, 1}, 50, 0}) {
    BoundInputsBundle b;
    b.eps = validate_epsilon(G, eps);
    b.heat = calibrate(t0, b.eps.ell_X);
    hk_grid.eps = eps;
    b.heat.C_HK = c_hk_constant(b.heat, G, hk_grid);
    b.consts = series_constants(G, series_grid);
    return b;
}

}  // namespace hypgreen
