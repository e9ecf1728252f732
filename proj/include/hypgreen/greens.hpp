#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "heatkernel.hpp"
#include "parallel.hpp"

namespace hypgreen {

// F(u) tabulated as log F on a uniform grid in log u
class RadialTable {
public:
    RadialTable(std::function<double(double)> f, double u_max, double h = 0.05, double u_min = 1e-14)
        : direct_(std::move(f)), xi0_(std::log(u_min)) {
        double xi1 = std::log(u_max) + 0.5;
        int n = int(std::ceil((xi1 - xi0_) / h)) + 1;
        std::vector<double> v(n);
        parallel_for(n, [&](std::size_t i) { v[i] = std::log(direct_(std::exp(xi0_ + h * double(i)))); });
        xi1_ = xi0_ + h * (n - 1);
        spline_ = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(v.data(), v.size(), xi0_, h);
    }
    double operator()(double u) const { return at_log(std::log(u), u); }
    double at_log(double xi, double u) const {
        if (xi < xi0_ || xi > xi1_) return direct_(u);
        return std::exp((*spline_)(xi));
    }
    double direct(double u) const { return direct_(u); }
    double u_max() const { return std::exp(xi1_); }

private:
    std::function<double(double)> direct_;
    double xi0_, xi1_ = 0;
    std::shared_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline_;
};

struct Window {
    double R, width;
    double chi(double rho) const { return smooth_step((R - rho) / width); }
    double U_inner() const { return u_from_distance(std::max(R - width, 0.0)); }
    double U_outer() const { return u_from_distance(R); }
};

enum class Exclude { none, identity, non_hyperbolic };

// sum_g chi_k(rho) F_i(rho) - (1/V) int chi_k F_i dmu for every kernel i and window k
class LatticeSummer {
public:
    LatticeSummer(const GroupData& G, std::vector<std::shared_ptr<RadialTable>> kernels, std::vector<Window> windows)
        : G_(&G), kernels_(std::move(kernels)), windows_(std::move(windows)) {
        R_max_ = 0;
        U_inner_ = 1e300;
        for (auto& w : windows_) R_max_ = std::max(R_max_, w.R), U_inner_ = std::min(U_inner_, w.U_inner());
        mean_.assign(kernels_.size(), std::vector<double>(windows_.size()));
        for (std::size_t i = 0; i < kernels_.size(); ++i)
            for (std::size_t k = 0; k < windows_.size(); ++k)
                mean_[i][k] = area_integral(*kernels_[i], windows_[k]) / G.volume;
    }

    // 4 pi int_0^{U_R} chi F du (the hyperbolic-area integral of chi F)
    static double area_integral(const RadialTable& F, const Window& w, double core = 0) {
        using boost::math::quadrature::gauss_kronrod;
        auto f = [&](double xi) {
            double u = std::exp(xi), rho = distance_from_u(u);
            double c = core > 0 ? core_cutoff(rho, core) : 1.0;
            return w.chi(rho) * c * F.at_log(xi, u) * u;
        };
        double lo = std::log(1e-14), mid = std::log(w.U_inner()), hi = std::log(w.U_outer());
        if (core > 0) hi = std::min(hi, std::log(u_from_distance(core)));
        double err, s = 0;
        if (mid > lo && mid < hi) {
            s += gauss_kronrod<double, 61>::integrate(f, lo, mid, 20, 1e-13, &err);
            s += gauss_kronrod<double, 61>::integrate(f, mid, hi, 20, 1e-13, &err);
        } else {
            s += gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, 1e-13, &err);
        }
        s += 1e-14 * F(1e-14);
        return 4 * pi * s;
    }

    // b(rho): 1 inside core/2, 0 outside core
    static double core_cutoff(double rho, double core) { return smooth_step((core - rho) / (0.5 * core)); }

    struct Result {
        std::vector<std::vector<double>> value;  // [kernel][window]
        long long elements = 0;
    };

    // the ball sweep costs ~ 1/Im z; distances are unchanged by swapping the points, by the Fricke
    // involution (it normalizes Gamma_0(N)), and by reducing either point
    static std::pair<Point, Point> orient(int N, const Point& z0, const Point& w0) {
        Point z = reduce_gamma0(N, z0).z, w = reduce_gamma0(N, w0).z;
        if (N > 1) {
            auto fricke = [N](const Point& p) {
                cplx v = -1.0 / (double(N) * p.z());
                return reduce_gamma0(N, Point(v.real(), v.imag())).z;
            };
            Point fz = fricke(z), fw = fricke(w);
            if (std::max(fz.y, fw.y) > std::max(z.y, w.y)) z = fz, w = fw;
        }
        if (z.y < w.y) std::swap(z, w);
        return {z, w};
    }

    Result eval(const Point& z0, const Point& w0, Exclude ex = Exclude::none, double core = 0) const {
        const std::size_t nk = kernels_.size(), nw = windows_.size();
        auto [z, w] = orient(G_->level, z0, w0);
        Result r;
        r.value.assign(nk, std::vector<double>(nw, 0.0));
        std::vector<double> fv(nk);
        const double U_core = core > 0 ? u_from_distance(core) : 0;
        for_each_in_ball(*G_, R_max_, z, w, [&](const IMat& g, double u) {
            if (ex != Exclude::none) {
                Kind k = int_kind(g);
                if (k == Kind::identity) return;
                if (ex == Exclude::non_hyperbolic && k != Kind::hyperbolic) return;
            }
            ++r.elements;
            double xi = std::log(u);
            for (std::size_t i = 0; i < nk; ++i) fv[i] = kernels_[i]->at_log(xi, u);
            double factor = 1;
            if (u < U_core) factor = 1 - core_cutoff(distance_from_u(u), core);
            if (u <= U_inner_) {
                for (std::size_t i = 0; i < nk; ++i)
                    for (std::size_t k = 0; k < nw; ++k) r.value[i][k] += factor * fv[i];
                return;
            }
            double rho = distance_from_u(u);
            for (std::size_t k = 0; k < nw; ++k) {
                double c = windows_[k].chi(rho) * factor;
                if (c == 0) continue;
                for (std::size_t i = 0; i < nk; ++i) r.value[i][k] += c * fv[i];
            }
        });
        for (std::size_t i = 0; i < nk; ++i)
            for (std::size_t k = 0; k < nw; ++k) r.value[i][k] -= mean_[i][k];
        return r;
    }

    const std::vector<Window>& windows() const { return windows_; }
    const GroupData& group() const { return *G_; }
    double mean(std::size_t i, std::size_t k) const { return mean_[i][k]; }

private:
    const GroupData* G_;
    std::vector<std::shared_ptr<RadialTable>> kernels_;
    std::vector<Window> windows_;
    std::vector<std::vector<double>> mean_;
    double R_max_, U_inner_;
};

struct GreenConfig {
    double T = 60;
    double R_heat = 15, width_heat = 3;
    double R_s = 14.5, width_s = 2.5;
    int sub_radii = 3;  // windows at R, R-1, ... for the truncation estimate
    std::vector<double> s_list{1.5, 1.25, 1.125, 1.0625};
};

struct TruncationReport {
    double ball_radius = 0;
    double time_cutoff = 0;
    double spectral_allowance = 0;
    double window_spread = 0;
    double extrapolation_spread = 0;
    bool low_confidence = false;
    long long elements = 0;
};

enum class GreenMethod { heat_integral, s_extrapolation };

inline const char* method_name(GreenMethod m) {
    return m == GreenMethod::heat_integral ? "heat_integral" : "s_extrapolation";
}

struct GreenEvaluation {
    double value = 0;
    GreenMethod method = GreenMethod::heat_integral;
    double error_estimate = 0;
    TruncationReport truncation_report;
    std::vector<double> s_values;  // pole-subtracted values per s (s-route)
};

namespace detail {
inline std::vector<Window> window_family(double R, double width, int n) {
    std::vector<Window> w;
    for (int k = 0; k < n; ++k) w.push_back({R - k, width});
    return w;
}

// value at 0 of the interpolating polynomial through (x_i, y_i); also every partial extrapolant
inline std::vector<double> neville_at_zero(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> p = y, diag{y[0]};
    std::size_t n = x.size();
    for (std::size_t m = 1; m < n; ++m) {
        for (std::size_t i = 0; i + m < n; ++i) p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
        diag.push_back(p[0]);
    }
    return diag;
}
}  // namespace detail

// shared state: kernel tables and lattice summers for one group
class GreenContext {
public:
    GreenContext(const GroupData& G, GreenConfig cfg = {}) : G_(G), cfg_(std::move(cfg)) {
        double Rmax = std::max(cfg_.R_heat, cfg_.R_s);
        double umax = u_from_distance(Rmax);
        double T = cfg_.T;
        heat_ = std::make_shared<RadialTable>([T](double u) { return truncated_green_kernel(distance_from_u(u), T); }, umax);
        for (double s : cfg_.s_list)
            s_tables_.push_back(std::make_shared<RadialTable>([s](double u) { return free_green_s_u(u, s); }, umax));
        heat_windows_ = detail::window_family(cfg_.R_heat, cfg_.width_heat, cfg_.sub_radii);
        s_windows_ = detail::window_family(cfg_.R_s, cfg_.width_s, cfg_.sub_radii);
        heat_sum_ = std::make_unique<LatticeSummer>(G_, std::vector{heat_}, heat_windows_);
        s_sum_ = std::make_unique<LatticeSummer>(G_, s_tables_, s_windows_);
        // identity contribution at the diagonal: G_T(rho) - g_H(rho) -> -4 pi int_T^inf K_H(t;0) dt
        using boost::math::quadrature::gauss_kronrod;
        double err;
        diag_tail_ = -4 * pi *
                     gauss_kronrod<double, 31>::integrate([](double t) { return heat_kernel(t, 0); }, T, T + 400, 10,
                                                          1e-12, &err);
    }

    const GroupData& group() const { return G_; }
    const GreenConfig& config() const { return cfg_; }
    const RadialTable& heat_table() const { return *heat_; }
    std::shared_ptr<RadialTable> heat_table_ptr() const { return heat_; }
    const LatticeSummer& heat_summer() const { return *heat_sum_; }
    double spectral_allowance() const { return 4 * pi * std::exp(-G_.lambda1 * cfg_.T) / G_.lambda1; }
    double diagonal_identity_term() const { return diag_tail_; }

    GreenEvaluation from_heat_sums(const LatticeSummer::Result& r) const {
        GreenEvaluation e;
        e.method = GreenMethod::heat_integral;
        e.value = r.value[0][0];
        double spread = 0;
        for (double v : r.value[0]) spread = std::max(spread, std::abs(v - e.value));
        auto& tr = e.truncation_report;
        tr.ball_radius = cfg_.R_heat;
        tr.time_cutoff = cfg_.T;
        tr.spectral_allowance = spectral_allowance();
        tr.window_spread = spread;
        tr.elements = r.elements;
        e.error_estimate = spread + tr.spectral_allowance;
        return e;
    }

    GreenEvaluation from_s_sums(const LatticeSummer::Result& r) const {
        GreenEvaluation e;
        e.method = GreenMethod::s_extrapolation;
        std::vector<double> x;
        for (double s : cfg_.s_list) x.push_back(s - 1);
        std::vector<double> per_window;
        std::vector<double> diag0;
        for (std::size_t k = 0; k < s_windows_.size(); ++k) {
            std::vector<double> y;
            for (std::size_t i = 0; i < x.size(); ++i) y.push_back(r.value[i][k]);
            auto d = detail::neville_at_zero(x, y);
            per_window.push_back(d.back());
            if (k == 0) {
                diag0 = d;
                e.s_values = y;
            }
        }
        e.value = per_window[0];
        double spread = 0;
        for (double v : per_window) spread = std::max(spread, std::abs(v - e.value));
        auto& tr = e.truncation_report;
        tr.ball_radius = cfg_.R_s;
        tr.window_spread = spread;
        std::size_t n = diag0.size();
        tr.extrapolation_spread = n >= 2 ? std::abs(diag0[n - 1] - diag0[n - 2]) : 0;
        for (std::size_t i = 2; i < n; ++i)
            if (std::abs(diag0[i] - diag0[i - 1]) > std::abs(diag0[i - 1] - diag0[i - 2])) tr.low_confidence = true;
        tr.elements = r.elements;
        e.error_estimate = spread + tr.extrapolation_spread;
        return e;
    }

    GreenEvaluation green_heat(Point z, Point w) const {
        check_pair(z, w);
        return from_heat_sums(heat_sum_->eval(z, w));
    }

    GreenEvaluation green_s(Point z, Point w) const {
        check_pair(z, w);
        return from_s_sums(s_sum_->eval(z, w));
    }

    // diagonal limit of g_hyp(z,w) - g_H(z,w): identity removed, its limit added back
    GreenEvaluation diagonal(Point z, Exclude ex = Exclude::identity) const {
        auto e = from_heat_sums(heat_sum_->eval(z, z, ex));
        e.value += diag_tail_;
        return e;
    }

    void check_pair(const Point& z, const Point& w) const {
        auto a = reduce_gamma0(G_.level, z).z, b = reduce_gamma0(G_.level, w).z;
        double u = point_pair_u(a, b);
        if (u < 1e-24) throw SingularityError("g_hyp evaluated at coincident points");
        for_each_in_ball(G_, 1e-6, a, b, [](const IMat&, double) {
            throw SingularityError("g_hyp evaluated at equivalent points");
        });
    }

private:
    GroupData G_;
    GreenConfig cfg_;
    std::shared_ptr<RadialTable> heat_;
    std::vector<std::shared_ptr<RadialTable>> s_tables_;
    std::vector<Window> heat_windows_, s_windows_;
    std::unique_ptr<LatticeSummer> heat_sum_, s_sum_;
    double diag_tail_ = 0;
};

inline GreenEvaluation green_heat(const GreenContext& ctx, const Point& z, const Point& w) {
    auto a = reduce_gamma0(ctx.group().level, z).z, b = reduce_gamma0(ctx.group().level, w).z;
    return ctx.green_heat(a, b);
}

inline GreenEvaluation green_s_extrapolated(const GreenContext& ctx, const Point& z, const Point& w) {
    auto a = reduce_gamma0(ctx.group().level, z).z, b = reduce_gamma0(ctx.group().level, w).z;
    return ctx.green_s(a, b);
}

// int_X g_hyp(z,w) h(z) dmu_hyp(z). The log-singular core is removed from the lattice sum and
// integrated radially; cusp neighbourhoods above cap are excised and, for h = 1, replaced by the
// exact zeroth-Fourier-coefficient tail (a0(Y) - 4 pi / V) / Y. A weight must vanish above cap.
struct WeightedIntegral {
    double value = 0;
    double core = 0;
    double smooth = 0;
    double cusp_tail = 0;
    double cap = 0;
};

inline double green_cusp_average(const GreenContext& ctx, const CuspData& p, const Point& w, double Y, int n = 16) {
    double s = 0;
    for (int k = 0; k < n; ++k) {
        Point z = apply(p.sigma, Point((k + 0.5) / n, Y));
        s += ctx.green_heat(reduce_gamma0(ctx.group().level, z).z, w).value;
    }
    return s / n;
}

// weight = nullptr integrates g itself; otherwise cusp_weight is the weight's limit in every cusp,
// used for the excised tails, and core_nodes sets the polar rule around w
inline WeightedIntegral integrate_green(const GreenContext& ctx, const Point& w, QuadSpec q,
                                        const std::function<double(const Point&)>& weight = nullptr,
                                        double core = 0.5, double cusp_weight = 0,
                                        std::pair<int, int> core_nodes = {24, 32}) {
    const GroupData& G = ctx.group();
    Point wr = reduce_gamma0(G.level, w).z;
    double cap = q.cusp_cap > 0 ? q.cusp_cap : 3.0;
    for (auto& p : G.cusps) cap = std::max(cap, 1.5 * cusp_height(G, p, wr) + 0.5);
    q.cusp_cap = cap;
    auto nodes = domain_quadrature(G, q);
    std::vector<double> part(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) {
        Point z = reduce_gamma0(G.level, nodes[i].z).z;
        double h = weight ? weight(z) : 1.0;
        if (h == 0) return;
        auto r = ctx.heat_summer().eval(z, wr, Exclude::none, core);
        part[i] = nodes[i].weight * h * r.value[0][0];
    });
    WeightedIntegral out;
    out.cap = cap;
    for (double p : part) out.smooth += p;
    if (!weight) {
        out.core = LatticeSummer::area_integral(ctx.heat_table(), {1e9, 1}, core);
        for (auto& p : G.cusps)
            out.cusp_tail += (green_cusp_average(ctx, p, wr, cap) - 4 * pi / G.volume) / cap;
    } else {
        if (cusp_weight != 0)
            for (auto& p : G.cusps)
                out.cusp_tail += cusp_weight * (green_cusp_average(ctx, p, wr, cap) - 4 * pi / G.volume) / cap;
        // core in geodesic polar coordinates around w
        auto gr = gauss_legendre01(core_nodes.first);
        auto ga = gauss_legendre01(core_nodes.second);
        double sq = std::sqrt(wr.y);
        MoebiusMap to_w(sq, wr.x / sq, 0, 1 / sq);
        double s = 0;
        for (auto [sr, wr_] : gr) {
            double rho = core * sr;
            double rad = 2 * pi * std::sinh(rho) * ctx.heat_table()(u_from_distance(rho)) *
                         LatticeSummer::core_cutoff(rho, core);
            double ang = 0;
            for (auto [sa, wa] : ga) {
                double th = 2 * pi * sa;
                cplx d = std::tanh(rho / 2) * std::exp(cplx(0, th));
                cplx zh = cplx(0, 1) * (1.0 + d) / (1.0 - d);
                ang += wa * weight(apply(to_w, Point(zh.real(), zh.imag())));
            }
            s += wr_ * core * rad * ang;
        }
        out.core = s;
    }
    out.value = out.smooth + out.core + out.cusp_tail;
    return out;
}

inline double normalization_residual(const GreenContext& ctx, const Point& w, const QuadSpec& q) {
    return integrate_green(ctx, w, q).value;
}

struct CuspAsymptoticReport {
    std::vector<double> heights, values, compensated;
    double slope = 0;           // least-squares slope of g against log h
    double expected_slope = 0;  // -4 pi / V
    double fitted_constant = 0;
    double drift_first = 0, drift_last = 0;
    double oscillatory_max = 0;  // |log|1 - e^{2 pi i (z - w)}|^2| at the smallest gap
};

inline CuspAsymptoticReport cusp_asymptotic_check(const GreenContext& ctx, const CuspData& p, const Point& w,
                                                  const std::vector<double>& heights, double x = 0.1) {
    const GroupData& G = ctx.group();
    CuspAsymptoticReport rep;
    rep.expected_slope = -4 * pi / G.volume;
    for (double h : heights) {
        Point z = apply(p.sigma, Point(x, h));
        double g = green_heat(ctx, z, w).value;
        rep.heights.push_back(h);
        rep.values.push_back(g);
        rep.compensated.push_back(g + 4 * pi / G.volume * std::log(h));
    }
    std::size_t n = heights.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += std::log(heights[i]) / n, my += rep.values[i] / n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = std::log(heights[i]) - mx;
        sxy += dx * (rep.values[i] - my), sxx += dx * dx;
    }
    rep.slope = sxy / sxx;
    rep.fitted_constant = my - rep.slope * mx;
    if (n >= 3) {
        rep.drift_first = std::abs(rep.compensated[1] - rep.compensated[0]);
        rep.drift_last = std::abs(rep.compensated[n - 1] - rep.compensated[n - 2]);
    }
    Point ws = apply(p.sigma.inverse(), w);
    double gap = heights.front() - ws.y;
    cplx q = std::exp(cplx(0, 2 * pi) * cplx(x - ws.x, gap));
    rep.oscillatory_max = std::abs(std::log(std::norm(1.0 - q)));
    return rep;
}

}  // namespace hypgreen
