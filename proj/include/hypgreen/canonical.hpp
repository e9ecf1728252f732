#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bounds.hpp"

namespace hypgreen {

// ---- weight-2 cusp forms ----

namespace detail {
// prod_{n>=1} (1 - q^{kn}) up to q^M, by the pentagonal number theorem
inline std::vector<long long> eta_product_series(int M, int k) {
    std::vector<long long> a(M + 1, 0);
    for (long j = -M; j <= M; ++j) {
        long e = j * (3 * j - 1) / 2 * k;
        if (e < 0 || e > M) continue;
        a[e] += (j % 2 == 0) ? 1 : -1;
    }
    return a;
}

inline std::vector<long long> series_mul(const std::vector<long long>& a, const std::vector<long long>& b, int M) {
    std::vector<long long> c(M + 1, 0);
    for (int i = 0; i <= M; ++i)
        if (a[i])
            for (int j = 0; i + j <= M; ++j) c[i + j] += a[i] * b[j];
    return c;
}

inline bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}
}  // namespace detail

struct CuspForm {
    int level = 1;
    std::vector<double> coefficients;  // a_1, a_2, ...
    bool fricke_eigenform = false;     // |f| is invariant under z -> -1/(Nz) with weight 2
    double petersson_norm = 0;         // int_X y^2 |f|^2 dmu_hyp

    cplx operator()(cplx z) const {
        cplx q = std::exp(cplx(0, 2 * pi) * z), qn = q, s = 0;
        const double aq = std::abs(q);
        for (std::size_t n = 0; n < coefficients.size(); ++n) {
            s += coefficients[n] * qn;
            qn *= q;
            if (std::abs(qn) * double(n + 2) < 1e-30) return s;
        }
        if (std::pow(aq, double(coefficients.size())) * double(coefficients.size()) > 1e-14)
            throw ConvergenceError("q-expansion too short at Im z = " + std::to_string(z.imag()), z.imag());
        return s;
    }
};

// y^2 |f(z)|^2, evaluated where the q-expansion converges fastest
inline double form_weight(const CuspForm& f, const Point& z) {
    Point r = reduce_gamma0(f.level, z).z;
    if (f.fricke_eigenform) {
        cplx w = -1.0 / (double(f.level) * r.z());
        if (w.imag() > r.y) r = Point(w.real(), w.imag());
    }
    return r.y * r.y * std::norm(f(r.z()));
}

inline double petersson_norm(const CuspForm& f, const GroupData& G, const QuadSpec& q = {12, 12, 2, 2, 3.0}) {
    if (G.level != f.level) throw ContractError("form and group have different levels");
    auto nodes = domain_quadrature(G, q);
    std::vector<double> part(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) { part[i] = nodes[i].weight * form_weight(f, nodes[i].z); });
    double s = 0;
    for (double p : part) s += p;
    return s;
}

// eta(z)^2 eta(11z)^2, the newform of level 11
inline CuspForm level11_form(int M = 400) {
    if (M < 50) throw ContractError("level 11 form needs at least 50 coefficients");
    auto A = detail::eta_product_series(M, 1), B = detail::eta_product_series(M, 11);
    auto P = detail::series_mul(detail::series_mul(A, A, M), detail::series_mul(B, B, M), M);
    CuspForm f;
    f.level = 11;
    f.fricke_eigenform = true;
    f.coefficients.assign(P.begin(), P.begin() + M);
    f.petersson_norm = petersson_norm(f, build_gamma0(11));
    return f;
}

// log(sqrt(Im t) |eta(t)|^2), invariant under SL2(Z)
inline double log_eta_invariant(const Point& t) {
    Point r = reduce_gamma0(1, t).z;
    cplx q = std::exp(cplx(0, 2 * pi) * r.z()), s = 1;
    const double lq = std::log(std::abs(q));
    for (long j = 1;; ++j) {
        double e1 = double(j * (3 * j - 1) / 2), e2 = double(j * (3 * j + 1) / 2);
        if (e1 * lq < -80) break;
        double sg = (j % 2) ? -1 : 1;
        s += sg * (std::pow(q, e1) + std::pow(q, e2));
    }
    return 0.5 * std::log(r.y) - pi * r.y / 6 + 2 * std::log(std::abs(s));
}

// ---- the canonical measure ----

class CanonicalData {
public:
    CanonicalData(const GroupData& G, std::vector<CuspForm> basis) : G_(G), forms_(std::move(basis)) {
        if (G_.genus < 1) throw ContractError("canonical measure needs genus >= 1");
        if (int(forms_.size()) != G_.genus)
            throw ContractError("need an orthogonal basis of " + std::to_string(G_.genus) + " cusp forms");
        for (auto& f : forms_)
            if (f.level != G_.level || !(f.petersson_norm > 0)) throw ContractError("cusp form does not match the group");
    }

    const GroupData& group() const { return G_; }
    const std::vector<CuspForm>& forms() const { return forms_; }
    int genus() const { return G_.genus; }

    // dmu_can / dmu_hyp, with mu_hyp of total mass V
    double ratio(const Point& z) const {
        double s = 0;
        for (auto& f : forms_) s += form_weight(f, z) / f.petersson_norm;
        return s / genus();
    }

private:
    GroupData G_;
    std::vector<CuspForm> forms_;
};

inline CanonicalData level11_canonical(int M = 400) { return CanonicalData(build_gamma0(11), {level11_form(M)}); }

inline double mu_can_mass(const CanonicalData& C, const QuadSpec& q) {
    auto nodes = domain_quadrature(C.group(), q);
    double s = 0;
    for (auto& n : nodes) s += n.weight * C.ratio(n.z);
    return s;
}

struct DXEstimate {
    double value = 0;  // safety * raw
    double raw = 0;    // sup over the grid of V mu_can / mu_hyp
    Point argmax;
    double safety = 1.05;
};

inline DXEstimate d_x_estimate(const CanonicalData& C, const GridSpec& grid = {{8, 8, 1, 1}, 50, 0}, double safety = 1.05) {
    DXEstimate d;
    d.safety = safety;
    for (auto& z : sup_grid(C.group(), grid)) {
        double v = C.group().volume * C.ratio(z);
        if (v > d.raw) d.raw = v, d.argmax = z;
    }
    d.value = safety * d.raw;
    return d;
}

// ---- Laplacian of the identity-excluded diagonal sum ----

struct LaplacianConfig {
    double R = 15, width = 3;
    int sub_radii = 3;
};

struct DiagonalLaplacian {
    double value = 0;
    double error_estimate = 0;  // spread over the window family
    long long elements = 0;
};

namespace detail {
// smooth_step and its first two derivatives
inline void smooth_step_jet(double x, double& s, double& s1, double& s2) {
    if (x <= 0 || x >= 1) {
        s = x >= 1 ? 1 : 0;
        s1 = s2 = 0;
        return;
    }
    double p1 = -1 / (x * x) - 1 / ((1 - x) * (1 - x));
    double p2 = 2 / (x * x * x) - 2 / ((1 - x) * (1 - x) * (1 - x));
    s = smooth_step(x);
    s1 = -s * (1 - s) * p1;
    s2 = -(s1 * (1 - 2 * s) * p1 + s * (1 - s) * p2);
}
}  // namespace detail

// Delta_z sum_{g != 1} chi(rho) log(1 + 1/u(z, g z)), termwise: for trace t and A = (t^2 - 4)/4,
// Delta k(u) = -(4u(u - A) k'' + (6u - 4A) k')
inline DiagonalLaplacian diagonal_laplacian(const GroupData& G, const Point& z0, const LaplacianConfig& cfg = {}) {
    Point z = LatticeSummer::orient(G.level, z0, z0).first;
    auto windows = detail::window_family(cfg.R, cfg.width, cfg.sub_radii);
    std::vector<double> out(windows.size(), 0.0);
    DiagonalLaplacian r;
    for_each_in_ball(G, cfg.R, z, z, [&](const IMat& g, double u) {
        if (int_kind(g) == Kind::identity || !(u > 0)) return;
        ++r.elements;
        double t = double(g.a + g.d), A = (t * t - 4) / 4, rho = distance_from_u(u);
        double G0 = std::log1p(1 / u), G1 = -1 / (u * (u + 1)), G2 = (2 * u + 1) / (u * u * (u + 1) * (u + 1));
        double r1 = 1 / std::sqrt(u * (1 + u)), r2 = -(1 + 2 * u) / (2 * std::pow(u * (1 + u), 1.5));
        for (std::size_t k = 0; k < windows.size(); ++k) {
            double w = windows[k].width, s, s1, s2;
            detail::smooth_step_jet((windows[k].R - rho) / w, s, s1, s2);
            double c1 = -s1 * r1 / w, c2 = s2 * r1 * r1 / (w * w) - s1 * r2 / w;
            double k1 = c1 * G0 + s * G1, k2 = c2 * G0 + 2 * c1 * G1 + s * G2;
            out[k] += -(4 * u * (u - A) * k2 + (6 * u - 4 * A) * k1);
        }
    });
    r.value = out[0];
    for (double v : out) r.error_estimate = std::max(r.error_estimate, std::abs(v - r.value));
    return r;
}

// ---- the function phi with Delta phi = 4 pi (mu_can - mu_hyp / V) ----

enum class PhiMode { cor6, convolution };

inline const char* phi_mode_name(PhiMode m) { return m == PhiMode::cor6 ? "cor6" : "convolution"; }

struct PhiConfig {
    QuadSpec quad{8, 8, 1, 1, 3.0};
    Point reference{0.1, 0.9};           // where int g_can(., w) dmu_can = 0 is imposed
    LaplacianConfig laplacian{14, 3, 3};  // weight of the convolution mode
    std::pair<int, int> core_nodes{8, 12};
};

struct PhiNode {
    Point z;  // reduced
    double weight;
    double ratio;      // mu_can / mu_hyp
    double base;       // phi without the additive constant
    double laplacian;  // Delta D, convolution mode only
};

class PhiField {
public:
    PhiField(const GreenContext& ctx, const CanonicalData& can, PhiMode mode = PhiMode::cor6, PhiConfig cfg = {})
        : ctx_(&ctx), can_(&can), mode_(mode), cfg_(cfg) {
        const GroupData& G = ctx.group();
        if (G.level != can.group().level) throw ContractError("context and canonical data use different groups");
        if (!detail::is_prime(G.level) || !G.elliptic.empty())
            throw ContractError("closed-form phi needs a prime level without elliptic points");
        auto q = cfg_.quad;
        if (!(q.cusp_cap > 0)) throw ContractError("phi grid needs a cusp cap");
        auto raw = domain_quadrature(G, q);
        nodes_.resize(raw.size());
        parallel_for(raw.size(), [&](std::size_t i) {
            PhiNode n;
            n.z = reduce_gamma0(G.level, raw[i].z).z;
            n.weight = raw[i].weight;
            n.ratio = can.ratio(n.z);
            n.base = base(n.z);
            n.laplacian = mode_ == PhiMode::convolution ? diagonal_laplacian(G, n.z, cfg_.laplacian).value : 0;
            nodes_[i] = n;
        });
        double mass = 0, area = 0, phi_can = 0, phi_hyp = 0;
        for (auto& n : nodes_) {
            mass += n.weight * n.ratio;
            area += n.weight;
            phi_can += n.weight * n.ratio * n.base;
            phi_hyp += n.weight * n.base;
        }
        // phi ~ a_p - (4 pi / V) log y in every cusp
        const double cap = q.cusp_cap, beta = 4 * pi / G.volume;
        for (auto& p : G.cusps) {
            double avg = 0;
            for (int k = 0; k < 8; ++k) avg += base(apply(p.sigma, Point((k + 0.5) / 8, cap))) / 8;
            phi_hyp += (avg - beta) / cap;
            area += 1 / cap;
        }
        grid_mass_ = mass;
        // mu_can renormalized on the grid, so that the integral of Delta phi vanishes exactly
        integral_can_ = phi_can / mass;
        integral_hyp_ = phi_hyp;
        grid_area_ = area;
        const double g = can.genus();
        c_hyp_ = (g * g / pi) * 4 * pi * (integral_can_ - integral_hyp_ / area);
        // int g_can(., w0) dmu_can = 0 fixes the constant
        double I0 = green_against_can(cfg_.reference);
        constant_ = cor6_constant_ = 0.5 * (I0 - integral_can_ - base(cfg_.reference));
        if (mode_ == PhiMode::convolution) {
            for (auto& n : nodes_) lap_.emplace(key(n.z), n.laplacian);
            // the same constant as cor6 is not assumed: this mode carries -C_hyp / 8g^2
            constant_ = -c_hyp_ / (8 * g * g);
        }
    }

    PhiMode mode() const { return mode_; }
    const PhiConfig& config() const { return cfg_; }
    const std::vector<PhiNode>& nodes() const { return nodes_; }
    double constant() const { return constant_; }
    double c_hyp() const { return c_hyp_; }
    // int phi dmu_hyp / V on the grid; equals -C_hyp / 8g^2 when phi is right
    double mean_hyp() const { return integral_hyp_ / grid_area_ + (mode_ == PhiMode::cor6 ? constant_ : cor6_constant_); }
    double cor6_constant() const { return cor6_constant_; }
    double grid_mass() const { return grid_mass_; }
    // -C_hyp / 8 g^2, the constant the convolution mode uses
    double constant_from_c_hyp() const { return -c_hyp_ / (8.0 * can_->genus() * can_->genus()); }

    double operator()(const Point& z) const {
        if (mode_ == PhiMode::cor6) return base(z) + constant_;
        return convolution(z) + constant_;
    }

    // (D(z) + (8 pi / V)(l(z) + l(Nz))) / 2g, where l is log(sqrt(y)|eta|^2)
    double base(const Point& z0) const {
        const GroupData& G = ctx_->group();
        Point z = reduce_gamma0(G.level, z0).z;
        double D = ctx_->diagonal(z).value;
        double L = log_eta_invariant(z) + log_eta_invariant(Point(G.level * z.x, G.level * z.y));
        return (D + 8 * pi / G.volume * L) / (2.0 * can_->genus());
    }

    // int g_hyp(z, .) Delta D / 4pi dmu_hyp / 2g
    double convolution(const Point& z) const {
        const GroupData& G = ctx_->group();
        auto weight = [&](const Point& p) {
            Point r = reduce_gamma0(G.level, p).z;
            auto it = lap_.find(key(r));
            double L = it != lap_.end() ? it->second : diagonal_laplacian(G, r, cfg_.laplacian).value;
            return L / (4 * pi);
        };
        const double k_inf = -(2 + 8 * pi / G.volume) / (4 * pi);
        auto I = integrate_green(*ctx_, z, cfg_.quad, weight, 0.5, k_inf, cfg_.core_nodes);
        return I.value / (2.0 * can_->genus());
    }

    // int g_hyp(., w) dmu_can
    double green_against_can(const Point& w) const {
        auto I = integrate_green(*ctx_, w, cfg_.quad, [&](const Point& p) { return can_->ratio(p); }, 0.5, 0,
                                 {12, 16});
        return I.value;
    }

    // int g_can(., w) dmu_can, zero for every w when phi is right (cor6 mode)
    double normalization(const Point& w) const {
        if (mode_ != PhiMode::cor6) throw ContractError("normalization is checked on the cor6 field");
        return green_against_can(w) - (integral_can_ + constant_) - (*this)(w);
    }

private:
    static std::pair<double, double> key(const Point& p) { return {p.x, p.y}; }

    const GreenContext* ctx_;
    const CanonicalData* can_;
    PhiMode mode_;
    PhiConfig cfg_;
    std::vector<PhiNode> nodes_;
    std::map<std::pair<double, double>, double> lap_;
    double grid_mass_ = 0, grid_area_ = 0, integral_can_ = 0, integral_hyp_ = 0;
    double c_hyp_ = 0, constant_ = 0, cor6_constant_ = 0;
};

inline double c_hyp_constant(const PhiField& phi) { return phi.c_hyp(); }

// g_can(z, w) = g_hyp(z, w) - phi(z) - phi(w)
inline double green_canonical(const GreenContext& ctx, const PhiField& phi, const Point& z, const Point& w) {
    return green_heat(ctx, z, w).value - phi(z) - phi(w);
}

struct PhiModeAgreement {
    std::vector<Point> points;
    std::vector<double> cor6, convolution;
    double mean_difference = 0;  // convolution - cor6
    double rms = 0;              // after removing the mean difference
};

inline PhiModeAgreement phi_mode_agreement(const PhiField& a, const PhiField& b, const std::vector<Point>& pts) {
    PhiModeAgreement r;
    r.points = pts;
    for (auto& z : pts) {
        r.cor6.push_back(a(z));
        r.convolution.push_back(b(z));
    }
    for (std::size_t i = 0; i < pts.size(); ++i) r.mean_difference += (r.convolution[i] - r.cor6[i]) / pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double d = r.convolution[i] - r.cor6[i] - r.mean_difference;
        r.rms += d * d / pts.size();
    }
    r.rms = std::sqrt(r.rms);
    return r;
}

// |C_hyp| / 8g^2 <= 2 pi (d_X + 1)^2 / (lambda_1 V)
struct CHypCheck {
    double lhs = 0, rhs = 0;
    bool passed() const { return lhs <= rhs; }
};

inline CHypCheck c_hyp_check(const PhiField& phi, const CanonicalData& can, double d_X) {
    const GroupData& G = can.group();
    double g = can.genus();
    CHypCheck c;
    c.lhs = std::abs(phi.c_hyp()) / (8 * g * g);
    c.rhs = 2 * pi * (d_X + 1) * (d_X + 1) / (G.lambda1 * G.volume);
    return c;
}

// ---- the key identity g mu_can = (1/4pi + 1/V) mu_hyp + Delta D / 8pi tested against bumps ----

struct Bump {
    Point center;
    double sigma = 0.2;  // f = exp(-rho^2 / 2 sigma^2), cut at 6 sigma
};

struct KeyIdentityTerm {
    Bump bump;
    double lhs = 0;        // g int f dmu_can
    double rhs = 0;        // (1/4pi + 1/V) int f dmu_hyp + (1/8pi) int f Delta D dmu_hyp
    double residual = 0;   // lhs - rhs
    double relative = 0;   // |residual| / |lhs|
    double error_bar = 0;  // window spread of Delta D, integrated
    double mass = 0;       // int f dmu_hyp
};

struct KeyIdentityReport {
    std::vector<KeyIdentityTerm> terms;
    double max_relative = 0;
};

inline KeyIdentityTerm key_identity_bump(const CanonicalData& can, const Bump& b, const LaplacianConfig& lap = {},
                                         int radial = 8, int angular = 12) {
    const GroupData& G = can.group();
    const double rmax = 6 * b.sigma;
    if (!(b.sigma > 0)) throw ContractError("bump width must be positive");
    // the identity holds pointwise on H, so the bump need not embed in X
    const Point c = b.center;
    auto gr = gauss_legendre01(radial);
    std::vector<std::pair<double, double>> pts;  // (radius, angle)
    for (auto [s, w] : gr)
        for (int a = 0; a < angular; ++a) pts.push_back({rmax * s, 2 * pi * (a + 0.5) / angular});
    std::vector<double> can_part(pts.size()), lap_part(pts.size()), err_part(pts.size()), mass_part(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        auto [r, th] = pts[i];
        Point z = hyperbolic_circle_point(c, r, th);
        double f = std::exp(-r * r / (2 * b.sigma * b.sigma));
        auto L = diagonal_laplacian(G, z, lap);
        can_part[i] = f * can.ratio(z);
        lap_part[i] = f * L.value;
        err_part[i] = f * L.error_estimate;
        mass_part[i] = f;
    });
    KeyIdentityTerm t;
    t.bump = b;
    double I_can = 0, I_lap = 0, I_err = 0, I_mass = 0;
    std::size_t i = 0;
    for (auto [s, w] : gr) {
        double r = rmax * s, jac = rmax * w * std::sinh(r) * 2 * pi / angular;
        for (int a = 0; a < angular; ++a, ++i) {
            I_can += jac * can_part[i];
            I_lap += jac * lap_part[i];
            I_err += jac * err_part[i];
            I_mass += jac * mass_part[i];
        }
    }
    t.mass = I_mass;
    t.lhs = can.genus() * I_can;
    t.rhs = (1 / (4 * pi) + 1 / G.volume) * I_mass + I_lap / (8 * pi);
    t.residual = t.lhs - t.rhs;
    t.relative = std::abs(t.residual) / std::abs(t.lhs);
    t.error_bar = I_err / (8 * pi);
    return t;
}

inline KeyIdentityReport key_identity_check(const CanonicalData& can, const std::vector<Bump>& bumps,
                                            const LaplacianConfig& lap = {}, int radial = 8, int angular = 12) {
    KeyIdentityReport r;
    for (auto& b : bumps) {
        r.terms.push_back(key_identity_bump(can, b, lap, radial, angular));
        r.max_relative = std::max(r.max_relative, r.terms.back().relative);
    }
    return r;
}

// f = 1: g = (1/4pi + 1/V) V + (1/8pi) int_X Delta D dmu_hyp
struct KeyIdentityGlobal {
    double lhs = 0, rhs = 0, cusp_limit = 0;
};

inline KeyIdentityGlobal key_identity_global(const CanonicalData& can, const QuadSpec& q, const LaplacianConfig& lap) {
    const GroupData& G = can.group();
    auto nodes = domain_quadrature(G, q);
    std::vector<double> part(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) { part[i] = nodes[i].weight * diagonal_laplacian(G, nodes[i].z, lap).value; });
    double I = 0;
    for (double p : part) I += p;
    KeyIdentityGlobal r;
    for (auto& p : G.cusps) {
        double avg = 0;
        for (int k = 0; k < 8; ++k) avg += diagonal_laplacian(G, apply(p.sigma, Point((k + 0.5) / 8, q.cusp_cap)), lap).value / 8;
        I += avg / q.cusp_cap;
        r.cusp_limit += avg / G.cusps.size();
    }
    r.lhs = can.genus();
    r.rhs = (1 / (4 * pi) + 1 / G.volume) * G.volume + I / (8 * pi);
    return r;
}

}  // namespace hypgreen
