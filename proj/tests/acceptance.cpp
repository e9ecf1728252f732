// One PASS/FAIL line per acceptance criterion. Exit status is 0 iff every criterion passes, except
// that criterion 3's "minimal trace 7" clause is a known erratum: Gamma0(11) contains trace-3
// elements, so that clause always prints FAIL with a certificate and does not affect the exit code.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "hypgreen/canonical.hpp"

using namespace hypgreen;

namespace {

struct Outcome {
    bool pass = true;
    bool erratum_only = false;  // failing only through the erratum clause
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

const CanonicalData& can11() {
    static CanonicalData c = level11_canonical();
    return c;
}
const GroupData& g11() { return can11().group(); }

GreenConfig radius(double R) {
    GreenConfig c;
    c.R_heat = R;
    c.R_s = R - 0.5;
    return c;
}

const GreenContext& ctx13() {
    static GreenContext ctx(g11(), radius(13));
    return ctx;
}

Outcome heat_normalization() {
    Outcome o;
    double worst = 0, mass_dev = 0;
    for (double rho : {0.5, std::log(2.0), 2.0}) {
        double ref = 2 * std::log(1 / std::tanh(rho / 2));
        worst = std::max(worst, std::abs(heat_time_integral(rho).value - ref));
    }
    for (double t : {0.25, 1.0}) mass_dev = std::max(mass_dev, std::abs(heat_mass(t) - 1));
    o.pass = worst <= 1e-4 && mass_dev <= 1e-3;
    o.detail = fmt("max |4pi int K dt - 2 log coth| = %.2e, max |mass - 1| = %.2e", worst, mass_dev);
    return o;
}

Outcome closed_forms() {
    Outcome o;
    double worst = 0;
    for (double y : {0.5, 1.0, 2.0}) {
        double s = 0;
        const long K = 1000000;
        for (long n = K; n >= 1; --n) s += std::log1p(4 * y * y / (double(n) * n));
        s = 2 * (s + 4 * y * y / (K + 0.5));
        worst = std::max(worst, std::abs(p_gen_closed(y) - s));
    }
    double lap = laplacian_p_gen(1);
    o.pass = worst <= 1e-6 && std::abs(lap + 1.99890) <= 1e-5;
    o.detail = fmt("max |closed - 10^6-term sum| = %.2e, Delta P(y=1) = %.6f", worst, lap);
    return o;
}

Outcome group_fixtures() {
    Outcome o;
    const GroupData& G = g11();
    const double V = G.volume, Vs = G.volume_from_signature();
    bool fixtures = G.index == 12 && G.genus == 1 && G.cusps.size() == 2 && std::abs(V - 4 * pi) <= 1e-10 &&
                    std::abs(Vs - 4 * pi) <= 1e-10;
    auto geo = shortest_geodesic(G, 10);
    const IMat& c = geo.certificate;
    bool trace7 = geo.trace == 7;
    o.pass = fixtures && trace7;
    o.erratum_only = fixtures && !trace7;
    o.detail = fmt("index %d, genus %d, cusps %d, volume %.12f / %.12f; minimal trace %lld (certificate "
                   "(%lld,%lld;%lld,%lld), length %.4f), expected 7",
                   int(G.index), int(G.genus), int(G.cusps.size()), V, Vs, (long long)geo.trace, (long long)c.a,
                   (long long)c.b, (long long)c.c, (long long)c.d, geo.length);
    if (o.erratum_only) o.detail += " [erratum: trace 3 exists]";
    return o;
}

// every g in Gamma0(N) with d(z, gw) < R, from entrywise bounds alone:
// g = s_z h s_w^{-1} with |h|_F^2 = 2 cosh d(z, gw)
std::set<IMat> entry_bounded_ball(const GroupData& G, double R, Point z, Point w) {
    const i64 N = G.level;
    auto frob = [](Point p) { return std::sqrt(p.y + (p.x * p.x + 1) / p.y); };
    const i64 E = i64(frob(z) * std::sqrt(2 * std::cosh(R)) * frob(w)) + 1;
    const double U = u_from_distance(R);
    std::set<IMat> out;
    auto test = [&](IMat g) {
        if (point_pair_u(z, apply(g.moebius(), w)) < U) out.insert(g.canonical());
    };
    for (i64 c = -E; c <= E; ++c) {
        if (pmod(c, N) != 0) continue;
        for (i64 a = -E; a <= E; ++a)
            for (i64 d = -E; d <= E; ++d) {
                if (c == 0) {
                    if (a * d != 1) continue;
                    for (i64 b = -E; b <= E; ++b) test({a, b, 0, d});
                } else if ((a * d - 1) % c == 0) {
                    i64 b = (a * d - 1) / c;
                    if (std::abs(b) <= E) test({a, b, c, d});
                }
            }
    }
    return out;
}

Outcome ball_enumeration() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ud(0.05, 3.0);
    int mismatches = 0;
    std::size_t total = 0;
    for (int i = 0; i < 50; ++i) {
        Point z = sample_uniform(g11(), rng), w = sample_uniform(g11(), rng);
        double R = ud(rng);
        std::set<IMat> fast;
        for (auto& g : ball_int(g11(), R, z, w)) fast.insert(g.canonical());
        auto brute = entry_bounded_ball(g11(), R, z, w);
        total += brute.size();
        mismatches += fast != brute;
    }
    o.pass = mismatches == 0;
    o.detail = fmt("50 triples, %d mismatches, %zu elements in total", mismatches, total);
    return o;
}

Outcome green_cross() {
    Outcome o;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.3, 2.0);
    int bad = 0;
    double worst = 0;
    for (int i = 0; i < 10; ++i) {
        Point z = reduce_gamma0(11, Point(ux(rng), uy(rng))).z, w = reduce_gamma0(11, Point(ux(rng), uy(rng))).z;
        auto h = green_heat(ctx13(), z, w);
        auto s = green_s_extrapolated(ctx13(), z, w);
        double d = std::abs(h.value - s.value);
        worst = std::max(worst, d);
        bad += !(d <= 1e-2 && d <= h.error_estimate + s.error_estimate);
    }
    GreenContext ctx9(g11(), radius(9));
    const double V = g11().volume;
    double res = normalization_residual(ctx9, Point(0.1, 1.3), {12, 12, 1, 1, 0});
    double slope_dev = 0;
    std::string slopes;
    for (auto& p : g11().cusps) {
        auto rep = cusp_asymptotic_check(ctx13(), p, Point(0.1, 1.3), {10, 20, 40});
        slope_dev = std::max(slope_dev, std::abs(rep.slope / rep.expected_slope - 1));
        slopes += fmt(" %.5f", rep.slope);
    }
    o.pass = bad == 0 && std::abs(res) <= 1e-2 * V && slope_dev <= 0.05;
    o.detail = fmt("heat vs s: %d/10 outside bars, max diff %.2e; normalization residual %.2e (limit %.2e); cusp "
                   "slopes%s vs %.5f",
                   bad, worst, res, 1e-2 * V, slopes.c_str(), -4 * pi / V);
    return o;
}

const BoundInputsBundle& inputs11() {
    static BoundInputsBundle b = standard_bound_inputs(g11(), 0.1);
    return b;
}

Outcome certification() {
    Outcome o;
    auto& in = inputs11();
    auto B = bound_B(g11(), in.heat, in.consts, in.eps, 0.1, in.heat.delta_X);
    auto rep = certify_hyperbolic(ctx13(), B, in.eps, 200, 11);
    auto e = elliptic_lemma_check(build_gamma0(2), 0.1, 50);
    o.pass = rep.violations() == 0 && rep.samples.size() == 200 && e.violations7 == 0 && e.violations14 == 0;
    o.detail = fmt("B = %.4f, %zu/200 violations, min margin %.4f; elliptic lemmas %zu checks, %zu + %zu violations, "
                   "worst ratios %.4f %.4f",
                   B.value, rep.violations(), rep.min_margin(), e.checks, e.violations7, e.violations14,
                   e.worst_ratio7, e.worst_ratio14);
    return o;
}

Outcome canonical_suite() {
    Outcome o;
    auto& C = can11();
    double mass = mu_can_mass(C, {8, 8, 1, 1, 3.0});
    std::vector<Bump> bumps{{Point(-0.37, 0.095), 0.15}, {Point(0.5, 0.2), 0.15}, {Point(0.3, 0.25), 0.15}};
    auto key = key_identity_check(C, bumps, {15, 3, 3});

    auto& in = inputs11();
    double dX = d_x_estimate(C).value;
    double delta = 0.5 * std::min(in.eps.epsilon, in.eps.epsilon_tilde);
    auto bc = bound_C(g11(), in.heat, in.consts, in.eps, 0.1, delta, dX);
    PhiField phi(ctx13(), C);
    std::mt19937_64 rng(5);
    int violations = 0;
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        Point z = sample_Y_eps(g11(), 0.1, rng), w = sample_Y_eps(g11(), 0.1, rng);
        double d = std::abs(phi(z) + phi(w));
        worst = std::max(worst, d);
        violations += d > 2 * bc.value;
    }
    auto ch = c_hyp_check(phi, C, dX);
    o.pass = std::abs(mass - 1) <= 1e-2 && key.max_relative <= 2e-2 && violations == 0 && ch.passed();
    o.detail = fmt("mass %.6f; key identity max relative %.2e; |g_hyp - g_can| max %.4f vs 2C = %.4f (C partial), "
                   "%d violations; |C_hyp|/8g^2 = %.4f <= %.4f",
                   mass, key.max_relative, worst, 2 * bc.value, violations, ch.lhs, ch.rhs);
    return o;
}

Outcome audits() {
    Outcome o;
    double worst_ratio = 0;
    std::string ratios;
    for (double rho : {0.5, std::log(2.0), 2.0}) {
        double raw = heat_time_integral(rho).value / (4 * pi);
        double r = 2 * std::log(1 / std::tanh(rho / 2)) / raw;
        worst_ratio = std::max(worst_ratio, std::abs(r / (4 * pi) - 1));
        ratios += fmt(" %.6f", r);
    }

    GreenContext ctx14(g11(), radius(14));
    const double target = 8 * pi / g11().volume * std::log(2.0);
    std::vector<double> v;
    for (double h : {10.0, 20.0, 40.0}) {
        auto H = h_sum(ctx14, Point(0.17, h));
        v.push_back(H.value + H.E);
    }
    double d1 = v[1] - v[0], d2 = v[2] - v[1];
    bool sign_ok = d1 < 0 && d2 < 0 && std::abs(d1 - d2) <= 0.1 * target &&
                   std::abs(std::abs(d2) - target) <= 0.1 * target;

    double et = epsilon_tilde(0.1);
    double a = 3 * std::log(0.1 / 2);
    double literal = 2 * std::log((1 + std::sqrt(1 + a * a)) / a);
    bool eps_ok = std::abs(et - 0.22208) <= 1e-5 && std::isnan(literal);

    o.pass = worst_ratio <= 0.05 && sign_ok && eps_ok;
    o.detail = fmt("2 log coth / int K dt =%s (4pi = %.6f); E+H differences %.5f %.5f vs -(8pi/V) log 2 = %.5f; "
                   "eps~(0.1) = %.5f, signed-log formula gives %f",
                   ratios.c_str(), 4 * pi, d1, d2, -target, et, literal);
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "heat normalization", 30, heat_normalization},
        {2, "closed-form oracles", 10, closed_forms},
        {3, "group fixtures", 1e9, group_fixtures},
        {4, "ball enumeration", 120, ball_enumeration},
        {5, "Green's cross-validation", 600, green_cross},
        {6, "certification", 900, certification},
        {7, "canonical suite", 1200, canonical_suite},
        {8, "audits", 1e9, audits},
    };
    bool ok = true;
    for (auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, false, std::string("exception: ") + e.what()};
        }
        double dt = seconds_since(t0);
        bool in_time = dt < c.limit;
        bool pass = o.pass && in_time;
        if (!pass && !(o.erratum_only && in_time)) ok = false;
        std::printf("%s criterion %d (%s): %s; %.1f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), dt,
                    in_time ? "" : " (over time limit)");
        std::fflush(stdout);
    }
    return ok ? 0 : 1;
}
