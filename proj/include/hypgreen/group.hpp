#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace hypgreen {

using i64 = long long;

inline i64 pmod(i64 a, i64 n) {
    i64 r = a % n;
    return r < 0 ? r + n : r;
}

// returns g = gcd(a,b) >= 0 and x,y with a x + b y = g
inline i64 egcd(i64 a, i64 b, i64& x, i64& y) {
    i64 x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        i64 q = a / b, t = a - q * b;
        a = b, b = t;
        t = x0 - q * x1, x0 = x1, x1 = t;
        t = y0 - q * y1, y0 = y1, y1 = t;
    }
    if (a < 0) a = -a, x0 = -x0, y0 = -y0;
    x = x0, y = y0;
    return a;
}

struct IMat {
    i64 a = 1, b = 0, c = 0, d = 1;
    MoebiusMap moebius() const { return MoebiusMap(double(a), double(b), double(c), double(d)); }
    IMat inverse() const { return {d, -b, -c, a}; }
    i64 trace() const { return a + d; }
    // PSL representative: c > 0, or c == 0 and d > 0
    IMat canonical() const {
        if (c < 0 || (c == 0 && d < 0)) return {-a, -b, -c, -d};
        return *this;
    }
    bool operator==(const IMat& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
    bool operator<(const IMat& o) const {
        return std::tie(a, b, c, d) < std::tie(o.a, o.b, o.c, o.d);
    }
};

inline IMat operator*(const IMat& m, const IMat& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

// completes the bottom row (c,d), gcd 1, to a matrix of SL2(Z)
inline IMat complete_row(i64 c, i64 d) {
    i64 x, y;
    i64 g = egcd(d, c, x, y);  // d x + c y = 1 -> a = x, b = -y
    if (g != 1) throw ContractError("bottom row is not coprime");
    return {x, -y, c, d};
}

inline Kind int_kind(const IMat& m) {
    i64 t = std::llabs(m.trace());
    if (t < 2) return Kind::elliptic;
    if (t > 2) return Kind::hyperbolic;
    if (m.b == 0 && m.c == 0) return Kind::identity;
    return Kind::parabolic;
}

struct Cusp {
    bool infinite = true;
    i64 num = 1, den = 0;  // num/den when finite
    std::string str() const { return infinite ? "oo" : std::to_string(num) + "/" + std::to_string(den); }
};

struct CuspData {
    Cusp representative;
    int width = 1;
    MoebiusMap sigma;
    MoebiusMap generator;
    IMat M;               // SL2(Z) matrix with M(oo) = representative
    std::vector<char> rows;  // rows[C*N+D]: bottom row (C,D) mod N occurs in M^-1 Gamma M
};

struct EllipticData {
    Point point;
    int order = 2;
    MoebiusMap sigma;
    IMat generator;
};

struct GroupData {
    int level = 1;
    int index = 1;
    int genus = 0;
    std::vector<CuspData> cusps;
    std::vector<EllipticData> elliptic;
    double volume = pi / 3;
    std::vector<MoebiusMap> coset_reps;
    std::vector<IMat> coset_int;
    std::vector<int> coset_cusp;  // cusp equivalent to coset_int[j](oo)
    double lambda1 = 3.0 / 16;
    std::optional<double> selberg_c;

    bool contains(const IMat& g) const { return pmod(g.c, level) == 0; }
    double volume_from_signature() const {
        double s = 2 * genus - 2 + double(cusps.size());
        for (auto& e : elliptic) s += 1 - 1.0 / e.order;
        return 2 * pi * s;
    }
    std::size_t elliptic_order_sum() const {
        std::size_t s = 0;
        for (auto& e : elliptic) s += e.order - 1;
        return s;
    }
};

namespace detail {

inline std::vector<i64> divisors(i64 n) {
    std::vector<i64> out;
    for (i64 k = 1; k <= n; ++k)
        if (n % k == 0) out.push_back(k);
    return out;
}

// index of (c:d) in P^1(Z/N); -1 if gcd(c,d,N) != 1
struct P1 {
    int N;
    std::vector<int> idx;
    std::vector<std::pair<int, int>> reps;
    explicit P1(int n) : N(n), idx(std::size_t(n) * n, -1) {
        for (int c = 0; c < N; ++c)
            for (int d = 0; d < N; ++d) {
                if (std::gcd(std::gcd(c, d), N) != 1 || idx[c * N + d] >= 0) continue;
                int k = int(reps.size());
                reps.push_back({c, d});
                for (int u = 1; u <= N; ++u)
                    if (std::gcd(u, N) == 1) idx[(c * u % N) * N + d * u % N] = k;
            }
        if (N == 1) {
            reps = {{0, 0}};
            idx = {0};
        }
    }
    int operator()(i64 c, i64 d) const { return idx[pmod(c, N) * N + pmod(d, N)]; }
};

inline IMat lift_row(i64 c, i64 d, int N) {
    if (N == 1 || pmod(c, N) == 0) {
        // class (0:d) with d a unit is the identity coset
        if (pmod(c, N) == 0) return {1, 0, 0, 1};
    }
    i64 cc = c == 0 ? N : c;
    for (i64 k = 0;; ++k)
        for (i64 s : {k, -k}) {
            i64 dd = d + s * N;
            i64 x, y;
            if (egcd(cc, dd, x, y) == 1) return complete_row(cc, dd);
        }
}

// integer lift of the residue row (C,D) with gcd 1
inline IMat lift_exact(int C, int D, int N) {
    i64 cc = C == 0 ? N : C;
    for (i64 k = 0;; ++k) {
        i64 dd = D + k * N, x, y;
        if (egcd(cc, dd, x, y) == 1) return complete_row(cc, dd);
    }
}

inline std::vector<char> row_table(const IMat& M, int N) {
    std::vector<char> t(std::size_t(N) * N, 0);
    IMat Mi = M.inverse();
    for (int C = 0; C < N; ++C)
        for (int D = 0; D < N; ++D) {
            if (std::gcd(std::gcd(C, D), N) != 1) continue;
            IMat g0 = lift_exact(C, D, N);
            for (int k = 0; k < N; ++k) {
                IMat g = M * IMat{1, k, 0, 1} * g0 * Mi;
                if (pmod(g.c, N) == 0) {
                    t[C * N + D] = 1;
                    break;
                }
            }
        }
    return t;
}

}  // namespace detail

// ---- reduction to the Ford domain of Gamma_0(N) ----

struct Reduced {
    Point z;
    IMat g;  // g z_in = z
};

inline Reduced reduce_gamma0(int N, Point z) {
    IMat acc;
    for (int it = 0; it < tolerances().reduce_max_iter; ++it) {
        i64 k = i64(std::floor(z.x + 0.5));
        if (k != 0) {
            z = Point(z.x - double(k), z.y);
            acc = IMat{1, -k, 0, 1} * acc;
        }
        double best = 1 - 1e-13;
        IMat pick;
        bool found = false;
        for (i64 c = N; double(c) * c * z.y * z.y < best; c += N) {
            double r = std::sqrt(best - double(c) * c * z.y * z.y);
            i64 d0 = i64(std::ceil(-c * z.x - r)), d1 = i64(std::floor(-c * z.x + r));
            for (i64 d = d0; d <= d1; ++d) {
                double re = c * z.x + d;
                double m = re * re + double(c) * c * z.y * z.y;
                if (m >= best || std::gcd(c, d) != 1) continue;
                best = m, pick = complete_row(c, d), found = true;
            }
        }
        if (!found) {
            if (z.x >= 0.5) {
                z = Point(z.x - 1, z.y);
                acc = IMat{1, -1, 0, 1} * acc;
            }
            return {z, acc};
        }
        z = apply(pick.moebius(), z);
        acc = pick * acc;
    }
    throw ConvergenceError("fundamental domain reduction did not terminate", z.y);
}

inline MoebiusMap width_scaling(const IMat& M, int w) {
    double s = std::sqrt(double(w));
    return M.moebius() * MoebiusMap(s, 0, 0, 1 / s);
}

inline GroupData build_gamma0(int N) {
    if (N < 1) throw ContractError("level must be >= 1");
    GroupData G;
    G.level = N;
    detail::P1 P(N);
    int n = int(P.reps.size());
    G.index = n;
    for (auto [c, d] : P.reps) {
        IMat g = detail::lift_row(c, d, N);
        G.coset_int.push_back(g);
        G.coset_reps.push_back(g.moebius());
    }
    // cusps: orbits of right multiplication by T on the cosets
    std::vector<int> orbit(n, -1);
    std::vector<int> orbit_size;
    for (int j = 0; j < n; ++j) {
        if (orbit[j] >= 0) continue;
        int o = int(orbit_size.size()), sz = 0;
        auto [c, d] = P.reps[j];
        i64 cc = c, dd = d;
        for (int k = P(cc, dd); orbit[k] < 0; k = P(cc, dd)) {
            orbit[k] = o, ++sz;
            dd += cc;
        }
        orbit_size.push_back(sz);
    }
    std::vector<std::optional<CuspData>> cusp_of(orbit_size.size());
    auto assign = [&](const IMat& M, Cusp rep) {
        int o = orbit[P(M.c, M.d)];
        if (cusp_of[o]) return;
        CuspData cd;
        cd.representative = rep;
        cd.width = orbit_size[o];
        cd.M = M;
        cd.sigma = width_scaling(M, cd.width);
        cd.generator = (M * IMat{1, cd.width, 0, 1} * M.inverse()).moebius();
        cd.rows = detail::row_table(M, N);
        cusp_of[o] = cd;
    };
    assign(IMat{}, Cusp{});
    for (i64 c : detail::divisors(N)) {
        if (c == N && N > 1) continue;
        for (i64 a = 0; a <= N; ++a) {
            i64 x, y;
            if (egcd(a, c, x, y) != 1) continue;
            // matrix (a b; c d) with a d - b c = 1
            i64 u, v;
            egcd(a, c, u, v);  // a u + c v = 1 -> d = u, b = -v
            IMat M{a, -v, c, u};
            Cusp r{false, a, c};
            assign(M, r);
        }
    }
    for (auto& c : cusp_of) G.cusps.push_back(*c);
    for (auto [c, d] : P.reps) G.coset_cusp.push_back(orbit[P(c, d)]);

    // elliptic points: order 2 from b^2 + 1 = 0 mod N, order 3 from b^2 - b + 1 = 0 mod N
    for (i64 b = 0; b < N; ++b) {
        if (pmod(b * b + 1, N) == 0) {
            IMat g{b, -(b * b + 1) / N, N, -b};
            G.elliptic.push_back({Point(double(b) / N, 1.0 / N), 2, {}, g});
        }
    }
    for (i64 b = 0; b < N; ++b) {
        if (pmod(b * b - b + 1, N) == 0) {
            IMat g{b, -(b * b - b + 1) / N, N, 1 - b};
            G.elliptic.push_back({Point((2.0 * b - 1) / (2.0 * N), std::sqrt(3.0) / (2.0 * N)), 3, {}, g});
        }
    }
    int nu2 = 0, nu3 = 0;
    for (auto& e : G.elliptic) (e.order == 2 ? nu2 : nu3)++;
    // 12 g = 12 + index - 3 nu2 - 4 nu3 - 6 nu_inf
    G.genus = (12 + G.index - 3 * nu2 - 4 * nu3 - 6 * int(G.cusps.size())) / 12;
    G.volume = G.index * pi / 3;
    for (auto& e : G.elliptic) {
        auto r = reduce_gamma0(N, e.point);
        e.point = r.z;
        double s = std::sqrt(e.point.y);
        e.sigma = MoebiusMap(s, e.point.x / s, 0, 1 / s);
        IMat g = r.g * e.generator * r.g.inverse();
        MoebiusMap rot = e.sigma.inverse() * g.moebius() * e.sigma;
        e.generator = rot.b >= 0 ? g : g.inverse();
    }
    return G;
}

inline std::pair<Point, MoebiusMap> reduce_to_fundamental_domain(const GroupData& G, const Point& z) {
    auto r = reduce_gamma0(G.level, z);
    return {r.z, r.g.moebius()};
}

// ---- ball enumeration ----

inline double ball_count_estimate(const GroupData& G, double R) {
    return 2 * pi * (std::cosh(R) - 1) / G.volume;
}

// calls f(g, u) for every g in Gamma_0(N) (PSL) with d(z, g w) < R, u = u(z, g w)
template <class F>
void for_each_in_ball(const GroupData& G, double R, const Point& z, const Point& w, F&& f) {
    const i64 N = G.level;
    double est = ball_count_estimate(G, R) + 100;
    if (est > double(tolerances().ball_capacity))
        throw CapacityError("ball of radius " + std::to_string(R) + " exceeds capacity (~" +
                            std::to_string(i64(est)) + " elements)");
    const double U = u_from_distance(R), y = z.y, v = w.y;
    const double eR = std::exp(R);
    auto sweep = [&](i64 a0, i64 b0, i64 c, i64 d, double wx, double vp) {
        double r2 = 4 * U * y * vp - (y - vp) * (y - vp);
        if (r2 <= 0) return;
        double r = std::sqrt(r2), cx = z.x - wx;
        i64 k0 = i64(std::ceil(cx - r)), k1 = i64(std::floor(cx + r));
        for (i64 k = k0; k <= k1; ++k) {
            double dx = cx - double(k), dy = y - vp;
            double u = (dx * dx + dy * dy) / (4 * y * vp);
            if (u < U) f(IMat{a0 + k * c, b0 + k * d, c, d}, u);
        }
    };
    sweep(1, 0, 0, 1, w.x, v);
    const double cmax = tolerances().ball_c_factor * std::sqrt(eR / (y * v));
    const double lim = v * eR / y;
    for (i64 c = N; double(c) <= cmax; c += N) {
        double rad2 = lim - double(c) * c * v * v;
        if (rad2 <= 0) continue;
        double rad = std::sqrt(rad2), cw = c * w.x;
        i64 d0 = i64(std::ceil(-cw - rad)), d1 = i64(std::floor(-cw + rad));
        for (i64 d = d0; d <= d1; ++d) {
            double re = cw + d;
            double m = re * re + double(c) * c * v * v;
            if (m >= lim) continue;
            i64 x, yy;
            if (egcd(d, c, x, yy) != 1) continue;
            i64 a0 = x, b0 = -yy;  // a0 d - b0 c = 1
            double vp = v / m;
            double wx = double(a0) / c - re / (double(c) * m);
            sweep(a0, b0, c, d, wx, vp);
        }
    }
}

struct KindFilter {
    bool identity = true, elliptic = true, parabolic = true, hyperbolic = true;
    bool accepts(Kind k) const {
        switch (k) {
            case Kind::identity: return identity;
            case Kind::elliptic: return elliptic;
            case Kind::parabolic: return parabolic;
            default: return hyperbolic;
        }
    }
    static KindFilter all() { return {}; }
    static KindFilter hyperbolic_and_identity() { return {true, false, false, true}; }
};

inline std::vector<IMat> ball_int(const GroupData& G, double delta, const Point& z, const Point& w,
                                  KindFilter filter = KindFilter::all()) {
    if (!(delta > 0)) throw ContractError("ball radius must be positive");
    std::vector<IMat> out;
    for_each_in_ball(G, delta, z, w, [&](const IMat& g, double) {
        if (filter.accepts(int_kind(g))) out.push_back(g);
    });
    return out;
}

inline std::vector<MoebiusMap> ball(const GroupData& G, double delta, const Point& z, const Point& w,
                                    KindFilter filter = KindFilter::all()) {
    std::vector<MoebiusMap> out;
    for (auto& g : ball_int(G, delta, z, w, filter)) out.push_back(g.moebius());
    return out;
}

// ---- shortest closed geodesic ----

struct GeodesicResult {
    i64 trace = 0;
    double length = 0;
    IMat certificate;
};

inline double length_from_trace(double t) { return 2 * std::acosh(t / 2); }

inline GeodesicResult shortest_geodesic(const GroupData& G, int trace_limit) {
    if (trace_limit < 3) throw ContractError("trace_limit must be >= 3");
    const i64 N = G.level;
    for (i64 t = 3; t <= trace_limit; ++t) {
        // (a, b; c, t - a) with a (t - a) - b c = 1 and N | c
        for (i64 c = N; c <= N * i64(trace_limit) * trace_limit; c += N)
            for (i64 a = 0; a < c; ++a) {
                i64 r = a * (t - a) - 1;
                if (pmod(r, c) != 0) continue;
                return {t, length_from_trace(double(t)), IMat{a, r / c, c, t - a}};
            }
    }
    throw ContractError("no hyperbolic element with trace <= " + std::to_string(trace_limit));
}

// ---- cusp-frame bookkeeping ----

// bottom rows (C,D) of M^-1 Gamma M, modulo sign, with height y'/(w|Cz'+D|^2) >= Ymin,
// where z' = M^-1 z; f receives the height Im(sigma_p^-1 eta z)
template <class F>
void for_each_cusp_row(const GroupData& G, const CuspData& p, const Point& z, double Ymin, F&& f) {
    const i64 N = G.level;
    Point zp = apply(p.M.inverse().moebius(), z);
    double sh = std::floor(zp.x / p.width) * p.width;
    zp = Point(zp.x - sh, zp.y);
    const double w = p.width, y = zp.y;
    const double L2 = y / (w * Ymin);
    auto occurs = [&](i64 C, i64 D) { return N == 1 || p.rows[pmod(C, N) * N + pmod(D, N)]; };
    // C = 0: the single coset of the stabilizer
    f(y / w);
    for (i64 C = 1; double(C) * C * y * y <= L2; ++C) {
        double r = std::sqrt(L2 - double(C) * C * y * y), cx = C * zp.x;
        i64 d0 = i64(std::ceil(-cx - r)), d1 = i64(std::floor(-cx + r));
        for (i64 D = d0; D <= d1; ++D) {
            if (!occurs(C, D) || std::gcd(C, D) != 1) continue;
            double re = cx + D, m = re * re + double(C) * C * y * y;
            if (m > L2) continue;
            f(y / (w * m));
        }
    }
}

// rigorous bound for sum over rows with height < Ymin of height^s
inline double cusp_tail_bound(const CuspData& p, const Point& z, double Ymin, double s) {
    Point zp = apply(p.M.inverse().moebius(), z);
    double x = zp.x - std::floor(zp.x / p.width) * p.width;
    double y = zp.y, w = p.width;
    double L = std::sqrt(y / (w * Ymin));
    double del = std::hypot(x, y) + 1;
    double T = L - 2 * del;
    if (T <= 0) return std::numeric_limits<double>::infinity();
    double lat = (2 * pi / y) * (std::pow(T, 2 - 2 * s) / (2 * s - 2) + del * std::pow(T, 1 - 2 * s) / (2 * s - 1));
    return 0.5 * std::pow(y / w, s) * lat;
}

inline double cusp_height(const GroupData& G, const CuspData& p, const Point& z) {
    Point zp = apply(p.M.inverse().moebius(), z);
    double best = zp.y / p.width;
    // any height above best needs |Cz'+D|^2 <= 1, i.e. Ymin = y'/w
    for_each_cusp_row(G, p, z, best, [&](double Y) { best = std::max(best, Y); });
    return best;
}

// minimal positive lower-left entry of sigma_p^-1 Gamma sigma_q
inline double c_pq(const GroupData& G, const CuspData& p, const CuspData& q, i64 search_limit = 0) {
    const i64 N = G.level;
    if (search_limit == 0) search_limit = N * N + 1;
    IMat Mq_inv = q.M.inverse();
    for (i64 C = 1; C <= search_limit; ++C)
        for (i64 D = 0; D < N * C + 1; ++D) {
            i64 x, y;
            if (egcd(C, D, x, y) != 1) continue;
            IMat g0 = complete_row(C, D);
            for (i64 k = 0; k < N; ++k) {
                IMat g = p.M * IMat{1, k, 0, 1} * g0 * Mq_inv;
                if (pmod(g.c, N) == 0) return double(C) * std::sqrt(double(p.width) * q.width);
            }
        }
    throw CapacityError("c_pq search exceeded its limit");
}

}  // namespace hypgreen
