#include <catch_amalgamated.hpp>

#include <random>

#include "hypgreen/geometry.hpp"

using namespace hypgreen;
using Catch::Approx;

namespace {

Point random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(-3, 3), uy(-2, 1.5);
    return Point(ux(rng), std::exp(uy(rng)));
}

MoebiusMap random_int_map(std::mt19937_64& rng, int bound = 10) {
    std::uniform_int_distribution<int> ue(-bound, bound);
    for (;;) {
        int a = ue(rng), b = ue(rng), c = ue(rng);
        // solve for d when possible: a d - b c = 1
        if (a == 0) continue;
        if ((1 + b * c) % a != 0) continue;
        int d = (1 + b * c) / a;
        if (std::abs(d) > bound) continue;
        return MoebiusMap(a, b, c, d);
    }
}

}  // namespace

TEST_CASE("points reject the boundary") {
    CHECK_THROWS_AS(Point(0, 0), ContractError);
    CHECK_THROWS_AS(Point(1, -2), ContractError);
    CHECK_NOTHROW(Point(0, 1e-300));
}

TEST_CASE("moebius normalization and equality") {
    MoebiusMap m(-2, -4, 0, -0.5);
    CHECK(m.a * m.d - m.b * m.c == Approx(1).margin(1e-12));
    CHECK(m.a > 0);
    CHECK(equal_psl(MoebiusMap(1, 2, 3, 7), MoebiusMap(-1, -2, -3, -7)));
    CHECK_FALSE(equal_psl(MoebiusMap(1, 2, 3, 7), MoebiusMap(1, 3, 2, 7)));
    MoebiusMap z(0, 1, -1, 0);
    CHECK(z.b == 1);
}

TEST_CASE("apply examples") {
    Point p = apply(MoebiusMap{}, Point(0, 1));
    CHECK(p.x == 0);
    CHECK(p.y == 1);
    p = apply(MoebiusMap(1, 1, 0, 1), Point(0, 1));
    CHECK(p.x == Approx(1));
    CHECK(p.y == Approx(1));
    p = apply(MoebiusMap(0, -1, 1, 0), Point(0, 1));
    CHECK(p.x == Approx(0).margin(1e-15));
    CHECK(p.y == Approx(1));
    // against complex arithmetic
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
        auto m = random_int_map(rng);
        auto z = random_point(rng);
        cplx q = (m.a * z.z() + m.b) / (m.c * z.z() + m.d);
        auto w = apply(m, z);
        CHECK(w.x == Approx(q.real()).margin(1e-12));
        CHECK(w.y == Approx(q.imag()).epsilon(1e-12));
    }
}

TEST_CASE("point pair invariant and distance") {
    CHECK(point_pair_u(Point(0, 1), Point(0, 2)) == Approx(0.125));
    CHECK(point_pair_u(Point(0.3, 2), Point(0.3, 2)) == 0);
    CHECK(distance(Point(0, 1), Point(0, 2)) == Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(distance(Point(1, 1), Point(1, 1)) == 0);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
        auto z = random_point(rng), w = random_point(rng);
        double u = point_pair_u(z, w);
        CHECK(std::cosh(distance(z, w)) - (1 + 2 * u) == Approx(0).margin(1e-10 * (1 + u)));
        CHECK(point_pair_u(w, z) == Approx(u));
        auto g = random_int_map(rng);
        CHECK(distance(apply(g, z), apply(g, w)) == Approx(distance(z, w)).margin(1e-10));
        CHECK(free_green(apply(g, z), apply(g, w)) == Approx(free_green(z, w)).margin(1e-9));
    }
}

TEST_CASE("free Green's function") {
    CHECK(free_green(Point(0, 1), Point(0, 2)) == Approx(std::log(9.0)).epsilon(1e-14));
    CHECK_THROWS_AS(free_green(Point(0, 1), Point(0, 1)), SingularityError);
    double prev = 1e300;
    for (double Y = 2; Y < 1e7; Y *= 3) {
        double g = free_green(Point(0, 1), Point(0, Y));
        CHECK(g < prev);
        CHECK(g > 0);
        prev = g;
    }
    CHECK(prev < 1e-5);
    double d = std::log(2.0);
    CHECK(2 * std::log(1 / std::tanh(d / 2)) == Approx(std::log(9.0)).epsilon(1e-13));
    CHECK(free_green_u(u_from_distance(d)) == Approx(2 * std::log(3.0)).epsilon(1e-13));
}

TEST_CASE("free Green's function at general s") {
    CHECK(free_green_s_u(0.125, 1) == Approx(std::log(9.0)).epsilon(1e-12));
    // s = 2 closed form 2 Q_1(1 + 2u) = (1 + 2u) log(1 + 1/u) - 2
    for (double u : {1e-6, 0.01, 0.3, 1.0, 1.99, 2.0, 5.0, 100.0}) {
        double ref = (1 + 2 * u) * std::log1p(1 / u) - 2;
        CHECK(free_green_s_u(u, 2) == Approx(ref).epsilon(1e-9).margin(1e-14));
    }
    // brute-force series oracle at u = 1 (x = -1): alternating series summed with repeated averaging
    {
        const double s = 2;
        std::vector<double> partial;
        double term = 1, sum = 1;
        for (int n = 0; n < 4000; ++n) {
            partial.push_back(sum);
            term *= (s + n) * (s + n) / ((2 * s + n) * (n + 1)) * -1.0;
            sum += term;
        }
        for (int pass = 0; pass < 30; ++pass)
            for (std::size_t i = 0; i + 1 < partial.size(); ++i) partial[i] = 0.5 * (partial[i] + partial[i + 1]);
        double series = std::exp(2 * std::lgamma(2.0) - std::lgamma(4.0)) * partial[100];
        CHECK(free_green_s_u(1.0, 2) == Approx(series).margin(1e-8));
    }
    // leading asymptotic
    for (double s : {1.25, 1.5, 2.0}) {
        double u = 1e7;
        double lead = std::exp(2 * std::lgamma(s) - std::lgamma(2 * s));
        CHECK(free_green_s_u(u, s) * std::pow(u, s) == Approx(lead).epsilon(1e-6));
    }
    // s = 1 against free_green
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        auto z = random_point(rng), w = random_point(rng);
        CHECK(free_green_s(z, w, 1.0) == Approx(free_green(z, w)).epsilon(1e-9));
    }
    // continuity across the switch between representations and in s
    for (double s : {1.0625, 1.3, 2.5}) {
        CHECK(free_green_s_u(2 - 1e-12, s) == Approx(free_green_s_u(2, s)).epsilon(1e-9));
        CHECK(free_green_s_u(0.7, s + 1e-7) == Approx(free_green_s_u(0.7, s)).epsilon(1e-6));
    }
    CHECK_THROWS_AS(free_green_s_u(1, 0.4), ContractError);
}

TEST_CASE("classification") {
    auto c = classify(MoebiusMap(1, 1, 0, 1));
    CHECK(c.kind == Kind::parabolic);
    c = classify(MoebiusMap(2, 1, 1, 1));
    CHECK(c.kind == Kind::hyperbolic);
    CHECK(c.length == Approx(1.924847).epsilon(1e-6));
    CHECK(c.length == Approx(2 * std::acosh(1.5)));
    c = classify(MoebiusMap(0, -1, 1, 0));
    CHECK(c.kind == Kind::elliptic);
    CHECK(c.order_hint == 2);
    c = classify(MoebiusMap(1, -1, 1, 0));
    CHECK(c.kind == Kind::elliptic);
    CHECK(c.order_hint == 3);
    CHECK(classify(MoebiusMap{}).kind == Kind::identity);
    CHECK(classify(MoebiusMap(-1, 0, 0, -1)).kind == Kind::identity);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 50; ++i) {
        auto m = random_int_map(rng, 6), g = random_int_map(rng, 6);
        auto a = classify(m), b = classify(g * m * g.inverse());
        CHECK(a.kind == b.kind);
        CHECK(b.length == Approx(a.length).margin(1e-9));
        CHECK(a.order_hint == b.order_hint);
    }
}

TEST_CASE("smooth step") {
    CHECK(smooth_step(-1) == 0);
    CHECK(smooth_step(2) == 1);
    CHECK(smooth_step(0.5) == Approx(0.5));
    CHECK(smooth_step(0.3) + smooth_step(0.7) == Approx(1));
}
