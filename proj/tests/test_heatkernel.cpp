#include <catch_amalgamated.hpp>

#include "hypgreen/heatkernel.hpp"

using namespace hypgreen;
using Catch::Approx;

TEST_CASE("heat kernel against high-precision oracle values") {
    // mpmath, 30 digits, same substitution
    struct Row { double t, rho, K; };
    for (auto r : {Row{0.5, 0.0, 0.13505600024041982}, Row{0.5, 1.0, 0.075726752643569165},
                   Row{1, 5, 2.9875762657814341e-5}, Row{0.1, 0.3, 0.61012346310808372},
                   Row{10, 2, 0.0002943321842183715}, Row{0.01, 0.05, 7.4491917482604256},
                   Row{40, 15, 4.3386849452183453e-11}}) {
        INFO("t=" << r.t << " rho=" << r.rho);
        CHECK(heat_kernel(r.t, r.rho) == Approx(r.K).epsilon(1e-8));
    }
    CHECK(heat_kernel(0.5, 5) < heat_kernel(0.5, 1));
    CHECK_THROWS_AS(heat_kernel(0, 1), ContractError);
}

TEST_CASE("heat kernel mass") {
    for (double t : {0.25, 1.0}) CHECK(heat_mass(t) == Approx(1).margin(1e-3));
    CHECK(heat_mass(0.25) == Approx(1).margin(1e-7));
}

TEST_CASE("time integral carries the 4 pi factor") {
    for (double rho : {0.5, std::log(2.0), 2.0}) {
        auto ti = heat_time_integral(rho);
        double ref = 2 * std::log(1 / std::tanh(rho / 2));
        CHECK(ti.value == Approx(ref).margin(1e-4));
        CHECK(ti.tail_bound < 1e-7);
    }
    auto ti = heat_time_integral(std::log(2.0));
    CHECK(ti.value == Approx(std::log(9.0)).margin(1e-4));
}

TEST_CASE("closed-form time factor matches direct quadrature") {
    for (double rho : {0.05, 0.3, 1.0, 4.0, 9.0})
        for (double T : {1.0, 60.0}) {
            auto ti = heat_time_integral(rho, T);
            INFO("rho=" << rho << " T=" << T);
            CHECK(truncated_green_kernel(rho, T) == Approx(ti.value).epsilon(1e-8));
        }
    // T -> infinity limit is 2 log coth(rho/2)
    for (double rho : {0.2, 1.5, 6.0})
        CHECK(truncated_green_kernel(rho, 1e6) == Approx(2 * std::log(1 / std::tanh(rho / 2))).epsilon(1e-9));
}

TEST_CASE("calibration") {
    for (double t : {1.0, 2.0}) {
        double a = std::exp(t / 4) * heat_kernel(t, 0), b = std::exp(2 * t / 4) * heat_kernel(2 * t, 0);
        CHECK(b < a);
    }
    auto c = calibrate(0.5, 1.0);
    CHECK(c.c0 > 0);
    CHECK(c.c_inf > 0);
    CHECK(std::isfinite(c.c0));
    CHECK(c.beta < 0.25);
    CHECK(c.beta > 0);
    CHECK(c.delta_X > 4 * 1.0 + 5);
    CHECK(c.delta_X > c.delta0);
    // bounds re-asserted on a finer grid
    for (int i = 1; i <= 40; ++i) {
        double t = 0.5 * i / 40;
        for (double rho = 0; rho < 8; rho += 0.37)
            CHECK(heat_kernel(t, rho) <= c.c0 / (4 * pi * t) * std::exp(-rho * rho / (4 * t)));
    }
    for (double t = 0.5; t < 20; t += 0.7)
        for (double rho = 0; rho < 8; rho += 0.37) CHECK(heat_kernel(t, rho) <= c.c_inf * std::exp(-t / 4));
    // monotonicity of e^{beta t} K on [t0, 20] on the beta grid
    for (double rho = 0; rho <= 1.5; rho += 0.25) {
        double prev = 1e300;
        for (double t = 0.5; t <= 20; t += 0.25) {
            double v = std::exp(c.beta * t) * heat_kernel(t, rho);
            CHECK(v <= prev * (1 + 1e-12));
            prev = v;
        }
    }
    CHECK_THROWS_AS(calibrate(1.5, 1.0), ContractError);
}

TEST_CASE("C_HK constant") {
    auto G = build_gamma0(11);
    auto c = calibrate(0.5, 1.9248);
    GridSpec g;
    g.quad = {6, 6, 1, 1};
    g.eps = 0.1;
    double a = c_hk_constant(c, G, g);
    CHECK(a >= heat_kernel(0.5, 0));
    double b = c_hk_constant(c, G, g.refined());
    CHECK(std::abs(a - b) < 0.02 * b);
}
