#include <catch_amalgamated.hpp>

#include <filesystem>

#include "hypgreen/io.hpp"

using namespace hypgreen;
using Catch::Approx;

namespace {

const GroupData& g11() {
    static GroupData G = build_gamma0(11);
    return G;
}
const GroupData& g2() {
    static GroupData G = build_gamma0(2);
    return G;
}

const BoundInputsBundle& inputs11() {
    static BoundInputsBundle b = standard_bound_inputs(g11(), 0.1);
    return b;
}

const GreenContext& ctx13() {
    static GreenContext ctx(g11(), [] {
        GreenConfig c;
        c.R_heat = 13;
        c.R_s = 12.5;
        return c;
    }());
    return ctx;
}

constexpr double alpha = 0.1;

}  // namespace

TEST_CASE("epsilon tilde") {
    CHECK(epsilon_tilde(0.1) == Approx(0.2221).margin(1e-3));
    double prev = 0;
    for (int k = 0; k <= 49; ++k) {
        double e = 0.01 + k * 0.01;
        double v = epsilon_tilde(e);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(epsilon_tilde(1e-12) < epsilon_tilde(1e-6));
    CHECK(epsilon_tilde(1e-300) < 2e-3);
    CHECK_THROWS_AS(epsilon_tilde(0), ContractError);
    CHECK_THROWS_AS(epsilon_tilde(1), ContractError);
}

TEST_CASE("epsilon validation") {
    auto e = validate_epsilon(g11(), 0.05);
    CHECK(e.validation.passed());
    CHECK(e.ell_X == Approx(2 * std::acosh(1.5)));
    // horoball at 0 has diameter 1/(11h); it meets y > h once h^2 < 1/11
    auto big = validate_epsilon(g11(), 0.3);
    CHECK_FALSE(big.validation.passed());
    CHECK_FALSE(big.validation.cusps_disjoint);
    CHECK_FALSE(validate_epsilon(g11(), 1.5).validation.range);
    // shrinking epsilon never turns a pass into a failure
    bool seen_pass = false;
    for (double eps : {0.6, 0.4, 0.3, 0.2, 0.15, 0.1, 0.05, 0.02, 0.01}) {
        bool p = validate_epsilon(g11(), eps, 32).validation.passed();
        if (seen_pass) CHECK(p);
        seen_pass = seen_pass || p;
    }
    CHECK(seen_pass);
    // on Gamma0(2) condition (3) holds at 0.1 while the cusp conditions need a much smaller epsilon
    auto e2 = validate_epsilon(g2(), 0.1);
    CHECK(e2.validation.condition3());
    CHECK_FALSE(e2.validation.condition1());
    CHECK(validate_epsilon(g2(), 0.005).validation.passed());
}

TEST_CASE("bound B: structure and branches") {
    auto& in = inputs11();
    const double dX = in.heat.delta_X;
    auto B = bound_B(g11(), in.heat, in.consts, in.eps, alpha, dX);
    CHECK(std::isfinite(B.value));
    CHECK(B.value > 0);
    CHECK(sum_terms(B) == B.value);
    for (auto& [k, v] : B.terms) CHECK(v >= 0);
    CHECK(B.term("vol") == Approx(4 * pi / g11().volume));
    CHECK(B.term("cusp_log") == Approx(7 * 2 * std::pow(std::log(0.05), 2)));

    const double l = in.eps.ell_X;
    for (double d : {0.05, 0.5, 3.0, dX / 2}) {
        auto Bd = bound_B(g11(), in.heat, in.consts, in.eps, alpha, d);
        double corr = std::sinh(dX + l) / std::sinh(l) * std::abs(std::log(std::pow(std::tanh(d / 2), 2)));
        CHECK(Bd.value > B.value);
        CHECK(Bd.value - B.value == Approx(corr).epsilon(1e-12));
        CHECK(Bd.term("delta_correction") == corr);
    }
    // beyond delta_X the delta-dependent terms grow with delta
    CHECK(bound_B(g11(), in.heat, in.consts, in.eps, alpha, dX + 1).value > B.value);

    CHECK_THROWS_AS(bound_B(g11(), in.heat, in.consts, in.eps, 0.2, dX), ContractError);
    CHECK_THROWS_AS(bound_B(g11(), in.heat, in.consts, in.eps, 0, dX), ContractError);
    CHECK_THROWS_AS(bound_B(g11(), in.heat, in.consts, in.eps, alpha, 0), ContractError);
}

TEST_CASE("bound B is monotone in its constants") {
    auto& in = inputs11();
    const double dX = in.heat.delta_X;
    double base = bound_B(g11(), in.heat, in.consts, in.eps, alpha, dX).value;
    auto c = in.consts;
    c.C_par *= 1.1;
    CHECK(bound_B(g11(), in.heat, c, in.eps, alpha, dX).value > base);
    auto h = in.heat;
    h.C_HK *= 1.1;
    CHECK(bound_B(g11(), h, in.consts, in.eps, alpha, dX).value > base);
    // the elliptic terms on a group that has them
    auto e2 = validate_epsilon(g2(), 0.005);
    SeriesConstants s2;
    s2.C_ell = 1.466;
    s2.c_ell = 1;
    double b2 = bound_B(g2(), in.heat, s2, e2, alpha, dX).value;
    auto s3 = s2;
    s3.C_ell *= 1.1;
    CHECK(bound_B(g2(), in.heat, s3, e2, alpha, dX).value > b2);
    // one more cusp
    GroupData G = g11();
    G.cusps.push_back(G.cusps[0]);
    CHECK(bound_B(G, in.heat, in.consts, in.eps, alpha, dX).value > base);
}

TEST_CASE("bound C and 2C+B") {
    auto& in = inputs11();
    const double delta = 0.5 * std::min(in.eps.epsilon, in.eps.epsilon_tilde);
    const double dX = 1.3;
    auto C = bound_C(g11(), in.heat, in.consts, in.eps, alpha, delta, dX);
    CHECK(C.partial);
    CHECK(C.symbolic.size() == 1);
    CHECK(sum_terms(C) == C.value);
    for (auto& [k, v] : C.terms) CHECK(v >= 0);
    CHECK(C.term("d_X") == Approx(2 * pi * (dX + 1) * (dX + 1) / ((3.0 / 16) * 4 * pi)));
    auto C0 = bound_C(g11(), in.heat, in.consts, in.eps, alpha, delta, dX, 0.0);
    CHECK_FALSE(C0.partial);
    CHECK(C0.term("selberg") == 0);
    CHECK(C0.value == Approx(C.value).epsilon(1e-15));
    auto C1 = bound_C(g11(), in.heat, in.consts, in.eps, alpha, delta, dX, 0.5);
    CHECK(C1.value - C0.value == Approx(2 * pi * 0.5 / (4 * pi)).epsilon(1e-6));

    // B' is B at eps/2 on the small-delta branch
    auto Bp = bound_B_prime(g11(), in.heat, in.consts, in.eps, alpha, delta);
    CHECK(Bp.term("cusp_log") == Approx(14 * std::pow(std::log(0.025), 2)));
    CHECK(Bp.term("delta_correction") > 0);
    CHECK(C.term("B_prime_part") == Approx(Bp.value / 2 * (2 * (1 - in.consts.C_aux_par / (2 * std::log(0.05))) + 1)));

    // signed log(eps/2) terms are positive for every eps < 1
    for (double eps : {0.01, 0.05, 0.1, 0.3, 0.6, 0.9}) {
        EpsilonConfig e = in.eps;
        e.epsilon = eps;
        e.epsilon_tilde = epsilon_tilde(eps);
        auto c = bound_C(g11(), in.heat, in.consts, e, alpha, 0.5 * std::min(eps, e.epsilon_tilde), dX, 0.0);
        CHECK(c.term("cusp_log") > 0);
        CHECK(c.term("aux") > 0);
        CHECK(c.term("B_prime_part") > 0);
    }

    CHECK_THROWS_AS(bound_C(g11(), in.heat, in.consts, in.eps, alpha, 0.2, dX), ContractError);
    CHECK_THROWS_AS(bound_C(g2(), in.heat, in.consts, validate_epsilon(g2(), 0.005), alpha, 1e-3, dX), ContractError);

    auto B = bound_B(g11(), in.heat, in.consts, in.eps, alpha, in.heat.delta_X);
    auto T = two_C_plus_B(C0, B);
    CHECK(T.value == Approx(2 * C0.value + B.value));
    CHECK_THROWS_AS(two_C_plus_B(B, C0), ContractError);
}

TEST_CASE("reports survive a JSON round trip") {
    auto& in = inputs11();
    auto B = bound_B(g11(), in.heat, in.consts, in.eps, alpha, 2.0);
    auto text = to_json(B).dump();
    auto back = bound_report_from_json(json::parse(text));
    CHECK(back.value == B.value);
    CHECK(sum_terms(back) == back.value);
    CHECK(to_json(back)["terms"] == to_json(B)["terms"]);
    CHECK(to_json(B).dump() == text);
}

TEST_CASE("golden bound B at level 11") {
    auto& in = inputs11();
    auto B = bound_B(g11(), in.heat, in.consts, in.eps, alpha, in.heat.delta_X);
    json j = to_json(B);
    const std::string path = std::string(HYPGREEN_FIXTURE_DIR) + "/bound_B_gamma0_11.json";
    if (!std::filesystem::exists(path)) {
        write_json_file(path, j);
        WARN("golden fixture written to " << path);
    }
    std::vector<std::string> diff;
    json_diff(read_json_file(path), j, 1e-9, "", diff);
    for (auto& d : diff) INFO("differs at " << d);
    CHECK(diff.empty());
}

TEST_CASE("certification of the hyperbolic bound") {
    auto& in = inputs11();
    auto B = bound_B(g11(), in.heat, in.consts, in.eps, alpha, in.heat.delta_X);
    auto rep = certify_hyperbolic(ctx13(), B, in.eps, 12, 7);
    CHECK(rep.samples.size() == 12);
    CHECK(rep.violations() == 0);
    for (auto& s : rep.samples) {
        CHECK(in_Y_eps(g11(), s.z, 0.1));
        CHECK(in_Y_eps(g11(), s.w, 0.1));
        CHECK(s.elements > 0);
    }
    // same seed, same pairs
    auto again = certify_hyperbolic(ctx13(), B, in.eps, 3, 7);
    for (int i = 0; i < 3; ++i) CHECK(again.samples[i].lhs == rep.samples[i].lhs);

    // below delta_X the bound grows by the correction term; the margins move with it
    auto B6 = bound_B(g11(), in.heat, in.consts, in.eps, alpha, 6.0);
    CHECK(B6.value > B.value);
    auto rep6 = certify_hyperbolic(ctx13(), B6, in.eps, 3, 7);
    CHECK(rep6.violations() == 0);
    for (int i = 0; i < 3; ++i) {
        double lhs_change = std::abs(rep6.samples[i].lhs - rep.samples[i].lhs);
        CHECK(lhs_change < B6.value - B.value);
        CHECK(rep6.samples[i].margin > rep.samples[i].margin);
    }
}

TEST_CASE("elliptic lemmas on Gamma0(2)") {
    auto r = elliptic_lemma_check(g2(), 0.1, 50);
    CHECK(r.const14 == Approx(560.1).margin(0.05));
    CHECK(r.const7 == Approx(7 / std::tanh(0.05)));
    CHECK(r.checks > 100);
    CHECK(r.violations7 == 0);
    CHECK(r.violations14 == 0);
    CHECK(r.worst_ratio7 <= 1);
    CHECK_THROWS_AS(elliptic_lemma_check(g11(), 0.1, 5), ContractError);
}
