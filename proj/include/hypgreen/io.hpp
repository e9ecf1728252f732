#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bounds.hpp"

namespace hypgreen {

using json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

inline json to_json(const Point& p) { return json::array({p.x, p.y}); }
inline json to_json(const MoebiusMap& m) { return json::array({m.a, m.b, m.c, m.d}); }
inline json to_json(const IMat& m) { return json::array({m.a, m.b, m.c, m.d}); }

inline json to_json(const GroupData& G) {
    json j;
    j["schema_version"] = schema_version;
    j["level"] = G.level;
    j["index"] = G.index;
    j["genus"] = G.genus;
    j["volume"] = G.volume;
    j["volume_from_signature"] = G.volume_from_signature();
    j["lambda1"] = G.lambda1;
    j["selberg_c"] = G.selberg_c ? json(*G.selberg_c) : json(nullptr);
    json cusps = json::array();
    for (auto& p : G.cusps) {
        json c;
        c["representative"] = p.representative.str();
        c["width"] = p.width;
        c["scaling"] = to_json(p.sigma);
        c["generator"] = to_json(p.generator);
        cusps.push_back(c);
    }
    j["cusps"] = cusps;
    json ell = json::array();
    for (auto& e : G.elliptic) {
        json c;
        c["point"] = to_json(e.point);
        c["order"] = e.order;
        c["generator"] = to_json(e.generator);
        ell.push_back(c);
    }
    j["elliptic"] = ell;
    json reps = json::array();
    for (auto& m : G.coset_int) reps.push_back(to_json(m));
    j["coset_reps"] = reps;
    return j;
}

inline json to_json(const HeatCalibration& c) {
    json j;
    j["t0"] = c.t0;
    j["c0"] = c.c0;
    j["c_inf"] = c.c_inf;
    j["beta"] = c.beta;
    j["delta0"] = c.delta0;
    j["delta_X"] = c.delta_X;
    j["C_HK"] = c.C_HK;
    return j;
}

inline json to_json(const SeriesConstants& c) {
    json j;
    j["C_par"] = c.C_par;
    j["C_ell"] = c.C_ell;
    j["c_ell"] = c.c_ell;
    j["C_aux_par"] = c.C_aux_par;
    j["converged"] = c.converged;
    j["grid"] = {{"points", c.grid_points}, {"height_cap", c.height_cap}, {"safety", c.safety}};
    j["coarse"] = {{"C_par", c.coarse.C_par}, {"C_ell", c.coarse.C_ell}, {"C_aux_par", c.coarse.C_aux_par}};
    j["fine"] = {{"C_par", c.fine.C_par}, {"C_ell", c.fine.C_ell}, {"C_aux_par", c.fine.C_aux_par}};
    return j;
}

inline json to_json(const EpsilonConfig& e) {
    const auto& v = e.validation;
    json j;
    j["epsilon"] = e.epsilon;
    j["epsilon_tilde"] = e.epsilon_tilde;
    j["epsilon_tilde_convention"] = "|log(eps/2)|";
    j["ell_X"] = e.ell_X;
    j["validation"] = {{"range", v.range},
                       {"condition1", v.condition1()},
                       {"condition2", v.condition2()},
                       {"condition3", v.condition3()},
                       {"passed", v.passed()},
                       {"failures", v.failures}};
    return j;
}

inline json to_json(const BoundReport& r) {
    json j;
    j["schema_version"] = schema_version;
    j["kind"] = bound_kind_name(r.kind);
    j["value"] = r.value;
    json t;
    for (auto& [k, x] : r.terms) t[k] = x;
    j["terms"] = t;
    j["partial"] = r.partial;
    j["symbolic"] = r.symbolic;
    j["conventions"] = r.conventions;
    const auto& in = r.inputs;
    json s;
    s["epsilon"] = in.epsilon;
    s["alpha"] = in.alpha;
    s["delta"] = in.delta;
    s["heat"] = to_json(in.heat);
    s["series"] = to_json(in.consts);
    s["ell_X"] = in.ell_X;
    s["volume"] = in.volume;
    s["lambda1"] = in.lambda1;
    s["cusps"] = in.cusps;
    s["elliptic_orders"] = in.orders;
    s["genus"] = in.genus;
    s["d_X"] = in.d_X ? json(*in.d_X) : json(nullptr);
    s["c_X_minus_1"] = in.c_X_minus_1 ? json(*in.c_X_minus_1) : json("parametric");
    j["inputs"] = s;
    return j;
}

inline BoundReport bound_report_from_json(const json& j) {
    BoundReport r;
    std::string k = j.at("kind");
    if (k == "B") r.kind = BoundKind::B;
    else if (k == "B_prime") r.kind = BoundKind::B_prime;
    else if (k == "C") r.kind = BoundKind::C;
    else if (k == "two_C_plus_B") r.kind = BoundKind::two_C_plus_B;
    else throw ContractError("unknown bound kind " + k);
    for (auto& [name, x] : j.at("terms").items()) r.terms.emplace_back(name, x.get<double>());
    r.value = j.at("value");
    r.partial = j.at("partial");
    r.symbolic = j.at("symbolic").get<std::vector<std::string>>();
    r.conventions = j.at("conventions").get<std::vector<std::string>>();
    return r;
}

inline json to_json(const GreenEvaluation& g) {
    json j;
    j["value"] = g.value;
    j["method"] = method_name(g.method);
    j["error_estimate"] = g.error_estimate;
    const auto& t = g.truncation_report;
    j["truncation_report"] = {{"ball_radius", t.ball_radius},
                              {"time_cutoff", t.time_cutoff},
                              {"spectral_allowance", t.spectral_allowance},
                              {"window_spread", t.window_spread},
                              {"extrapolation_spread", t.extrapolation_spread},
                              {"low_confidence", t.low_confidence},
                              {"elements", t.elements}};
    if (!g.s_values.empty()) j["s_values"] = g.s_values;
    return j;
}

inline json to_json(const CertificationReport& r) {
    json j;
    j["bound"] = r.bound;
    j["epsilon"] = r.epsilon;
    j["delta"] = r.delta;
    j["seed"] = r.seed;
    j["violations"] = r.violations();
    j["min_margin"] = r.min_margin();
    json s = json::array();
    for (auto& x : r.samples)
        s.push_back({{"index", x.index},
                     {"z", to_json(x.z)},
                     {"w", to_json(x.w)},
                     {"g_hyp", x.g_hyp},
                     {"subtracted", x.subtracted},
                     {"elements", x.elements},
                     {"lhs", x.lhs},
                     {"error_estimate", x.error_estimate},
                     {"margin", x.margin},
                     {"violation", x.violation}});
    j["samples"] = s;
    return j;
}

inline json to_json(const EllipticLemmaReport& r) {
    return {{"epsilon", r.epsilon},         {"const7", r.const7},
            {"const14", r.const14},         {"checks", r.checks},
            {"violations7", r.violations7}, {"violations14", r.violations14},
            {"worst_ratio7", r.worst_ratio7}, {"worst_ratio14", r.worst_ratio14}};
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot open " + path);
    return json::parse(in);
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ContractError("cannot write " + path);
    out << j.dump(2) << '\n';
}

// fields that differ in type or length, or in value by more than tol
inline void json_diff(const json& a, const json& b, double tol, const std::string& at, std::vector<std::string>& out) {
    if (a.is_number() && b.is_number()) {
        double x = a.get<double>(), y = b.get<double>();
        if (std::abs(x - y) > tol * std::max(1.0, std::abs(x))) out.push_back(at);
        return;
    }
    if (a.type() != b.type()) {
        out.push_back(at + " (type)");
        return;
    }
    if (a.is_object()) {
        for (auto& [k, v] : a.items()) {
            if (!b.contains(k)) out.push_back(at + "/" + k + " (missing)");
            else json_diff(v, b.at(k), tol, at + "/" + k, out);
        }
        for (auto& [k, v] : b.items())
            if (!a.contains(k)) out.push_back(at + "/" + k + " (extra)");
    } else if (a.is_array()) {
        if (a.size() != b.size()) {
            out.push_back(at + " (length)");
            return;
        }
        for (std::size_t i = 0; i < a.size(); ++i) json_diff(a[i], b[i], tol, at + "/" + std::to_string(i), out);
    } else if (a != b) {
        out.push_back(at);
    }
}

}  // namespace hypgreen
