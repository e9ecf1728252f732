#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hypgreen/canonical.hpp"
#include "hypgreen/io.hpp"

using namespace hypgreen;

namespace {

struct RunConfig {
    int level = 11;
    double epsilon = 0.1;
    std::optional<double> delta;    // B; default delta_X
    std::optional<double> delta_c;  // B' and C; default min(eps, eps~) / 2
    double alpha = 0.1;
    double t0 = 0.5;
    std::map<std::string, double> tolerances;
    GridSpec hk_grid{{8, 8, 1, 1}, 50, 0};
    GridSpec series_grid{{8, 8, 1, 1}, 50, 0};
    std::optional<double> lambda1_override;
    std::optional<double> selberg_c;
    std::uint64_t seed = 1;
    int samples = 20;
    double radius = 13;  // lattice radius for Green's function evaluations in suites
};

struct UsageError : ContractError {
    using ContractError::ContractError;
};

GridSpec grid_from_json(const json& j, GridSpec g) {
    if (j.contains("nx")) g.quad.nx = j["nx"];
    if (j.contains("nt")) g.quad.nt = j["nt"];
    if (j.contains("height_cap")) g.height_cap = j["height_cap"];
    return g;
}

json grid_to_json(const GridSpec& g) { return {{"nx", g.quad.nx}, {"nt", g.quad.nt}, {"height_cap", g.height_cap}}; }

void load_config(const std::string& path, RunConfig& c) {
    json j = read_json_file(path);
    static const std::set<std::string> known{"level",   "epsilon",     "delta",  "delta_c",          "alpha",
                                             "t0",      "tolerances",  "grids",  "lambda1_override", "selberg_c",
                                             "seed",    "samples",     "radius"};
    for (auto& [k, v] : j.items())
        if (!known.count(k)) throw UsageError("unknown config key " + k);
    if (j.contains("level")) c.level = j["level"];
    if (j.contains("epsilon")) c.epsilon = j["epsilon"];
    if (j.contains("delta")) c.delta = j["delta"].get<double>();
    if (j.contains("delta_c")) c.delta_c = j["delta_c"].get<double>();
    if (j.contains("alpha")) c.alpha = j["alpha"];
    if (j.contains("t0")) c.t0 = j["t0"];
    if (j.contains("tolerances")) c.tolerances = j["tolerances"].get<std::map<std::string, double>>();
    if (j.contains("grids")) {
        auto& g = j["grids"];
        if (g.contains("heat_kernel")) c.hk_grid = grid_from_json(g["heat_kernel"], c.hk_grid);
        if (g.contains("series")) c.series_grid = grid_from_json(g["series"], c.series_grid);
    }
    if (j.contains("lambda1_override")) c.lambda1_override = j["lambda1_override"].get<double>();
    if (j.contains("selberg_c")) c.selberg_c = j["selberg_c"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"];
    if (j.contains("samples")) c.samples = j["samples"];
    if (j.contains("radius")) c.radius = j["radius"];
}

void validate(RunConfig& c) {
    if (c.level < 1) throw UsageError("level must be a positive integer");
    if (!(c.epsilon > 0 && c.epsilon < 1)) throw UsageError("epsilon must lie in (0,1)");
    if (c.delta && !(*c.delta > 0)) throw UsageError("delta must be positive");
    if (c.delta_c && !(*c.delta_c > 0)) throw UsageError("delta_c must be positive");
    if (!(c.alpha > 0 && c.alpha < 0.5)) throw UsageError("alpha must lie in (0, 1/2)");
    if (!(c.t0 > 0)) throw UsageError("t0 must be positive");
    if (c.samples < 1) throw UsageError("samples must be positive");
    if (!(c.radius >= 4 && c.radius <= 20)) throw UsageError("radius must lie in [4, 20]");
    if (c.lambda1_override && !(*c.lambda1_override > 0 && *c.lambda1_override <= 0.25))
        throw UsageError("lambda1_override must lie in (0, 1/4]");
    for (auto& g : {c.hk_grid, c.series_grid})
        if (g.quad.nx < 2 || g.quad.nt < 2 || !(g.height_cap > 1)) throw UsageError("invalid grid spec");
    auto& t = hypgreen::tolerances();
    for (auto& [k, v] : c.tolerances) {
        if (!(v > 0)) throw UsageError("tolerance " + k + " must be positive");
        if (k == "tail") t.tail = v;
        else if (k == "heat_rel") t.heat_rel = v;
        else if (k == "safety") t.safety = v;
        else if (k == "ball_capacity") t.ball_capacity = static_cast<long long>(v);
        else throw UsageError("unknown tolerance " + k);
    }
}

json config_json(const RunConfig& c) {
    json j;
    j["level"] = c.level;
    j["epsilon"] = c.epsilon;
    j["delta"] = c.delta ? json(*c.delta) : json("delta_X");
    j["delta_c"] = c.delta_c ? json(*c.delta_c) : json("min(eps, eps~)/2");
    j["alpha"] = c.alpha;
    j["t0"] = c.t0;
    j["grids"] = {{"heat_kernel", grid_to_json(c.hk_grid)}, {"series", grid_to_json(c.series_grid)}};
    j["lambda1_override"] = c.lambda1_override ? json(*c.lambda1_override) : json(nullptr);
    j["selberg_c"] = c.selberg_c ? json(*c.selberg_c) : json(nullptr);
    j["seed"] = c.seed;
    j["samples"] = c.samples;
    j["radius"] = c.radius;
    return j;
}

GroupData make_group(const RunConfig& c) {
    GroupData G = build_gamma0(c.level);
    if (c.lambda1_override) G.lambda1 = *c.lambda1_override;
    if (c.selberg_c) G.selberg_c = *c.selberg_c;
    return G;
}

GreenConfig green_config(double R) {
    GreenConfig g;
    g.R_heat = R;
    g.R_s = R - 0.5;
    return g;
}

Point parse_point(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw UsageError("point must be given as x,y");
    try {
        std::size_t a, b;
        std::string xs = s.substr(0, comma), ys = s.substr(comma + 1);
        double x = std::stod(xs, &a), y = std::stod(ys, &b);
        if (a != xs.size() || b != ys.size()) throw std::invalid_argument("trailing characters");
        if (!(y > 0)) throw UsageError("point " + s + " is not in the upper half-plane");
        return Point(x, y);
    } catch (const std::logic_error&) {
        throw UsageError("cannot parse point " + s);
    }
}

// ---- output ----

using Rows = std::vector<std::vector<std::string>>;

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string o = "\"";
    for (char ch : s) {
        if (ch == '"') o += '"';
        o += ch;
    }
    return o + "\"";
}

std::string num(double x) {
    std::ostringstream o;
    o.precision(17);
    o << x;
    return o.str();
}

struct Output {
    std::string format = "json";
    std::string path;
    void emit(const json& j, const Rows& rows) const {
        std::ostringstream s;
        if (format == "csv") {
            for (auto& r : rows) {
                for (std::size_t i = 0; i < r.size(); ++i) s << (i ? "," : "") << csv_field(r[i]);
                s << "\r\n";
            }
        } else {
            s << j.dump(2) << '\n';
        }
        if (path.empty()) {
            std::cout << s.str();
        } else {
            std::ofstream f(path, std::ios::binary);
            if (!f) throw UsageError("cannot write " + path);
            f << s.str();
        }
    }
};

Rows bound_rows(const std::vector<BoundReport>& reports) {
    Rows r{{"kind", "term", "value"}};
    for (auto& b : reports) {
        for (auto& [k, v] : b.terms) r.push_back({bound_kind_name(b.kind), k, num(v)});
        r.push_back({bound_kind_name(b.kind), "total", num(b.value)});
    }
    return r;
}

Rows margin_rows(const CertificationReport& rep) {
    Rows r{{"index", "z_x", "z_y", "w_x", "w_y", "lhs", "bound", "margin", "violation"}};
    for (auto& s : rep.samples)
        r.push_back({std::to_string(s.index), num(s.z.x), num(s.z.y), num(s.w.x), num(s.w.y), num(s.lhs), num(rep.bound),
                     num(s.margin), s.violation ? "true" : "false"});
    return r;
}

// ---- commands ----

int cmd_group_info(const RunConfig& c, const Output& out) {
    GroupData G = make_group(c);
    Rows rows{{"level", "index", "genus", "volume", "cusps", "elliptic_points"},
              {std::to_string(G.level), std::to_string(G.index), std::to_string(G.genus), num(G.volume),
               std::to_string(G.cusps.size()), std::to_string(G.elliptic.size())}};
    out.emit(to_json(G), rows);
    return 0;
}

int cmd_green(const RunConfig& c, const Output& out, const std::string& zs, const std::string& ws,
              const std::string& method) {
    Point z = parse_point(zs), w = parse_point(ws);
    GroupData G = make_group(c);
    GreenContext ctx(G, green_config(c.radius));
    std::vector<GreenEvaluation> ev;
    if (method == "heat" || method == "both") ev.push_back(green_heat(ctx, z, w));
    if (method == "s-extrapolation" || method == "both") ev.push_back(green_s_extrapolated(ctx, z, w));
    json j;
    j["schema_version"] = schema_version;
    j["level"] = c.level;
    j["z"] = to_json(z);
    j["w"] = to_json(w);
    json arr = json::array();
    for (auto& e : ev) arr.push_back(to_json(e));
    j["evaluations"] = arr;
    if (ev.size() == 2) {
        double d = std::abs(ev[0].value - ev[1].value);
        j["difference"] = d;
        j["within_bars"] = d <= ev[0].error_estimate + ev[1].error_estimate;
    }
    Rows rows{{"method", "value", "error_estimate", "ball_radius", "window_spread", "extrapolation_spread", "low_confidence"}};
    for (auto& e : ev) {
        auto& t = e.truncation_report;
        rows.push_back({method_name(e.method), num(e.value), num(e.error_estimate), num(t.ball_radius), num(t.window_spread),
                        num(t.extrapolation_spread), t.low_confidence ? "true" : "false"});
    }
    out.emit(j, rows);
    return 0;
}

struct Inputs {
    GroupData G;
    BoundInputsBundle in;
    double delta = 0, delta_c = 0;
};

Inputs bound_inputs(const RunConfig& c, std::optional<double> inject_c0) {
    Inputs r{make_group(c), {}, 0, 0};
    auto v = validate_epsilon(r.G, c.epsilon).validation;
    if (!v.passed()) {
        std::string why;
        for (auto& f : v.failures) why += " " + f;
        throw UsageError("epsilon " + num(c.epsilon) + " fails validation:" + why);
    }
    r.in = standard_bound_inputs(r.G, c.epsilon, c.t0, c.hk_grid, c.series_grid);
    if (inject_c0) r.in.heat.c0 = *inject_c0;
    r.delta = c.delta ? *c.delta : r.in.heat.delta_X;
    r.delta_c = c.delta_c ? *c.delta_c : 0.5 * std::min(r.in.eps.epsilon, r.in.eps.epsilon_tilde);
    return r;
}

std::optional<double> selberg_term(const GroupData& G) {
    if (!G.selberg_c) return std::nullopt;
    return std::abs(*G.selberg_c - 1);
}

bool has_canonical(const GroupData& G) { return G.level == 11; }

int cmd_bounds(const RunConfig& c, const Output& out) {
    Inputs I = bound_inputs(c, std::nullopt);
    auto& in = I.in;
    std::vector<BoundReport> reps;
    json j;
    j["schema_version"] = schema_version;
    j["config"] = config_json(c);
    j["epsilon"] = to_json(in.eps);
    json r;
    auto B = bound_B(I.G, in.heat, in.consts, in.eps, c.alpha, I.delta);
    reps.push_back(B);
    reps.push_back(bound_B_prime(I.G, in.heat, in.consts, in.eps, c.alpha, I.delta_c));
    std::vector<std::string> notes;
    if (I.G.genus >= 1 && has_canonical(I.G)) {
        auto can = level11_canonical();
        double dX = d_x_estimate(can).value;
        auto C = bound_C(I.G, in.heat, in.consts, in.eps, c.alpha, I.delta_c, dX, selberg_term(I.G));
        reps.push_back(C);
        reps.push_back(two_C_plus_B(C, B));
    } else {
        notes.push_back(I.G.genus < 1 ? "genus 0: no canonical Green's function, C omitted"
                                      : "no cusp-form basis for this level: C omitted");
    }
    for (auto& b : reps) r[bound_kind_name(b.kind)] = to_json(b);
    j["reports"] = r;
    j["notes"] = notes;
    out.emit(j, bound_rows(reps));
    return 0;
}

struct SuiteResult {
    json report;
    Rows rows;
    int findings = 0;
};

SuiteResult suite_kernel_identities() {
    SuiteResult s;
    json checks = json::array();
    s.rows = {{"check", "parameter", "value", "expected", "tolerance", "ok"}};
    auto add = [&](const std::string& name, double p, double v, double e, double tol) {
        bool ok = std::abs(v - e) <= tol;
        if (!ok) ++s.findings;
        checks.push_back({{"check", name}, {"parameter", p}, {"value", v}, {"expected", e}, {"tolerance", tol}, {"ok", ok}});
        s.rows.push_back({name, num(p), num(v), num(e), num(tol), ok ? "true" : "false"});
    };
    for (double rho : {0.5, std::log(2.0), 2.0})
        add("time_integral", rho, heat_time_integral(rho).value, 2 * std::log(1 / std::tanh(rho / 2)), 1e-4);
    for (double t : {0.25, 1.0}) add("heat_mass", t, heat_mass(t), 1, 1e-3);
    s.report["checks"] = checks;
    return s;
}

SuiteResult suite_series_oracles() {
    SuiteResult s;
    json checks = json::array();
    s.rows = {{"check", "y", "value", "expected", "tolerance", "ok"}};
    auto add = [&](const std::string& name, double y, double v, double e, double tol) {
        bool ok = std::abs(v - e) <= tol;
        if (!ok) ++s.findings;
        checks.push_back({{"check", name}, {"y", y}, {"value", v}, {"expected", e}, {"tolerance", tol}, {"ok", ok}});
        s.rows.push_back({name, num(y), num(v), num(e), num(tol), ok ? "true" : "false"});
    };
    for (double y : {0.5, 1.0, 2.0}) {
        double sum = 0;
        const long K = 1000000;
        for (long n = K; n >= 1; --n) sum += std::log1p(4 * y * y / (double(n) * n));
        sum = 2 * (sum + 4 * y * y / (K + 0.5));
        add("p_gen_closed", y, p_gen_closed(y), sum, 1e-6);
    }
    add("laplacian_p_gen", 1, laplacian_p_gen(1), -1.99890, 1e-5);
    s.report["checks"] = checks;
    return s;
}

SuiteResult suite_green_cross(const RunConfig& c) {
    SuiteResult s;
    GroupData G = make_group(c);
    GreenContext ctx(G, green_config(c.radius));
    std::mt19937_64 rng(c.seed);
    json pairs = json::array();
    s.rows = {{"index", "z_x", "z_y", "w_x", "w_y", "heat", "s_extrapolation", "difference", "bars", "ok"}};
    for (int i = 0; i < std::min(c.samples, 10); ++i) {
        Point z = sample_uniform(G, rng), w = sample_uniform(G, rng);
        auto h = green_heat(ctx, z, w);
        auto e = green_s_extrapolated(ctx, z, w);
        double d = std::abs(h.value - e.value), bar = h.error_estimate + e.error_estimate;
        bool ok = d <= bar && d <= 1e-2;
        if (!ok) ++s.findings;
        pairs.push_back({{"z", to_json(z)}, {"w", to_json(w)}, {"heat", to_json(h)}, {"s_extrapolation", to_json(e)}, {"ok", ok}});
        s.rows.push_back({std::to_string(i), num(z.x), num(z.y), num(w.x), num(w.y), num(h.value), num(e.value), num(d),
                          num(bar), ok ? "true" : "false"});
    }
    s.report["pairs"] = pairs;
    return s;
}

SuiteResult suite_certify_B(const RunConfig& c, std::optional<double> inject_c0) {
    SuiteResult s;
    Inputs I = bound_inputs(c, inject_c0);
    auto B = bound_B(I.G, I.in.heat, I.in.consts, I.in.eps, c.alpha, I.delta);
    GreenContext ctx(I.G, green_config(c.radius));
    auto rep = certify_hyperbolic(ctx, B, I.in.eps, std::size_t(c.samples), c.seed);
    s.findings = int(rep.violations());
    s.report["bound"] = to_json(B);
    s.report["certification"] = to_json(rep);
    s.rows = margin_rows(rep);
    return s;
}

SuiteResult suite_certify_C(const RunConfig& c) {
    SuiteResult s;
    Inputs I = bound_inputs(c, std::nullopt);
    if (!has_canonical(I.G)) throw UsageError("certify-C needs canonical data (level 11)");
    auto can = level11_canonical();
    double dX = d_x_estimate(can).value;
    auto C = bound_C(I.G, I.in.heat, I.in.consts, I.in.eps, c.alpha, I.delta_c, dX, selberg_term(I.G));
    GreenContext ctx(I.G, green_config(c.radius));
    PhiField phi(ctx, can);
    std::mt19937_64 rng(c.seed);
    json pairs = json::array();
    s.rows = {{"index", "z_x", "z_y", "w_x", "w_y", "difference", "bound", "margin", "violation"}};
    for (int i = 0; i < c.samples; ++i) {
        Point z = sample_Y_eps(I.G, c.epsilon, rng), w = sample_Y_eps(I.G, c.epsilon, rng);
        // g_hyp - g_can = phi(z) + phi(w)
        double d = std::abs(phi(z) + phi(w)), bound = 2 * C.value;
        bool v = d > bound;
        if (v) ++s.findings;
        pairs.push_back({{"z", to_json(z)}, {"w", to_json(w)}, {"difference", d}, {"margin", bound - d}, {"violation", v}});
        s.rows.push_back({std::to_string(i), num(z.x), num(z.y), num(w.x), num(w.y), num(d), num(bound), num(bound - d),
                          v ? "true" : "false"});
    }
    s.report["bound"] = to_json(C);
    s.report["partial"] = C.partial;
    s.report["c_hyp"] = phi.c_hyp();
    s.report["pairs"] = pairs;
    return s;
}

SuiteResult suite_key_identity(const RunConfig& c) {
    SuiteResult s;
    if (c.level != 11) throw UsageError("key-identity needs canonical data (level 11)");
    auto can = level11_canonical();
    std::vector<Bump> bumps{{Point(-0.37, 0.095), 0.15}, {Point(0.5, 0.2), 0.15}, {Point(0.3, 0.25), 0.15}};
    auto r = key_identity_check(can, bumps, {std::min(c.radius + 1, 16.0), 3, 3});
    json terms = json::array();
    s.rows = {{"center_x", "center_y", "sigma", "lhs", "rhs", "relative", "error_bar"}};
    for (auto& t : r.terms) {
        terms.push_back({{"center", to_json(t.bump.center)}, {"sigma", t.bump.sigma}, {"lhs", t.lhs}, {"rhs", t.rhs},
                         {"relative", t.relative}, {"error_bar", t.error_bar}});
        s.rows.push_back({num(t.bump.center.x), num(t.bump.center.y), num(t.bump.sigma), num(t.lhs), num(t.rhs),
                          num(t.relative), num(t.error_bar)});
    }
    s.report["terms"] = terms;
    s.report["max_relative"] = r.max_relative;
    s.report["tolerance"] = 2e-2;
    s.findings = r.max_relative <= 2e-2 ? 0 : 1;
    return s;
}

SuiteResult suite_elliptic_lemmas(const RunConfig& c) {
    SuiteResult s;
    GroupData G = make_group(c);
    auto r = elliptic_lemma_check(G, c.epsilon, std::size_t(c.samples), 6, c.seed);
    s.findings = int(r.violations7 + r.violations14);
    s.report = to_json(r);
    s.rows = {{"lemma", "constant", "worst_ratio", "violations"},
              {"7", num(r.const7), num(r.worst_ratio7), std::to_string(r.violations7)},
              {"14", num(r.const14), num(r.worst_ratio14), std::to_string(r.violations14)}};
    return s;
}

int cmd_verify(const RunConfig& c, const Output& out, const std::string& suite, std::optional<double> inject_c0) {
    SuiteResult s;
    if (suite == "kernel-identities") s = suite_kernel_identities();
    else if (suite == "series-oracles") s = suite_series_oracles();
    else if (suite == "green-cross") s = suite_green_cross(c);
    else if (suite == "certify-B") s = suite_certify_B(c, inject_c0);
    else if (suite == "certify-C") s = suite_certify_C(c);
    else if (suite == "key-identity") s = suite_key_identity(c);
    else if (suite == "elliptic-lemmas") s = suite_elliptic_lemmas(c);
    else throw UsageError("unknown suite " + suite);
    json j;
    j["schema_version"] = schema_version;
    j["suite"] = suite;
    j["config"] = config_json(c);
    j["findings"] = s.findings;
    j["report"] = s.report;
    out.emit(j, s.rows);
    return s.findings > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Green's functions and bounds on Gamma_0(N)\\H"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    RunConfig cfg;
    Output out;
    std::string config_path;
    int threads = 1;
    std::optional<std::uint64_t> seed;
    std::optional<int> level;
    std::optional<double> epsilon, delta, alpha, selberg;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 256));
    app.add_option("--seed", seed, "sampler seed");
    app.add_option("--format", out.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", out.path, "write output to a file");

    auto* gi = app.add_subcommand("group-info", "print the data of Gamma_0(N)");
    gi->add_option("--level", level, "N");

    std::string zs, ws, method = "both";
    auto* gr = app.add_subcommand("green", "evaluate g_hyp(z, w)");
    gr->add_option("--level", level, "N");
    gr->add_option("--z", zs, "x,y")->required();
    gr->add_option("--w", ws, "x,y")->required();
    gr->add_option("--method", method, "heat, s-extrapolation or both")
        ->check(CLI::IsMember({"heat", "s-extrapolation", "both"}));

    auto* bd = app.add_subcommand("bounds", "evaluate B, B', C and 2C+B");
    bd->add_option("--level", level, "N");
    bd->add_option("--epsilon", epsilon, "cusp/elliptic neighbourhood size");
    bd->add_option("--delta", delta, "ball radius for B (default delta_X)");
    bd->add_option("--alpha", alpha, "spectral gap exponent");
    bd->add_option("--selberg-c", selberg, "Selberg constant c_X");

    std::string suite;
    std::optional<double> inject_c0;
    auto* vf = app.add_subcommand("verify", "run a verification suite; exit 1 on findings");
    vf->add_option("--suite", suite, "kernel-identities | series-oracles | green-cross | certify-B | certify-C | "
                                     "key-identity | elliptic-lemmas")
        ->required();
    vf->add_option("--level", level, "N");
    vf->add_option("--epsilon", epsilon, "cusp/elliptic neighbourhood size");
    vf->add_option("--samples", cfg.samples, "sample count");
    vf->add_option("--inject-c0", inject_c0)->group("");  // fault injection for tests

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (!config_path.empty()) load_config(config_path, cfg);
        if (level) cfg.level = *level;
        if (epsilon) cfg.epsilon = *epsilon;
        if (delta) cfg.delta = *delta;
        if (alpha) cfg.alpha = *alpha;
        if (selberg) cfg.selberg_c = *selberg;
        if (seed) cfg.seed = *seed;
        validate(cfg);
        default_threads() = threads;
        if (*gi) return cmd_group_info(cfg, out);
        if (*gr) return cmd_green(cfg, out, zs, ws, method);
        if (*bd) return cmd_bounds(cfg, out);
        if (*vf) return cmd_verify(cfg, out, suite, inject_c0);
    } catch (const hypgreen::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const json::exception& e) {
        std::cerr << "error: bad configuration: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
