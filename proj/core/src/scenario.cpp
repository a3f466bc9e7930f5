#include "supercal/scenario.hpp"

#include "supercal/builtins.hpp"
#include "supercal/calculus.hpp"
#include "supercal/errors.hpp"
#include "supercal/poly_parse.hpp"
#include "supercal/positivity.hpp"
#include "supercal/serialize.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace supercal {

namespace {

using Json = nlohmann::ordered_json;

// Carries the exit class through the run loop; code uses the RunOutcome scheme.
struct ScenarioError {
    int code;
    std::string message;
};

[[noreturn]] void bad_scenario(const std::string& msg) { throw ScenarioError{2, msg}; }

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string utc_timestamp() {
    std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<double> as_point(const Json& j, int n, const std::string& what) {
    if (!j.is_array() || int(j.size()) != n)
        bad_scenario(what + " must be an array of " + std::to_string(n) + " numbers");
    std::vector<double> x;
    for (const auto& v : j) {
        if (!v.is_number()) bad_scenario(what + " must contain numbers only");
        x.push_back(v.get<double>());
    }
    return x;
}

std::vector<double> as_numbers(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) bad_scenario(what + " must be a nonempty array");
    std::vector<double> x;
    for (const auto& v : j) {
        if (!v.is_number()) bad_scenario(what + " must contain numbers only");
        x.push_back(v.get<double>());
    }
    return x;
}

// Declared objects plus run-wide settings, shared by all task handlers.
struct CurrentEntry {
    std::optional<SmoothCurrent> smooth;
    std::optional<SubmanifoldCurrent> sub;
    std::optional<TropicalCurrent> trop;
    bool strip_clipped = false; // builtin strip current pairs through the band clip
    std::function<double(std::span<const double>)> probe;

    int n() const {
        if (smooth) return smooth->n();
        if (sub) return sub->n();
        return trop->n();
    }

    CurrentHandle handle(const QuadratureSpec& quad, int tropical_resolution = 64) const {
        if (smooth) {
            if (strip_clipped) return strip_growth_handle(quad);
            return smooth_handle(*smooth, quad);
        }
        if (sub) return submanifold_handle(*sub);
        return tropical_handle(*trop, tropical_resolution);
    }
};

struct Context {
    int n = 0;
    std::optional<std::uint64_t> base_seed;
    std::optional<std::uint64_t> seed_override;
    int jobs = 1;
    std::string scenario_hash;
    std::map<std::string, ScalarField> fields;
    std::map<std::string, FieldForm> forms;
    std::map<std::string, Weight> weights;
    std::map<std::string, CurrentEntry> currents;

    const ScalarField& field(const std::string& name) const {
        auto it = fields.find(name);
        if (it == fields.end()) bad_scenario("unknown field '" + name + "'");
        return it->second;
    }
    const FieldForm& form(const std::string& name) const {
        auto it = forms.find(name);
        if (it == forms.end()) bad_scenario("unknown form '" + name + "'");
        return it->second;
    }
    const Weight& weight(const std::string& name) const {
        auto it = weights.find(name);
        if (it == weights.end()) bad_scenario("unknown weight '" + name + "'");
        return it->second;
    }
    const CurrentEntry& current(const std::string& name) const {
        auto it = currents.find(name);
        if (it == currents.end()) bad_scenario("unknown current '" + name + "'");
        return it->second;
    }
};

// Per-task view: resolved seed and quadrature plus the shared context.
struct TaskCtx {
    Context* ctx = nullptr;
    std::optional<std::uint64_t> seed;
    Json quad_decl; // raw task["quad"], possibly null

    std::uint64_t require_seed() const {
        if (ctx->seed_override) return *ctx->seed_override;
        if (seed) return *seed;
        bad_scenario("stochastic task needs a seed (task or scenario level)");
    }

    std::uint64_t seed_or(std::uint64_t fallback) const {
        if (ctx->seed_override) return *ctx->seed_override;
        return seed ? *seed : fallback;
    }
};

QuadratureSpec resolve_quad(const TaskCtx& t, Json& resolved) {
    const Json& j = t.quad_decl;
    if (j.is_null()) {
        MonteCarloSpec mc;
        mc.seed = t.require_seed();
        resolved = Json{{"method", "monte_carlo"}, {"samples", mc.samples}, {"seed", mc.seed}};
        return mc;
    }
    if (!j.is_object() || j.size() != 1)
        bad_scenario("quad must be {\"mc\": {...}} or {\"grid\": {...}}");
    if (j.contains("mc")) {
        const Json& a = j["mc"];
        MonteCarloSpec mc;
        if (a.contains("samples")) mc.samples = a["samples"].get<std::int64_t>();
        mc.seed = a.contains("seed") ? a["seed"].get<std::uint64_t>() : t.require_seed();
        if (t.ctx->seed_override) mc.seed = *t.ctx->seed_override;
        if (mc.samples < 1) bad_scenario("quad.mc.samples must be positive");
        resolved = Json{{"method", "monte_carlo"}, {"samples", mc.samples}, {"seed", mc.seed}};
        return mc;
    }
    if (j.contains("grid")) {
        const Json& a = j["grid"];
        TensorGridSpec g;
        if (a.contains("points_per_axis")) g.points_per_axis = a["points_per_axis"].get<int>();
        if (a.contains("gauss")) g.gauss = a["gauss"].get<bool>();
        if (g.points_per_axis < 2) bad_scenario("quad.grid.points_per_axis must be at least 2");
        resolved = Json{{"method", "tensor_grid"},
                        {"points_per_axis", g.points_per_axis},
                        {"gauss", g.gauss}};
        return g;
    }
    bad_scenario("quad kind must be mc or grid");
}

Json measure_json(const MeasureEstimate& e) {
    return Json{{"value", e.value},
                {"stderr", e.error},
                {"n_samples", e.evaluations},
                {"method", e.method}};
}

Json exact_json(const ExactIntegral& e) {
    return Json{{"value", e.value}, {"divergent", e.divergent}};
}

Region parse_region(const Json& j, const TaskCtx& t) {
    const int n = t.ctx->n;
    if (!j.is_object() || j.size() != 1)
        bad_scenario("region must be one of ball/box/shell/sublevel");
    if (j.contains("ball")) {
        const Json& a = j["ball"];
        return Region::ball(as_point(a.at("center"), n, "ball.center"),
                            a.at("radius").get<double>());
    }
    if (j.contains("box")) {
        const Json& a = j["box"];
        return Region::box(as_point(a.at("lo"), n, "box.lo"), as_point(a.at("hi"), n, "box.hi"));
    }
    if (j.contains("shell")) {
        const Json& a = j["shell"];
        return Region::shell(as_point(a.at("center"), n, "shell.center"),
                             a.at("inner").get<double>(), a.at("outer").get<double>());
    }
    if (j.contains("sublevel")) {
        const Json& a = j["sublevel"];
        return Region::sublevel(t.ctx->field(a.at("phi").get<std::string>()),
                                a.at("level").get<double>(),
                                as_point(a.at("lo"), n, "sublevel.lo"),
                                as_point(a.at("hi"), n, "sublevel.hi"));
    }
    bad_scenario("region kind must be ball, box, shell or sublevel");
}

std::vector<double> parse_grid(const Json& j, const std::string& what) {
    if (j.is_array()) return as_numbers(j, what);
    if (j.is_object() && j.contains("geometric")) {
        const Json& a = j["geometric"];
        double r_max = a.at("r_max").get<double>();
        double ratio = a.contains("ratio") ? a["ratio"].get<double>() : 0.5;
        int points = a.contains("points") ? a["points"].get<int>() : 8;
        std::vector<double> g = geometric_grid(r_max, ratio, points);
        if (a.contains("increasing") && a["increasing"].get<bool>())
            std::reverse(g.begin(), g.end());
        return g;
    }
    bad_scenario(what + " must be an array or {\"geometric\": {...}}");
}

TestProduct parse_test_product(const Json& args, const TaskCtx& t) {
    const int n = t.ctx->n;
    TestProduct psi(n);
    if (args.contains("factors")) {
        const Json& fs = args["factors"];
        if (!fs.is_array()) bad_scenario("factors must be an array");
        for (const Json& f : fs) {
            if (f.is_string()) {
                psi.times(t.ctx->form(f.get<std::string>()));
            } else if (f.is_object() && f.size() == 1) {
                if (f.contains("beta_power")) {
                    psi.times(to_field_form(beta_power<double>(n, f["beta_power"].get<int>())));
                } else if (f.contains("ddsharp_of")) {
                    psi.times(dd_sharp(t.ctx->field(f["ddsharp_of"].get<std::string>())));
                } else if (f.contains("alpha_of")) {
                    psi.times(t.ctx->weight(f["alpha_of"].get<std::string>()).alpha());
                } else if (f.contains("omega_of")) {
                    psi.times(t.ctx->weight(f["omega_of"].get<std::string>()).omega());
                } else if (f.contains("scalar")) {
                    psi.times(scalar_form(t.ctx->field(f["scalar"].get<std::string>())));
                } else if (f.contains("form")) {
                    std::vector<std::string> lines;
                    for (const auto& l : f["form"]) lines.push_back(l.get<std::string>());
                    psi.times(to_field_form(parse_poly_form(n, lines)));
                } else {
                    bad_scenario("unknown test factor kind");
                }
            } else {
                bad_scenario("test factor must be a form name or a one-key object");
            }
        }
    }
    if (args.contains("weight_field"))
        psi.weighted(t.ctx->field(args["weight_field"].get<std::string>()));
    return psi;
}

std::vector<std::string> string_list(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) bad_scenario(what + " must be a nonempty array");
    std::vector<std::string> out;
    for (const auto& v : j) {
        if (!v.is_string()) bad_scenario(what + " must contain names");
        out.push_back(v.get<std::string>());
    }
    return out;
}

// Object declarations, built in file order so later objects may reference earlier.
void build_object(Context& ctx, const std::string& name, const Json& decl) {
    const int n = ctx.n;
    if (!decl.is_object() || decl.size() != 1)
        bad_scenario("object '" + name + "' must have exactly one declaration key");
    if (decl.contains("poly")) {
        ctx.fields.emplace(name,
                           ScalarField::from_poly(n, parse_poly(n, decl["poly"].get<std::string>())));
        return;
    }
    if (decl.contains("phi_m")) {
        ctx.fields.emplace(name, phi_m_field(n, decl["phi_m"].at("m").get<int>()));
        return;
    }
    if (decl.contains("squared_distance")) {
        std::vector<double> c = as_point(decl["squared_distance"].at("center"), n,
                                         "squared_distance.center");
        ctx.fields.emplace(name, squared_distance(n, c));
        return;
    }
    if (decl.contains("maxaffine")) {
        const Json& a = decl["maxaffine"];
        const Json& rows = a.at("a");
        const Json& offs = a.at("b");
        if (!rows.is_array() || rows.empty() || rows.size() != offs.size())
            bad_scenario("maxaffine '" + name + "' needs matching a rows and b entries");
        Eigen::MatrixXd mat(rows.size(), n);
        Eigen::VectorXd b(offs.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::vector<double> row = as_point(rows[i], n, "maxaffine row");
            for (int j = 0; j < n; ++j) mat(Eigen::Index(i), j) = row[std::size_t(j)];
            b[Eigen::Index(i)] = offs[i].get<double>();
        }
        ctx.fields.emplace(name, ScalarField::max_affine(n, std::move(mat), std::move(b)));
        return;
    }
    if (decl.contains("mollified")) {
        const Json& a = decl["mollified"];
        double eps = a.at("eps").get<double>();
        int order = a.contains("order") ? a["order"].get<int>() : 16;
        ctx.fields.emplace(name,
                           ctx.field(a.at("base").get<std::string>()).mollified(eps, order));
        return;
    }
    if (decl.contains("form")) {
        std::vector<std::string> lines;
        for (const auto& l : decl["form"]) lines.push_back(l.get<std::string>());
        ctx.forms.emplace(name, to_field_form(parse_poly_form(n, lines)));
        return;
    }
    if (decl.contains("weight")) {
        const Json& a = decl["weight"];
        if (a.contains("squared_distance")) {
            ctx.weights.emplace(name, Weight::squared_distance_weight(
                                          n, as_point(a["squared_distance"].at("center"), n,
                                                      "weight center")));
        } else if (a.contains("phi")) {
            Weight w(ctx.field(a["phi"].get<std::string>()));
            if (a.contains("box")) {
                w.set_box(as_point(a["box"].at("lo"), n, "weight box.lo"),
                          as_point(a["box"].at("hi"), n, "weight box.hi"));
            }
            ctx.weights.emplace(name, std::move(w));
        } else {
            bad_scenario("weight '" + name + "' needs squared_distance or phi");
        }
        return;
    }
    if (decl.contains("current")) {
        const Json& a = decl["current"];
        if (!a.is_object() || a.size() != 1)
            bad_scenario("current '" + name + "' must have exactly one representation key");
        CurrentEntry e;
        if (a.contains("smooth")) {
            const Json& s = a["smooth"];
            if (s.contains("form")) {
                std::vector<std::string> lines;
                for (const auto& l : s["form"]) lines.push_back(l.get<std::string>());
                e.smooth = SmoothCurrent(to_field_form(parse_poly_form(n, lines)));
            } else if (s.contains("ddsharp_of")) {
                e.smooth = SmoothCurrent(dd_sharp(ctx.field(s["ddsharp_of"].get<std::string>())));
            } else if (s.contains("beta_power")) {
                e.smooth = beta_power_current(n, s["beta_power"].get<int>());
            } else {
                bad_scenario("smooth current '" + name + "' needs form, ddsharp_of or beta_power");
            }
        } else if (a.contains("submanifold")) {
            const Json& s = a["submanifold"];
            std::string mesh = s.at("mesh").get<std::string>();
            int resolution = s.contains("resolution") ? s["resolution"].get<int>() : 16;
            if (mesh == "plane") {
                int dim = s.contains("dim") ? s["dim"].get<int>() : n - 1;
                double extent = s.contains("half_extent") ? s["half_extent"].get<double>() : 1.0;
                e.sub = coordinate_plane_current(n, dim, extent, resolution);
            } else if (mesh == "sphere") {
                double radius = s.contains("radius") ? s["radius"].get<double>() : 1.0;
                e.sub = sphere_current(radius, resolution);
            } else if (mesh == "catenoid") {
                double v_max = s.contains("v_max") ? s["v_max"].get<double>() : 0.5;
                int v_res = s.contains("v_resolution") ? s["v_resolution"].get<int>()
                                                       : std::max(2, resolution / 2);
                e.sub = catenoid_current(v_max, resolution, v_res);
            } else if (mesh == "line") {
                double half = s.contains("half_length") ? s["half_length"].get<double>() : 1.0;
                e.sub = line_current(n, half, resolution);
            } else {
                bad_scenario("unknown mesh '" + mesh + "'");
            }
        } else if (a.contains("tropical")) {
            e.trop = tropical_ddsharp(ctx.field(a["tropical"].get<std::string>()));
        } else if (a.contains("builtin")) {
            std::string b;
            Json params;
            if (a["builtin"].is_string()) {
                b = a["builtin"].get<std::string>();
            } else {
                b = a["builtin"].at("name").get<std::string>();
                params = a["builtin"];
            }
            if (b == "paper_strip_counterexample") {
                e.smooth = strip_growth_current();
                e.strip_clipped = true;
                e.probe = strip_growth_probe();
            } else if (b == "paper_sin_singularity") {
                e.smooth = sin_singularity_current();
            } else if (b == "beta_power") {
                e.smooth = beta_power_current(n, params.at("k").get<int>());
            } else if (b == "phi_m_hessian") {
                e.smooth = phi_m_hessian_current(n, params.at("m").get<int>());
            } else {
                bad_scenario("unknown builtin current '" + b + "'");
            }
        } else {
            bad_scenario("current '" + name + "' kind must be smooth, submanifold, tropical or builtin");
        }
        if (e.n() != n) bad_scenario("current '" + name + "' dimension mismatch");
        ctx.currents.emplace(name, std::move(e));
        return;
    }
    bad_scenario("object '" + name + "' has an unknown declaration key");
}

QPoly random_poly(int n, int max_degree, SplitMix64& rng) {
    QPoly p(n);
    std::vector<int> exps(std::size_t(n), 0);
    std::function<void(int, int)> walk = [&](int var, int remaining) {
        if (var == n) {
            MonoKey key = 0;
            for (int v = 0; v < n; ++v) key = mono_with_exp(key, v, exps[std::size_t(v)]);
            long c = long(rng.next_u64() % 7) - 3;
            if (c != 0) p.add_term(key, Rational(c));
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            exps[std::size_t(var)] = e;
            walk(var + 1, remaining - e);
        }
        exps[std::size_t(var)] = 0;
    };
    walk(0, max_degree);
    return p;
}

// ---- task handlers ----

Json task_check_eq1(const Json& args, TaskCtx& t) {
    int n = args.contains("n") ? args["n"].get<int>() : t.ctx->n;
    if (n < 1 || n > 4) bad_scenario("check_eq1 supports n in 1..4");
    int count = args.contains("count") ? args["count"].get<int>() : 100;
    int max_degree = args.contains("max_degree") ? args["max_degree"].get<int>() : 3;
    SplitMix64 rng(t.require_seed());
    bool all = true;
    Json first_failure;
    int checked = 0;
    for (int i = 0; i < count; ++i) {
        QPoly u = random_poly(n, max_degree, rng);
        for (int k = 1; k <= n; ++k) {
            HessianIdentity id = hessian_wedge_identity(u, n, k);
            ++checked;
            if (!id.matches && all) {
                all = false;
                first_failure = Json{{"sample", i}, {"k", k}, {"u", poly_to_string(u)}};
            }
        }
    }
    Json r{{"n", n}, {"count", count}, {"identities_checked", checked}, {"all_exact", all}};
    if (!all) r["first_failure"] = first_failure;
    return r;
}

Json task_hessian_fk(const Json& args, TaskCtx& t) {
    const ScalarField& u = t.ctx->field(args.at("u").get<std::string>());
    int k = args.at("k").get<int>();
    ScalarField fk = hessian_Fk(u, k);
    Json values = Json::array();
    if (args.contains("points")) {
        for (const auto& pj : args["points"]) {
            std::vector<double> x = as_point(pj, t.ctx->n, "point");
            values.push_back(fk.eval(x));
        }
    }
    Json r{{"k", k}, {"values", values}};
    if (auto p = fk.as_poly()) {
        QPoly q(t.ctx->n);
        for (const auto& [key, c] : p->terms()) q.add_term(key, Rational(c));
        r["polynomial"] = poly_to_string(q);
    }
    return r;
}

Json task_assert_positivity(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    if (!e.smooth) bad_scenario("assert_positivity needs a smooth current");
    std::string target = args.contains("target") ? args["target"].get<std::string>() : "form";
    Region region = parse_region(args.at("region"), t);
    int samples = args.contains("samples") ? args["samples"].get<int>() : 64;
    SmoothCurrent probe = target == "ddsharp" ? e.smooth->ddsharp() : *e.smooth;
    if (target != "form" && target != "ddsharp")
        bad_scenario("assert_positivity target must be form or ddsharp");
    spot_check_weak_positivity(probe, region, samples, t.require_seed());
    return Json{{"target", target}, {"samples", samples}, {"ok", true}};
}

Json verdict_json(const PositivityVerdict& v) {
    const char* kind = v.kind == VerdictKind::CertifiedTrue    ? "certified_true"
                       : v.kind == VerdictKind::CertifiedFalse ? "certified_false"
                                                               : "plausibly_true";
    Json r{{"kind", kind}, {"margin", v.margin}, {"trials", v.trials}};
    if (!v.witness.empty()) r["witness"] = v.witness;
    return r;
}

Json task_positivity_at(const Json& args, TaskCtx& t) {
    std::vector<std::string> lines;
    for (const auto& l : args.at("form")) lines.push_back(l.get<std::string>());
    NumForm a = parse_num_form(t.ctx->n, lines);
    if (args.contains("m")) return verdict_json(m_positive(a, args["m"].get<int>()));
    std::int64_t samples = args.contains("samples") ? args["samples"].get<std::int64_t>() : 2000;
    return verdict_json(weakly_positive(a, 1e-12, samples, t.seed_or(11)));
}

Json task_m_convex(const Json& args, TaskCtx& t) {
    const ScalarField& u = t.ctx->field(args.at("u").get<std::string>());
    int m = args.at("m").get<int>();
    Region region = parse_region(args.at("region"), t);
    std::int64_t samples = args.contains("samples") ? args["samples"].get<std::int64_t>() : 500;
    ConvexityVerdict v = m_convex(u, region, m, samples, t.require_seed());
    bool declare = args.contains("declare") && args["declare"].get<bool>();
    if (declare && v.kind == VerdictKind::CertifiedFalse) {
        std::string at;
        for (double x : v.witness_point) at += (at.empty() ? "" : ", ") + double_repr(x);
        throw HypothesisError("declared " + std::to_string(m) + "-convexity fails at (" + at + ")");
    }
    const char* kind = v.kind == VerdictKind::CertifiedTrue    ? "certified_true"
                       : v.kind == VerdictKind::CertifiedFalse ? "certified_false"
                                                               : "plausibly_true";
    Json r{{"kind", kind}, {"margin", v.margin}, {"trials", v.trials}};
    if (!v.witness_point.empty()) r["witness_point"] = v.witness_point;
    return r;
}

Json task_alpha_vanishing(const Json& args, TaskCtx& t) {
    const int n = t.ctx->n;
    const ScalarField& phi = t.ctx->field(args.at("phi").get<std::string>());
    int count = args.contains("count") ? args["count"].get<int>() : 200;
    FieldForm alpha = alpha_form(phi);
    FieldForm power = alpha;
    for (int i = 1; i < n; ++i) power = wedge(power, alpha);
    SplitMix64 rng(t.require_seed());
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        std::vector<double> x(std::size_t(n), 0.0);
        double r2 = 0.0;
        for (auto& xi : x) {
            xi = rng.next_in(-2.0, 2.0);
            r2 += xi * xi;
        }
        if (r2 < 1e-4) {
            --i;
            continue;
        }
        worst = std::max(worst, std::abs(density(evaluate(power, x))));
    }
    return Json{{"count", count}, {"max_abs_density", worst}};
}

Json task_pair(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    Region region = parse_region(args.at("region"), t);
    TestProduct psi = parse_test_product(args, t);
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    int tropical_res = args.contains("resolution") ? args["resolution"].get<int>() : 64;
    CurrentHandle h = e.handle(quad, tropical_res);
    MeasureEstimate est = h.pair(psi, region);
    Json r{{"estimate", measure_json(est)}, {"quadrature", quad_resolved}};
    if (h.pair_exact) {
        if (auto ex = h.pair_exact(psi, region)) r["exact"] = exact_json(*ex);
    }
    return r;
}

Json task_mass(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    if (!e.smooth) bad_scenario("mass needs a smooth current");
    Region region = parse_region(args.at("region"), t);
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    bool of_d = args.contains("of_d") && args["of_d"].get<bool>();
    SmoothCurrent target = of_d ? e.smooth->d() : *e.smooth;
    MeasureEstimate est = target.mass(region, quad);
    return Json{{"estimate", measure_json(est)}, {"of_d", of_d}, {"quadrature", quad_resolved}};
}

Json task_superhessian(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    if (!e.smooth) bad_scenario("superhessian needs a smooth current");
    int m = args.at("m").get<int>();
    std::vector<ScalarField> us;
    for (const std::string& name : string_list(args.at("u_list"), "u_list"))
        us.push_back(t.ctx->field(name));
    TestProduct test = parse_test_product(args, t);
    Region region = parse_region(args.at("region"), t);
    std::vector<double> eps = args.contains("eps_schedule")
                                  ? as_numbers(args["eps_schedule"], "eps_schedule")
                                  : default_eps_schedule();
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    int order = args.contains("mollify_order") ? args["mollify_order"].get<int>() : 12;
    SuperhessianReport rep = superhessian_product(*e.smooth, m, us, test, region, eps, quad, order);
    Json values = Json::array();
    for (const auto& v : rep.values) values.push_back(measure_json(v));
    return Json{{"eps", rep.eps},
                {"values", values},
                {"extrapolated", rep.extrapolated},
                {"error_hint", rep.error_hint},
                {"cauchy", rep.cauchy},
                {"quadrature", quad_resolved}};
}

Json task_minimality(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    if (!e.sub) bad_scenario("minimality needs a submanifold current");
    int p = args.at("p").get<int>();
    std::vector<ScalarField> battery;
    for (const std::string& name : string_list(args.at("battery"), "battery"))
        battery.push_back(t.ctx->field(name));
    double res = minimality_residual(*e.sub, p, battery);
    return Json{{"p", p}, {"battery_size", battery.size()}, {"residual", res}};
}

Json task_tropical_complex(const Json& args, TaskCtx& t) {
    TropicalCurrent c = tropical_ddsharp(t.ctx->field(args.at("f").get<std::string>()));
    Json points = Json::array();
    for (const auto& pm : c.point_masses())
        points.push_back(Json{{"x", pm.x}, {"mass", pm.mass}});
    Json facets = Json::array();
    for (const auto& f : c.facets()) {
        facets.push_back(Json{{"pieces", Json::array({f.piece_i, f.piece_j})},
                              {"g", Json::array({f.g[0], f.g[1]})},
                              {"point", Json::array({f.point[0], f.point[1]})},
                              {"dir", Json::array({f.dir[0], f.dir[1]})},
                              {"t_lo", f.t_lo},
                              {"t_hi", f.t_hi},
                              {"weight", Json::array({f.w(0, 0), f.w(0, 1), f.w(1, 0), f.w(1, 1)})}});
    }
    return Json{{"point_masses", points}, {"facets", facets}};
}

Json lelong_json(const LelongReport& rep) {
    return Json{{"r_grid", rep.r_grid},
                {"nu", rep.nu},
                {"nu_error", rep.nu_error},
                {"ball_mass", rep.ball_mass},
                {"normalizer", rep.normalizer},
                {"monotone_ok", rep.monotone_ok},
                {"limit_estimate", rep.limit_estimate},
                {"exact", rep.exact},
                {"diverges", rep.diverges},
                {"loglog_slope", rep.loglog_slope}};
}

Json task_lelong(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    const Weight& w = t.ctx->weight(args.at("weight").get<std::string>());
    std::vector<double> grid = parse_grid(args.at("r_grid"), "r_grid");
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    LelongReport rep = lelong_number(e.handle(quad), w, grid);
    Json r = lelong_json(rep);
    r["quadrature"] = quad_resolved;
    return r;
}

Json task_classical_lelong(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    std::vector<double> a = as_point(args.at("center"), t.ctx->n, "center");
    std::vector<double> grid = parse_grid(args.at("r_grid"), "r_grid");
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    LelongReport rep = classical_lelong_number(e.handle(quad), a, grid);
    Json r = lelong_json(rep);
    r["quadrature"] = quad_resolved;
    return r;
}

Json task_m_lelong(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    std::vector<double> a = as_point(args.at("center"), t.ctx->n, "center");
    int m = args.at("m").get<int>();
    std::vector<double> grid = parse_grid(args.at("r_grid"), "r_grid");
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    LelongReport rep = m_lelong_number(e.handle(quad), a, m, grid);
    Json r = lelong_json(rep);
    r["m"] = m;
    r["quadrature"] = quad_resolved;
    return r;
}

Json task_jensen(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    if (!e.smooth) bad_scenario("jensen needs a smooth current");
    const Weight& w = t.ctx->weight(args.at("weight").get<std::string>());
    double r1 = args.at("r1").get<double>();
    double r2 = args.at("r2").get<double>();
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    JensenRecord rec = jensen_terms(*e.smooth, w, r1, r2, quad);
    return Json{{"r1", rec.r1},
                {"r2", rec.r2},
                {"nu_r1", rec.nu_r1},
                {"nu_r2", rec.nu_r2},
                {"shell", rec.shell},
                {"dd_linear", rec.dd_linear},
                {"dd_tail", rec.dd_tail},
                {"residual", rec.residual},
                {"relative_residual", rec.relative_residual},
                {"quadrature_error", rec.quadrature_error},
                {"closed", rec.closed},
                {"quadrature", quad_resolved}};
}

Json task_concave_bound(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    if (!e.smooth) bad_scenario("concave_bound needs a smooth current");
    std::vector<double> a = as_point(args.at("center"), t.ctx->n, "center");
    double r0 = args.at("r0").get<double>();
    std::vector<double> grid = parse_grid(args.at("r_grid"), "r_grid");
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    ConcaveBoundRecord rec = concave_lower_bound(*e.smooth, a, r0, grid, quad);
    return Json{{"r0", rec.r0},
                {"nu_dd_r0", rec.nu_dd_r0},
                {"c0", rec.c0},
                {"r_grid", rec.r_grid},
                {"lhs", rec.lhs},
                {"rhs", rec.rhs},
                {"margin", rec.margin},
                {"tolerance", rec.tolerance},
                {"holds", rec.holds},
                {"quadrature", quad_resolved}};
}

Json task_integrability(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    if (!e.smooth) bad_scenario("integrability needs a smooth current");
    const Weight& w = t.ctx->weight(args.at("weight").get<std::string>());
    std::vector<double> grid = parse_grid(args.at("r_grid"), "r_grid");
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    IntegrabilityDiagnostic d = t5_integrability_diagnostic(*e.smooth, w, grid, quad);
    return Json{{"r_grid", d.r_grid},
                {"nu_dd", d.nu_dd},
                {"pieces", d.pieces},
                {"integral_estimate", d.integral_estimate},
                {"piece_slope", d.piece_slope},
                {"integrable", d.integrable},
                {"lambda", d.lambda},
                {"lambda_monotone", d.lambda_monotone},
                {"quadrature", quad_resolved}};
}

Json task_semicontinuity(const Json& args, TaskCtx& t) {
    const Weight& w = t.ctx->weight(args.at("weight").get<std::string>());
    double r_min = args.at("r_min").get<double>();
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    std::vector<CurrentHandle> members;
    for (const std::string& name : string_list(args.at("members"), "members"))
        members.push_back(t.ctx->current(name).handle(quad));
    CurrentHandle limit = t.ctx->current(args.at("limit").get<std::string>()).handle(quad);
    SemicontinuityRecord rec = semicontinuity_check(members, limit, w, r_min);
    return Json{{"nu_members", rec.nu_members},
                {"nu_limit", rec.nu_limit},
                {"tolerance", rec.tolerance},
                {"margin", rec.margin},
                {"holds", rec.holds},
                {"quadrature", quad_resolved}};
}

Json task_boundary_functional(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    if (!e.smooth) bad_scenario("boundary_functional needs a smooth current");
    const Weight& w = t.ctx->weight(args.at("weight").get<std::string>());
    std::vector<double> grid = parse_grid(args.at("r_grid"), "r_grid");
    int resolution = args.contains("resolution") ? args["resolution"].get<int>() : 24;
    BoundaryFunctionalReport rep = boundary_functional(*e.smooth, w, grid, resolution);
    return Json{{"r_grid", rep.r_grid}, {"values", rep.values}, {"monotone_ok", rep.monotone_ok}};
}

Json degree_json(const DegreeReport& rep) {
    return Json{{"r_grid", rep.r_grid},
                {"partial", rep.partial},
                {"stderr", rep.stderr_vals},
                {"converged", rep.converged},
                {"limit_estimate", rep.limit_estimate},
                {"nondecreasing", rep.nondecreasing},
                {"exact", rep.exact}};
}

Json task_degree(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    std::vector<double> grid = parse_grid(args.at("r_grid"), "r_grid");
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    int tropical_res = args.contains("resolution") ? args["resolution"].get<int>() : 64;
    bool cutoff = args.contains("cutoff") && args["cutoff"].get<bool>();
    CurrentHandle h = e.handle(quad, tropical_res);
    DegreeReport rep = cutoff ? degree_cutoff(h, grid) : degree(h, grid);
    Json r = degree_json(rep);
    r["cutoff"] = cutoff;
    r["quadrature"] = quad_resolved;
    return r;
}

Json task_weighted_degree(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    const ScalarField& w = t.ctx->field(args.at("weight_field").get<std::string>());
    std::vector<double> grid = parse_grid(args.at("r_grid"), "r_grid");
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    DegreeReport rep = weighted_degree(e.handle(quad), w, grid);
    Json r = degree_json(rep);
    r["quadrature"] = quad_resolved;
    return r;
}

Json task_sigma_growth(const Json& args, TaskCtx& t) {
    LelongClassFunction u(t.ctx->field(args.at("u").get<std::string>()),
                          args.at("slope").get<double>(), args.at("offset").get<double>());
    std::vector<double> radii = as_numbers(args.at("radii"), "radii");
    if (args.contains("certify_radius"))
        u.certify(args["certify_radius"].get<double>(), 200, t.require_seed());
    const ScalarField& w = t.ctx->field(args.at("weight_field").get<std::string>());
    int samples = args.contains("samples_per_sphere") ? args["samples_per_sphere"].get<int>() : 256;
    SigmaGrowthReport rep = sigma_growth(u, w, radii, samples, t.require_seed());
    return Json{{"radii", rep.radii},
                {"running_max", rep.running_max},
                {"value", rep.value},
                {"certified", u.certified()},
                {"certified_radius", u.certified_radius()}};
}

Json task_comparison_local(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    const Weight& phi = t.ctx->weight(args.at("phi").get<std::string>());
    const Weight& psi = t.ctx->weight(args.at("psi").get<std::string>());
    double ratio = args.at("ratio").get<double>();
    std::vector<double> grid = parse_grid(args.at("r_grid"), "r_grid");
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    ComparisonLocalReport rep = verify_comparison_local(e.handle(quad), phi, psi, ratio, grid);
    return Json{{"ratio", rep.ratio},
                {"bidim", rep.bidim},
                {"nu_phi", rep.nu_phi},
                {"nu_psi", rep.nu_psi},
                {"bound_stated", rep.bound_stated},
                {"bound_sqrt", rep.bound_sqrt},
                {"stated_holds", rep.stated_holds},
                {"sqrt_holds", rep.sqrt_holds},
                {"tolerance", rep.tolerance},
                {"quadrature", quad_resolved}};
}

Json task_comparison_infinity(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    std::vector<double> slopes = as_numbers(args.at("l_list"), "l_list");
    auto build = [&](const Json& names_j, const char* what) {
        std::vector<LelongClassFunction> out;
        const Json& arr = names_j;
        if (!arr.is_array()) bad_scenario(std::string(what) + " must be an array");
        for (const Json& item : arr) {
            const Json& spec = item;
            ScalarField f = t.ctx->field(spec.at("field").get<std::string>());
            out.emplace_back(f, spec.at("slope").get<double>(), spec.at("offset").get<double>());
        }
        return out;
    };
    std::vector<LelongClassFunction> us = build(args.at("u_list"), "u_list");
    std::vector<LelongClassFunction> vs = build(args.at("v_list"), "v_list");
    double R = args.at("R").get<double>();
    double eps = args.contains("mollify_eps") ? args["mollify_eps"].get<double>() : 0.1;
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    ComparisonInfinityReport rep = verify_comparison_infinity(e.handle(quad), us, vs, slopes, R, eps);
    return Json{{"lhs", rep.lhs},
                {"lhs_error", rep.lhs_error},
                {"rhs_base", rep.rhs_base},
                {"rhs_error", rep.rhs_error},
                {"ratio_product", rep.ratio_product},
                {"rhs", rep.rhs},
                {"holds", rep.holds},
                {"tolerance", rep.tolerance},
                {"quadrature", quad_resolved}};
}

Json task_growth_link(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    if (!e.smooth) bad_scenario("growth_link needs a smooth current");
    std::vector<double> grid = parse_grid(args.at("r_grid"), "r_grid");
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    GrowthLinkReport rep = growth_link_check(*e.smooth, grid, quad);
    return Json{{"r_grid", rep.r_grid},
                {"lhs", rep.lhs},
                {"rhs", rep.rhs},
                {"c", rep.c},
                {"bounded", rep.bounded},
                {"tolerance", rep.tolerance},
                {"quadrature", quad_resolved}};
}

Json task_strip(const Json& args, TaskCtx& t) {
    const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
    int k = args.at("k").get<int>();
    double delta = args.at("delta").get<double>();
    std::vector<double> grid = parse_grid(args.at("r_grid"), "r_grid");
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    std::function<double(std::span<const double>)> probe;
    bool use_probe = args.contains("check_support") && args["check_support"].get<bool>();
    if (use_probe) {
        if (e.probe) probe = e.probe;
        else if (e.smooth) probe = density_probe(*e.smooth);
        else bad_scenario("strip support checks need a smooth current or builtin probe");
    }
    int support_samples = args.contains("support_samples") ? args["support_samples"].get<int>() : 256;
    StripReport rep = strip_experiment(e.handle(quad), k, delta, grid, probe, support_samples,
                                       t.seed_or(31));
    return Json{{"r_grid", rep.r_grid},
                {"nu", rep.nu},
                {"nu_error", rep.nu_error},
                {"bounded", rep.bounded},
                {"loglog_slope", rep.loglog_slope},
                {"support_checked", rep.support_checked},
                {"support_ok", rep.support_ok},
                {"support_leak", rep.support_leak},
                {"quadrature", quad_resolved}};
}

Json task_degree_semicontinuity(const Json& args, TaskCtx& t) {
    double R = args.at("R").get<double>();
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    DegreeSemicontinuityRecord rec;
    if (args.contains("members")) {
        std::vector<CurrentHandle> members;
        for (const std::string& name : string_list(args["members"], "members"))
            members.push_back(t.ctx->current(name).handle(quad));
        CurrentHandle limit = t.ctx->current(args.at("limit").get<std::string>()).handle(quad);
        rec = degree_semicontinuity_check(members, limit, R);
    } else {
        const CurrentEntry& e = t.ctx->current(args.at("current").get<std::string>());
        std::vector<ScalarField> ws;
        for (const std::string& name : string_list(args.at("weights"), "weights"))
            ws.push_back(t.ctx->field(name));
        const ScalarField& lim = t.ctx->field(args.at("limit_weight").get<std::string>());
        rec = degree_semicontinuity_check(e.handle(quad), ws, lim, R);
    }
    return Json{{"member_degrees", rec.member_degrees},
                {"limit_degree", rec.limit_degree},
                {"tolerance", rec.tolerance},
                {"margin", rec.margin},
                {"holds", rec.holds},
                {"quadrature", quad_resolved}};
}

Json task_integrate(const Json& args, TaskCtx& t) {
    const FieldForm& a = t.ctx->form(args.at("form").get<std::string>());
    Region region = parse_region(args.at("region"), t);
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    MeasureEstimate est = integrate_form(a, region, quad);
    return Json{{"estimate", measure_json(est)}, {"quadrature", quad_resolved}};
}

Json task_stokes(const Json& args, TaskCtx& t) {
    const FieldForm& a = t.ctx->form(args.at("form").get<std::string>());
    Region region = parse_region(args.at("region"), t);
    int resolution = args.contains("boundary_resolution") ? args["boundary_resolution"].get<int>()
                                                          : 24;
    Json quad_resolved;
    QuadratureSpec quad = resolve_quad(t, quad_resolved);
    StokesCheck c = stokes_residual(a, region, resolution, quad);
    return Json{{"volume_integral", c.volume_integral},
                {"boundary_integral", c.boundary_integral},
                {"residual", c.residual},
                {"quadrature", quad_resolved}};
}

Json task_sphere_mean(const Json& args, TaskCtx& t) {
    const ScalarField& f = t.ctx->field(args.at("field").get<std::string>());
    std::vector<double> center = as_point(args.at("center"), t.ctx->n, "center");
    double radius = args.at("radius").get<double>();
    int resolution = args.contains("resolution") ? args["resolution"].get<int>() : 24;
    double v = sphere_mean(f, center, radius, resolution, t.seed_or(7));
    return Json{{"value", v}, {"radius", radius}, {"resolution", resolution}};
}

Json task_builtin(const Json& args, TaskCtx&) {
    std::string name = args.at("name").get<std::string>();
    instantiate_builtin(name);
    return Json{{"name", name}, {"instantiated", true}};
}

using Handler = Json (*)(const Json&, TaskCtx&);

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> h = {
        {"check_eq1", task_check_eq1},
        {"hessian_fk", task_hessian_fk},
        {"assert_positivity", task_assert_positivity},
        {"positivity_at", task_positivity_at},
        {"m_convex", task_m_convex},
        {"alpha_vanishing", task_alpha_vanishing},
        {"pair", task_pair},
        {"mass", task_mass},
        {"superhessian", task_superhessian},
        {"minimality", task_minimality},
        {"tropical_complex", task_tropical_complex},
        {"lelong", task_lelong},
        {"classical_lelong", task_classical_lelong},
        {"m_lelong", task_m_lelong},
        {"jensen", task_jensen},
        {"concave_bound", task_concave_bound},
        {"integrability", task_integrability},
        {"semicontinuity", task_semicontinuity},
        {"boundary_functional", task_boundary_functional},
        {"degree", task_degree},
        {"weighted_degree", task_weighted_degree},
        {"sigma_growth", task_sigma_growth},
        {"comparison_local", task_comparison_local},
        {"comparison_infinity", task_comparison_infinity},
        {"growth_link", task_growth_link},
        {"strip", task_strip},
        {"degree_semicontinuity", task_degree_semicontinuity},
        {"integrate", task_integrate},
        {"stokes", task_stokes},
        {"sphere_mean", task_sphere_mean},
        {"builtin", task_builtin},
    };
    return h;
}

// ---- assertions over the result record ----

double json_number(const Json& result, const std::string& field) {
    const Json* v;
    if (!field.empty() && field.front() == '/')
        v = &result.at(Json::json_pointer(field));
    else
        v = &result.at(field);
    if (!v->is_number()) bad_scenario("assert field '" + field + "' is not numeric");
    return v->get<double>();
}

bool json_bool(const Json& result, const std::string& field) {
    const Json* v;
    if (!field.empty() && field.front() == '/')
        v = &result.at(Json::json_pointer(field));
    else
        v = &result.at(field);
    if (!v->is_boolean()) bad_scenario("assert field '" + field + "' is not boolean");
    return v->get<bool>();
}

// Evaluates the task's assert block against the result; returns per-check records.
Json run_assertions(const Json& spec, const Json& result, bool& ok) {
    Json checks = Json::array();
    auto as_list = [](const Json& j) { return j.is_array() ? j : Json::array({j}); };
    auto record = [&](const std::string& kind, const std::string& field, bool pass, Json detail) {
        Json c{{"kind", kind}, {"field", field}, {"pass", pass}};
        if (!detail.is_null()) c["detail"] = detail;
        checks.push_back(c);
        if (!pass) ok = false;
    };
    if (spec.contains("true"))
        for (const auto& f : spec["true"]) {
            std::string name = f.get<std::string>();
            record("true", name, json_bool(result, name), nullptr);
        }
    if (spec.contains("false"))
        for (const auto& f : spec["false"]) {
            std::string name = f.get<std::string>();
            record("false", name, !json_bool(result, name), nullptr);
        }
    if (spec.contains("values"))
        for (const auto& v : as_list(spec["values"])) {
            std::string field = v.at("field").get<std::string>();
            double expect = v.at("expect").get<double>();
            double rel = v.contains("rel_tol") ? v["rel_tol"].get<double>() : 0.0;
            double abs = v.contains("abs_tol") ? v["abs_tol"].get<double>() : 0.0;
            double got = json_number(result, field);
            double tol = abs + rel * std::abs(expect);
            bool pass = std::abs(got - expect) <= tol;
            record("value", field, pass,
                   Json{{"expect", expect}, {"got", got}, {"tolerance", tol}});
        }
    if (spec.contains("max_abs"))
        for (const auto& v : as_list(spec["max_abs"])) {
            std::string field = v.at("field").get<std::string>();
            double bound = v.at("bound").get<double>();
            double got = json_number(result, field);
            record("max_abs", field, std::abs(got) <= bound,
                   Json{{"bound", bound}, {"got", got}});
        }
    if (spec.contains("min"))
        for (const auto& v : as_list(spec["min"])) {
            std::string field = v.at("field").get<std::string>();
            double bound = v.at("bound").get<double>();
            double got = json_number(result, field);
            record("min", field, got >= bound, Json{{"bound", bound}, {"got", got}});
        }
    if (spec.contains("max"))
        for (const auto& v : as_list(spec["max"])) {
            std::string field = v.at("field").get<std::string>();
            double bound = v.at("bound").get<double>();
            double got = json_number(result, field);
            record("max", field, got <= bound, Json{{"bound", bound}, {"got", got}});
        }
    return checks;
}

// One CSV per report: every top-level numeric array of the dominant length
// becomes a column, in result order.
std::optional<std::string> csv_table(const Json& result) {
    std::vector<std::pair<std::string, const Json*>> arrays;
    for (const auto& [key, value] : result.items()) {
        if (!value.is_array() || value.empty()) continue;
        bool numeric = true;
        for (const auto& v : value)
            if (!v.is_number()) {
                numeric = false;
                break;
            }
        if (numeric) arrays.emplace_back(key, &value);
    }
    if (arrays.empty()) return std::nullopt;
    std::size_t len = arrays.front().second->size();
    std::string header, body;
    std::vector<const Json*> cols;
    for (const auto& [key, arr] : arrays) {
        if (arr->size() != len) continue;
        header += (header.empty() ? "" : ",") + key;
        cols.push_back(arr);
    }
    for (std::size_t i = 0; i < len; ++i) {
        std::string row;
        for (const Json* c : cols)
            row += (row.empty() ? "" : ",") + double_repr((*c)[i].get<double>());
        body += row + "\n";
    }
    return header + "\n" + body;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError{2, "cannot write " + path.string()};
    out << content;
}

} // namespace

RunOutcome run_scenario(const std::string& scenario_path, const std::string& out_dir,
                        std::optional<std::uint64_t> seed_override, int jobs) {
    RunOutcome outcome;
    namespace fs = std::filesystem;

    std::string bytes;
    {
        std::ifstream in(scenario_path, std::ios::binary);
        if (!in) {
            outcome.exit_code = 2;
            outcome.message = "cannot read scenario file " + scenario_path;
            return outcome;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        bytes = ss.str();
    }

    Json run_summary;
    run_summary["header"] = Json{{"timestamp", utc_timestamp()},
                                 {"scenario", fs::path(scenario_path).filename().string()},
                                 {"scenario_hash", fnv1a_hex(bytes)},
                                 {"jobs", jobs}};
    if (seed_override) run_summary["header"]["seed_override"] = *seed_override;
    Json task_summaries = Json::array();

    auto finish = [&](int code, const std::string& msg) {
        outcome.exit_code = code;
        outcome.message = msg;
        run_summary["tasks"] = task_summaries;
        run_summary["ok"] = code == 0;
        if (!msg.empty()) run_summary["error"] = msg;
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (!ec) {
            write_file(fs::path(out_dir) / "run.json", run_summary.dump(2) + "\n");
            outcome.report_files.push_back("run.json");
        }
        return outcome;
    };

    Json doc;
    try {
        doc = Json::parse(bytes);
    } catch (const Json::parse_error& e) {
        return finish(2, std::string("scenario parse error: ") + e.what());
    }

    Context ctx;
    ctx.seed_override = seed_override;
    ctx.jobs = jobs;
    ctx.scenario_hash = fnv1a_hex(bytes);

    try {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) return finish(2, "cannot create output directory " + out_dir);

        if (!doc.is_object() || !doc.contains("dimension"))
            bad_scenario("scenario needs a top-level dimension");
        ctx.n = doc["dimension"].get<int>();
        if (ctx.n < 1 || ctx.n > 8) bad_scenario("dimension must be in 1..8");
        if (doc.contains("seed")) ctx.base_seed = doc["seed"].get<std::uint64_t>();

        if (doc.contains("objects")) {
            if (!doc["objects"].is_object()) bad_scenario("objects must be a map");
            for (const auto& [name, decl] : doc["objects"].items())
                build_object(ctx, name, decl);
        }

        const Json tasks = doc.contains("tasks") ? doc["tasks"] : Json::array();
        if (!tasks.is_array()) bad_scenario("tasks must be an array");

        int index = 0;
        for (const Json& task : tasks) {
            if (!task.is_object() || !task.contains("op"))
                bad_scenario("task " + std::to_string(index) + " needs an op");
            std::string op = task["op"].get<std::string>();
            auto hit = handlers().find(op);
            if (hit == handlers().end())
                bad_scenario("task " + std::to_string(index) + ": unknown op '" + op + "'");

            TaskCtx tc;
            tc.ctx = &ctx;
            if (task.contains("seed")) tc.seed = task["seed"].get<std::uint64_t>();
            else tc.seed = ctx.base_seed;
            if (task.contains("quad")) tc.quad_decl = task["quad"];

            char base[64];
            std::snprintf(base, sizeof base, "task_%03d_%s", index, op.c_str());
            Json report;
            report["header"] = Json{{"timestamp", utc_timestamp()},
                                    {"scenario_hash", ctx.scenario_hash},
                                    {"index", index},
                                    {"op", op}};
            report["task"] = task;

            Json summary{{"index", index}, {"op", op}};
            try {
                Json result = hit->second(task, tc);
                bool ok = true;
                if (task.contains("assert"))
                    report["checks"] = run_assertions(task["assert"], result, ok);
                report["result"] = result;
                report["ok"] = ok;
                std::string report_name = std::string(base) + ".json";
                write_file(fs::path(out_dir) / report_name, report.dump(2) + "\n");
                outcome.report_files.push_back(report_name);
                if (auto csv = csv_table(result)) {
                    std::string csv_name = std::string(base) + ".csv";
                    write_file(fs::path(out_dir) / csv_name, *csv);
                    outcome.report_files.push_back(csv_name);
                }
                summary["report"] = report_name;
                summary["ok"] = ok;
                ++outcome.tasks_run;
                if (!ok) ++outcome.checks_failed;
            } catch (const ScenarioError&) {
                throw;
            } catch (const HypothesisError& e) {
                report["error"] = Json{{"type", "hypothesis"}, {"message", e.what()}};
                report["ok"] = false;
                std::string report_name = std::string(base) + ".json";
                write_file(fs::path(out_dir) / report_name, report.dump(2) + "\n");
                outcome.report_files.push_back(report_name);
                summary["ok"] = false;
                summary["error"] = e.what();
                task_summaries.push_back(summary);
                return finish(3, "task " + std::to_string(index) + " (" + op +
                                     "): " + e.what());
            } catch (const NonConvergenceError& e) {
                report["error"] = Json{{"type", "non_convergence"}, {"message", e.what()}};
                report["ok"] = false;
                std::string report_name = std::string(base) + ".json";
                write_file(fs::path(out_dir) / report_name, report.dump(2) + "\n");
                outcome.report_files.push_back(report_name);
                summary["ok"] = false;
                summary["error"] = e.what();
                task_summaries.push_back(summary);
                return finish(4, "task " + std::to_string(index) + " (" + op +
                                     "): " + e.what());
            } catch (const SingularPointError& e) {
                report["error"] = Json{{"type", "singular_point"}, {"message", e.what()}};
                report["ok"] = false;
                std::string report_name = std::string(base) + ".json";
                write_file(fs::path(out_dir) / report_name, report.dump(2) + "\n");
                outcome.report_files.push_back(report_name);
                summary["ok"] = false;
                summary["error"] = e.what();
                task_summaries.push_back(summary);
                return finish(4, "task " + std::to_string(index) + " (" + op +
                                     "): " + e.what());
            } catch (const InvalidArgument& e) {
                throw ScenarioError{2, "task " + std::to_string(index) + " (" + op +
                                           "): " + e.what()};
            } catch (const Json::exception& e) {
                throw ScenarioError{2, "task " + std::to_string(index) + " (" + op +
                                           "): " + e.what()};
            }
            task_summaries.push_back(summary);
            ++index;
        }
    } catch (const ScenarioError& e) {
        return finish(e.code, e.message);
    } catch (const InvalidArgument& e) {
        return finish(2, e.what());
    } catch (const Json::exception& e) {
        return finish(2, std::string("scenario structure error: ") + e.what());
    }

    if (outcome.checks_failed > 0)
        return finish(1, std::to_string(outcome.checks_failed) + " task(s) failed assertions");
    return finish(0, "");
}

} // namespace supercal
