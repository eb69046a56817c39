#include "exitmap/scenario.hpp"

#include <cstdio>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "exitmap/fields.hpp"

namespace exitmap {

namespace {

using nlohmann::json;

std::string fmt_arg(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double parse_number_arg(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        double num = std::stod(s.substr(0, slash));
        double den = std::stod(s.substr(slash + 1));
        if (den == 0.0) throw SchemaError("fraction with zero denominator: " + s);
        return num / den;
    }
    return std::stod(s);
}

// "name" or "name(arg)"
std::pair<std::string, std::optional<double>> split_name_arg(const std::string& spec) {
    auto open = spec.find('(');
    if (open == std::string::npos) return {spec, std::nullopt};
    auto close = spec.rfind(')');
    if (close == std::string::npos || close < open) throw SchemaError("malformed scenario name: " + spec);
    std::string arg = spec.substr(open + 1, close - open - 1);
    try {
        return {spec.substr(0, open), parse_number_arg(arg)};
    } catch (const std::exception&) {
        throw SchemaError("malformed scenario argument: " + spec);
    }
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
    return v;
}

Scenario analysis_scenario(std::string name, Flow flow, BoundedRegion region, int samples,
                           bool transversal) {
    Scenario sc;
    sc.name = std::move(name);
    sc.kind = ScenarioKind::Analysis;
    sc.flow = std::move(flow);
    sc.region = std::move(region);
    sc.analysis.samples = samples;
    sc.analysis.transversal = transversal;
    return sc;
}

Boundary vertical_line_boundary(double x0, double lo, double hi) {
    Homeomorphism2D to_vertical{[x0](Vec2 p) { return Vec2{x0, p.x}; },
                                [](Vec2 p) { return Vec2{p.y, 0.0}; }, "vertical"};
    return transform_boundary(make_line_boundary(lo, hi), to_vertical);
}

} // namespace

std::vector<std::string> builtin_names() {
    return {"exmap",        "affine(p)",           "source",
            "sink",         "rotation",            "bouncing_ball(r)",
            "impact_oscillator(mu)", "zeno_shear", "cooling",
            "realize_neg",  "realize_square",      "realize_disc(alpha)"};
}

Scenario builtin_scenario(const std::string& spec) {
    auto [name, arg] = split_name_arg(spec);

    if (name == "exmap") {
        Scenario sc = analysis_scenario("exmap", saddle_flow(), make_disc({0, 0}, 1.0), 64, true);
        sc.description = "saddle flow against the unit disc";
        return sc;
    }
    if (name == "affine") {
        double p = arg.value_or(1.0);
        Scenario sc = analysis_scenario(
            "affine(" + fmt_arg(p) + ")", affine_focus_flow(1.0, 1.0, p),
            make_halfplane(HalfplaneSide::Lower, -3.0, 3.0), 33, true);
        sc.description = "spiral focus against the lower half-plane";
        return sc;
    }
    if (name == "source")
        return analysis_scenario("source", source_flow(), make_disc({0, 0}, 1.0), 32, true);
    if (name == "sink")
        return analysis_scenario("sink", sink_flow(), make_disc({0, 0}, 1.0), 32, true);
    if (name == "rotation")
        return analysis_scenario("rotation", make_rotation(M_PI), make_disc({0, 0}, 1.0), 32,
                                 false);
    if (name == "bouncing_ball") {
        double r = arg.value_or(0.5);
        Scenario sc;
        sc.name = "bouncing_ball(" + fmt_arg(r) + ")";
        sc.kind = ScenarioKind::Hybrid;
        sc.system = bouncing_ball_system(1.0, r);
        sc.flow = sc.system->flow;
        sc.region = make_halfplane(HalfplaneSide::Upper, -2.0, 2.0);
        sc.analysis.samples = 33;
        sc.analysis.horizon = 40.0;
        sc.hybrid.x0 = {1.0, 0.0}; // unit upward velocity at ground level
        sc.hybrid.policy = StartPolicy::PreferFlow;
        sc.description = "free fall with restitution reset, state (velocity, height)";
        return sc;
    }
    if (name == "impact_oscillator") {
        double mu = arg.value_or(1.0);
        Scenario sc;
        sc.name = "impact_oscillator(" + fmt_arg(mu) + ")";
        sc.kind = ScenarioKind::Hybrid;
        sc.system = impact_oscillator_system(mu);
        sc.flow = sc.system->flow;
        sc.region = make_halfplane(HalfplaneSide::Upper, -2.0, 2.0);
        sc.analysis.samples = 33;
        sc.analysis.horizon = 40.0;
        sc.hybrid.x0 = {-1.0, 0.0};
        sc.hybrid.policy = StartPolicy::PreferFlow;
        sc.description = "half-turn rotation with the oscillator reset";
        return sc;
    }
    if (name == "zeno_shear") {
        Scenario sc;
        sc.name = "zeno_shear";
        sc.kind = ScenarioKind::Induced;
        sc.flow = conjugate_flow(translation_flow(), comsin_shear());
        sc.region = BoundedRegion{make_halfplane_region(HalfplaneSide::Lower),
                                  make_line_boundary(-0.5, 0.5)};
        sc.analysis.samples = 129;
        sc.analysis.horizon = 10.0;
        sc.induced = InducedDecl{sc.flow, sc.flow, -0.5, 0.5, 65, 10.0};
        // the shear oscillates on the scale pi x^2 near the origin; membership
        // sampling must outresolve it away from the unresolvable core
        sc.tol.march_dt = 5e-4;
        sc.description = "translation conjugated by the oscillating shear; switching near the "
                         "origin is not well-ordered";
        return sc;
    }
    if (name == "cooling") {
        Scenario sc;
        sc.name = "cooling";
        sc.kind = ScenarioKind::Cooling;
        sc.cooling = CoolingParams{};
        sc.flow = make_vector_field_flow("cooling", cooling_field(1.0, 1.0, 1.0, 20.0));
        double eps = sc.cooling->eps, tr = sc.cooling->t_room;
        sc.region = BoundedRegion{
            make_region("band", {}, [tr, eps](Vec2 q) { return std::abs(q.x - tr) - eps; }, true),
            vertical_line_boundary(tr + eps, 20.0, 80.0)};
        sc.analysis.samples = 25;
        sc.analysis.horizon = 40.0;
        sc.description = "Newton cooling; return to the observation band";
        return sc;
    }
    if (name == "realize_neg" || name == "realize_square") {
        Scenario sc;
        sc.name = name;
        sc.kind = ScenarioKind::Realization;
        sc.realize_line = name == "realize_neg" ? neg_map_spec() : square_map_spec();
        sc.verify_samples = linspace(-3.0, 0.0, 32);
        sc.flow = build_halfplane_realization(*sc.realize_line).flow();
        sc.region = make_halfplane(HalfplaneSide::Lower, -3.0, 3.0);
        sc.analysis.samples = 49;
        sc.analysis.horizon = 20.0;
        sc.analysis.transversal = false;
        sc.description = "flow realizing a prescribed exit map on the lower half-plane";
        return sc;
    }
    if (name == "realize_disc") {
        double alpha = arg.value_or(0.5);
        Scenario sc;
        sc.name = "realize_disc(" + fmt_arg(alpha) + ")";
        sc.kind = ScenarioKind::Realization;
        CircleMapSpec circle = circle_map_from_halfplane(neg_map_spec());
        if (std::abs(alpha - 0.5) > 1e-12) circle = with_maximum_at(circle, alpha);
        sc.realize_circle = circle;
        sc.flow = build_disc_realization(circle).flow;
        sc.region = make_disc({0, 0}, 1.0);
        sc.analysis.samples = 64;
        sc.analysis.horizon = 20.0;
        sc.description = "flow realizing a prescribed unimodal circle map on the unit disc";
        return sc;
    }
    throw SchemaError("unknown builtin scenario: " + spec);
}

// ---------------------------------------------------------------------------
// JSON scenarios

namespace {

double num_or(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw SchemaError(std::string("field must be a number: ") + key);
    return j[key].get<double>();
}

Flow flow_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw SchemaError("flow declaration needs a 'kind'");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "saddle") return saddle_flow();
    if (kind == "source") return source_flow();
    if (kind == "sink") return sink_flow();
    if (kind == "translation") return translation_flow();
    if (kind == "rotation") return make_rotation(num_or(j, "speed", M_PI));
    if (kind == "affine_focus")
        return affine_focus_flow(num_or(j, "lambda", 1.0), num_or(j, "mu", 1.0),
                                 num_or(j, "p", 0.0));
    if (kind == "gravity") return gravity_flow(num_or(j, "g", 1.0));
    if (kind == "comsin_shear") return conjugate_flow(translation_flow(), comsin_shear());
    if (kind == "linear_field")
        return make_vector_field_flow("linear_field",
                                      linear_field(num_or(j, "a", 0), num_or(j, "b", 0),
                                                   num_or(j, "c", 0), num_or(j, "d", 0)));
    if (kind == "polynomial_field") {
        if (!j.contains("cx") || !j.contains("cy"))
            throw SchemaError("polynomial_field needs 'cx' and 'cy' coefficient matrices");
        auto cx = j["cx"].get<std::vector<std::vector<double>>>();
        auto cy = j["cy"].get<std::vector<std::vector<double>>>();
        return make_vector_field_flow("polynomial_field", polynomial_field(cx, cy));
    }
    throw SchemaError("unknown flow kind: " + kind);
}

MoebiusMap moebius_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) throw SchemaError("matrix must be [a, b, c, d]");
    auto cplx = [](const json& e) -> std::complex<double> {
        if (e.is_number()) return {e.get<double>(), 0.0};
        if (e.is_array() && e.size() == 2) return {e[0].get<double>(), e[1].get<double>()};
        throw SchemaError("matrix entries are numbers or [re, im] pairs");
    };
    MoebiusMap m{cplx(j[0]), cplx(j[1]), cplx(j[2]), cplx(j[3])};
    if (!m.invertible()) throw SchemaError("moebius matrix is singular");
    return m;
}

BoundedRegion region_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw SchemaError("region declaration needs a 'type'");
    std::string type = j["type"].get<std::string>();
    if (type == "disc") {
        Vec2 c{0, 0};
        if (j.contains("center")) {
            auto v = j["center"].get<std::vector<double>>();
            if (v.size() != 2) throw SchemaError("disc center must be [x, y]");
            c = {v[0], v[1]};
        }
        return make_disc(c, num_or(j, "radius", 1.0));
    }
    if (type == "halfplane") {
        std::string side = j.value("side", "lower");
        double lo = num_or(j, "lo", -3.0), hi = num_or(j, "hi", 3.0);
        if (side == "lower") return make_halfplane(HalfplaneSide::Lower, lo, hi);
        if (side == "upper") return make_halfplane(HalfplaneSide::Upper, lo, hi);
        throw SchemaError("halfplane side must be 'lower' or 'upper'");
    }
    if (type == "moebius_image") {
        if (!j.contains("of") || !j.contains("matrix"))
            throw SchemaError("moebius_image needs 'of' and 'matrix'");
        BoundedRegion base = region_from_json(j["of"]);
        MoebiusMap m = moebius_from_json(j["matrix"]);
        MoebiusMap minv = m.inverse();
        Homeomorphism2D h{[m](Vec2 p) { return m.apply(p); },
                          [minv](Vec2 p) { return minv.apply(p); }, "moebius"};
        return {moebius_region(base.region, m), transform_boundary(base.boundary, h)};
    }
    throw SchemaError("unknown region type: " + type);
}

void apply_tolerance_overrides(Tolerances& tol, const json& j) {
    tol.integ_rel = num_or(j, "integ_rel", tol.integ_rel);
    tol.integ_abs = num_or(j, "integ_abs", tol.integ_abs);
    tol.boundary = num_or(j, "boundary", tol.boundary);
    tol.time = num_or(j, "time", tol.time);
    tol.param = num_or(j, "param", tol.param);
    tol.fixed_point = num_or(j, "fixed_point", tol.fixed_point);
    tol.value_merge = num_or(j, "value_merge", tol.value_merge);
    tol.march_dt = num_or(j, "march_dt", tol.march_dt);
    tol.horizon = num_or(j, "horizon", tol.horizon);
}

} // namespace

Scenario scenario_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("scenario must be a JSON object");

    if (j.contains("builtin")) {
        Scenario sc = builtin_scenario(j["builtin"].get<std::string>());
        if (j.contains("analysis")) {
            const json& a = j["analysis"];
            sc.analysis.samples = static_cast<int>(num_or(a, "samples", sc.analysis.samples));
            sc.analysis.horizon = num_or(a, "horizon", sc.analysis.horizon);
            if (a.contains("transversal")) sc.analysis.transversal = a["transversal"].get<bool>();
        }
        if (j.contains("tolerances")) apply_tolerance_overrides(sc.tol, j["tolerances"]);
        return sc;
    }

    if (!j.contains("name")) throw SchemaError("scenario needs a 'name'");
    Scenario sc;
    sc.name = j["name"].get<std::string>();
    std::string kind = j.value("kind", "analysis");

    if (j.contains("tolerances")) apply_tolerance_overrides(sc.tol, j["tolerances"]);

    if (kind == "analysis") {
        sc.kind = ScenarioKind::Analysis;
        if (!j.contains("flow")) throw SchemaError("analysis scenario needs a 'flow'");
        if (!j.contains("region")) throw SchemaError("analysis scenario needs a 'region'");
        sc.flow = flow_from_json(j["flow"]);
        sc.region = region_from_json(j["region"]);
    } else if (kind == "hybrid") {
        sc.kind = ScenarioKind::Hybrid;
        if (!j.contains("flow")) throw SchemaError("hybrid scenario needs a 'flow'");
        if (!j.contains("reset")) throw SchemaError("hybrid scenario needs a 'reset'");
        sc.flow = flow_from_json(j["flow"]);
        const json& r = j["reset"];
        std::string rt = r.value("type", "restitution");
        ResetMap reset;
        if (rt == "restitution") reset = restitution_reset(num_or(r, "r", 0.5));
        else if (rt == "oscillator") reset = oscillator_reset(num_or(r, "mu", 1.0));
        else throw SchemaError("unknown reset type: " + rt);
        Flow sliding = j.contains("sliding") ? flow_from_json(j["sliding"])
                                             : make_closed_form("rest", [](double, Vec2 p) { return p; });
        sc.system = ImpactingSystem{sc.name, sc.flow, reset, sliding};
        sc.region = make_halfplane(HalfplaneSide::Upper, -2.0, 2.0);
        if (j.contains("x0")) {
            auto v = j["x0"].get<std::vector<double>>();
            if (v.size() != 2) throw SchemaError("x0 must be [x, y]");
            sc.hybrid.x0 = {v[0], v[1]};
        }
        sc.hybrid.horizon = num_or(j, "horizon", sc.hybrid.horizon);
        sc.hybrid.max_events = static_cast<int>(num_or(j, "max_events", sc.hybrid.max_events));
        std::string pol = j.value("policy", "prefer-flow");
        if (pol == "prefer-flow") sc.hybrid.policy = StartPolicy::PreferFlow;
        else if (pol == "prefer-jump") sc.hybrid.policy = StartPolicy::PreferJump;
        else if (pol == "prefer-slide") sc.hybrid.policy = StartPolicy::PreferSlide;
        else throw SchemaError("unknown policy: " + pol);
    } else if (kind == "realize") {
        sc.kind = ScenarioKind::Realization;
        if (!j.contains("map")) throw SchemaError("realize scenario needs a 'map'");
        const json& m = j["map"];
        std::string mt = m.value("type", "neg");
        MapSpec spec;
        if (mt == "neg") spec = neg_map_spec();
        else if (mt == "square") spec = square_map_spec();
        else if (mt == "scaled_neg") spec = scaled_neg_map_spec(num_or(m, "mu", 1.0));
        else if (mt == "tabulated") {
            if (!m.contains("xs") || !m.contains("values"))
                throw SchemaError("tabulated map needs 'xs' and 'values'");
            spec = tabulated_map_spec(m["xs"].get<std::vector<double>>(),
                                      m["values"].get<std::vector<double>>());
        } else {
            throw SchemaError("unknown map type: " + mt);
        }
        if (j.value("disc", false)) {
            CircleMapSpec circle = circle_map_from_halfplane(spec);
            double alpha = num_or(j, "alpha", 0.5);
            if (std::abs(alpha - 0.5) > 1e-12) circle = with_maximum_at(circle, alpha);
            sc.realize_circle = circle;
            sc.region = make_disc({0, 0}, 1.0);
            sc.analysis.samples = 64;
        } else {
            sc.realize_line = spec;
            sc.region = make_halfplane(HalfplaneSide::Lower, -3.0, 3.0);
            sc.analysis.samples = 49;
        }
        sc.analysis.horizon = 20.0;
        int vn = static_cast<int>(num_or(j, "verify_samples", 32));
        double vlo = num_or(j, "verify_lo", -3.0), vhi = num_or(j, "verify_hi", 0.0);
        sc.verify_samples = linspace(vlo, vhi, vn);
        // the flow is built lazily by the command so hypothesis violations
        // surface as computation errors, not schema errors
    } else {
        throw SchemaError("unknown scenario kind: " + kind);
    }

    if (j.contains("analysis")) {
        const json& a = j["analysis"];
        sc.analysis.samples = static_cast<int>(num_or(a, "samples", sc.analysis.samples));
        sc.analysis.horizon = num_or(a, "horizon", sc.analysis.horizon);
        if (a.contains("transversal")) sc.analysis.transversal = a["transversal"].get<bool>();
    }
    return sc;
}

// ---------------------------------------------------------------------------
// property suite

namespace {

SuiteRow duality_row(const Scenario& sc) {
    SuiteRow row{"duality", CheckVerdict::Pass, ""};
    const auto& br = *sc.region;
    int mismatches = 0;
    for (double s : uniform_params(br.boundary, std::min(sc.analysis.samples, 64))) {
        Vec2 x = br.boundary.at(s);
        ExitOutcome direct = first_out(sc.flow, br.region, x, sc.analysis.horizon, sc.tol);
        ExitOutcome dual =
            first_in(sc.flow, br.region.complement(), x, sc.analysis.horizon, sc.tol);
        bool same_status = direct.status == dual.status;
        bool same_value = direct.status != MapStatus::Defined ||
                          (std::abs(direct.time - dual.time) <= 1e-9 &&
                           dist(direct.point, dual.point) <= 1e-9);
        if (!same_status || !same_value) ++mismatches;
    }
    if (mismatches) {
        row.verdict = CheckVerdict::Fail;
        row.detail = std::to_string(mismatches) + " mismatching samples";
    }
    return row;
}

SuiteRow flow_axioms_row(const Scenario& sc, unsigned seed) {
    SuiteRow row{"flow-axioms", CheckVerdict::Pass, ""};
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> coord(-1.5, 1.5);
    std::uniform_real_distribution<double> time(-1.5, 1.5);
    std::vector<GroupLawProbe> probes;
    std::vector<Vec2> pts;
    for (int i = 0; i < 60; ++i) {
        probes.push_back({time(rng), time(rng), Vec2{coord(rng), coord(rng)}});
        pts.push_back(probes.back().x);
    }
    auto idr = identity_residual(sc.flow, pts);
    auto glr = group_law_residual(sc.flow, probes);
    double bound = sc.flow.kind() == FlowKind::VectorField ? 1e-6 : 1e-5;
    // conjugated and realization-built flows go through root solves; allow the
    // integrated-flow bound for them as well
    std::ostringstream os;
    os << "identity " << idr.max_residual << ", group-law " << glr.max_residual << " ("
       << glr.skipped << " skipped)";
    row.detail = os.str();
    if (idr.max_residual > bound || glr.max_residual > bound) row.verdict = CheckVerdict::Fail;
    return row;
}

} // namespace

SuiteReport run_property_suite(const Scenario& sc, unsigned seed) {
    SuiteReport rep;
    rep.scenario = sc.name;
    if (!sc.region) {
        rep.rows.push_back({"suite", CheckVerdict::NotApplicable, "scenario has no region"});
        return rep;
    }

    rep.rows.push_back(flow_axioms_row(sc, seed));
    rep.rows.push_back(duality_row(sc));

    ParametricMap fe =
        sample_exit_map(sc.flow, *sc.region, sc.analysis.samples, sc.analysis.horizon, sc.tol);
    TypeSequence seq =
        type_sequence(sc.flow, *sc.region, sc.analysis.samples, sc.analysis.horizon, sc.tol);

    auto add = [&](const std::string& name, const CheckResult& r) {
        rep.rows.push_back({name, r.verdict, r.detail});
    };
    add("two-to-one", check_two_to_one(fe, sc.tol));
    add("bc-exclusion", check_forbidden_bc(seq));
    add("monotonicity", check_monotonicity(fe, sc.tol));
    add("extremum-count", check_extremum_count(fe, sc.tol));
    add("junction", check_junction_behavior(sc.flow, *sc.region, seq, sc.analysis.transversal,
                                            sc.tol));

    for (const auto& row : rep.rows)
        if (row.verdict == CheckVerdict::Fail) rep.passed = false;
    return rep;
}

std::vector<SuiteReport> negative_control_reports() {
    std::vector<SuiteReport> reports;
    Tolerances tol;

    { // juxtaposed B and C runs
        SuiteReport rep;
        rep.scenario = "negctl_bc";
        std::vector<BoundaryType> labels;
        std::vector<double> params;
        for (int i = 0; i < 32; ++i) {
            params.push_back(i / 32.0);
            labels.push_back(i < 16 ? BoundaryType::B : BoundaryType::C);
        }
        CheckResult r = check_forbidden_bc(run_length_encode(labels, params, true));
        rep.rows.push_back({"bc-exclusion", r.verdict, r.detail});
        rep.passed = r.verdict != CheckVerdict::Fail;
        reports.push_back(rep);
    }
    { // increasing non-identity map
        SuiteReport rep;
        rep.scenario = "negctl_monotone";
        ParametricMap f;
        f.boundary = make_line_boundary(0.0, 0.6);
        for (int i = 0; i < 20; ++i) {
            MapSample m;
            m.s = 0.025 + i * 0.025;
            m.status = MapStatus::Defined;
            m.value = m.s + 0.1;
            f.samples.push_back(m);
        }
        f.near_discontinuity.assign(f.samples.size(), false);
        CheckResult r = check_monotonicity(f, tol);
        rep.rows.push_back({"monotonicity", r.verdict, r.detail});
        rep.passed = r.verdict != CheckVerdict::Fail;
        reports.push_back(rep);
    }
    { // two-peak map
        SuiteReport rep;
        rep.scenario = "negctl_twopeak";
        ParametricMap f;
        f.boundary = make_circle_boundary({0, 0}, 1.0);
        const int n = 64;
        for (int i = 0; i < n; ++i) {
            MapSample m;
            m.s = static_cast<double>(i) / n;
            m.status = MapStatus::Defined;
            m.value = 0.4 + 0.2 * std::sin(4.0 * M_PI * m.s);
            f.samples.push_back(m);
        }
        f.near_discontinuity.assign(n, false);
        CheckResult r = check_extremum_count(f, tol);
        rep.rows.push_back({"extremum-count", r.verdict, r.detail});
        rep.passed = r.verdict != CheckVerdict::Fail;
        reports.push_back(rep);
    }
    return reports;
}

} // namespace exitmap
