#include <doctest.h>

#include <cmath>

#include "exitmap/io_csv.hpp"
#include "exitmap/scenario.hpp"

using namespace exitmap;

TEST_CASE("builtin registry") {
    CHECK(builtin_scenario("exmap").kind == ScenarioKind::Analysis);
    CHECK(builtin_scenario("affine(1)").name == "affine(1)");
    CHECK(builtin_scenario("affine(-1)").kind == ScenarioKind::Analysis);
    CHECK(builtin_scenario("impact_oscillator(2)").kind == ScenarioKind::Hybrid);
    CHECK(builtin_scenario("realize_disc(1/3)").realize_circle.has_value());
    CHECK(builtin_scenario("cooling").cooling.has_value());
    CHECK(builtin_scenario("zeno_shear").induced.has_value());
    CHECK_THROWS_AS(builtin_scenario("nope"), SchemaError);
    CHECK_THROWS_AS(builtin_scenario("affine(x)"), SchemaError);
}

TEST_CASE("JSON scenarios") {
    SUBCASE("analysis declaration") {
        Scenario sc = scenario_from_json_text(R"({
            "name": "spiral",
            "kind": "analysis",
            "flow": {"kind": "affine_focus", "lambda": 1, "mu": 1, "p": 0.5},
            "region": {"type": "halfplane", "side": "lower", "lo": -2, "hi": 2},
            "analysis": {"samples": 17, "horizon": 30, "transversal": true}
        })");
        CHECK(sc.analysis.samples == 17);
        CHECK(sc.analysis.horizon == 30.0);
        CHECK(sc.analysis.transversal);
        CHECK(sc.region->boundary.lo() == -2.0);
    }
    SUBCASE("builtin reference with overrides") {
        Scenario sc = scenario_from_json_text(R"({
            "builtin": "exmap",
            "analysis": {"samples": 16},
            "tolerances": {"march_dt": 0.005}
        })");
        CHECK(sc.name == "exmap");
        CHECK(sc.analysis.samples == 16);
        CHECK(sc.tol.march_dt == 0.005);
    }
    SUBCASE("hybrid declaration") {
        Scenario sc = scenario_from_json_text(R"({
            "name": "ball",
            "kind": "hybrid",
            "flow": {"kind": "gravity", "g": 1},
            "reset": {"type": "restitution", "r": 0.5},
            "x0": [1, 0],
            "horizon": 10,
            "policy": "prefer-flow"
        })");
        REQUIRE(sc.system.has_value());
        CHECK(sc.system->reset(-1.0) == doctest::Approx(0.5));
        CHECK(sc.hybrid.policy == StartPolicy::PreferFlow);
    }
    SUBCASE("realize declaration with a tabulated map") {
        Scenario sc = scenario_from_json_text(R"({
            "name": "tab",
            "kind": "realize",
            "map": {"type": "tabulated", "xs": [-3, -2, -1, 0], "values": [3, 2, 1, 0]}
        })");
        REQUIRE(sc.realize_line.has_value());
        CHECK(sc.realize_line->P(-1.5) == doctest::Approx(1.5));
        CHECK(validate_halfplane_spec(*sc.realize_line).ok);
    }
    SUBCASE("an invalid prescribed map fails hypothesis probes, naming the probe") {
        Scenario sc = scenario_from_json_text(R"({
            "name": "bad",
            "kind": "realize",
            "map": {"type": "tabulated", "xs": [-2, -1, 1], "values": [2, 1, 2]}
        })");
        SpecEvidence ev = validate_halfplane_spec(*sc.realize_line);
        CHECK(!ev.ok);
        CHECK_THROWS_AS(build_halfplane_realization(*sc.realize_line), std::invalid_argument);
    }
    SUBCASE("moebius image region") {
        Scenario sc = scenario_from_json_text(R"({
            "name": "m",
            "kind": "analysis",
            "flow": {"kind": "rotation"},
            "region": {"type": "moebius_image",
                       "of": {"type": "disc", "radius": 1},
                       "matrix": [[0,1], [0,1], 1, -1]}
        })");
        // i(z+1)/(z-1) maps the disc to the lower half-plane
        CHECK(sc.region->region.contains({0.0, -1.0}));
        CHECK(!sc.region->region.contains({0.0, 1.0}));
    }
    SUBCASE("schema errors") {
        CHECK_THROWS_AS(scenario_from_json_text("not json"), SchemaError);
        CHECK_THROWS_AS(scenario_from_json_text(R"({"kind": "analysis"})"), SchemaError);
        CHECK_THROWS_AS(scenario_from_json_text(R"({"name": "x", "kind": "analysis"})"),
                        SchemaError);
        CHECK_THROWS_AS(scenario_from_json_text(
                            R"({"name": "x", "kind": "analysis",
                                "flow": {"kind": "wat"},
                                "region": {"type": "disc"}})"),
                        SchemaError);
        CHECK_THROWS_AS(scenario_from_json_text(
                            R"({"name": "x", "kind": "analysis",
                                "flow": {"kind": "rotation"},
                                "region": {"type": "disc", "radius": -2}})"),
                        std::exception);
    }
}

TEST_CASE("property suite passes on representative builtins") {
    for (const char* name : {"exmap", "sink", "rotation", "realize_neg"}) {
        SuiteReport rep = run_property_suite(builtin_scenario(name));
        CHECK_MESSAGE(rep.passed, name);
    }
}

TEST_CASE("negative controls fail exactly their checks") {
    auto reports = negative_control_reports();
    REQUIRE(reports.size() == 3);
    for (const auto& rep : reports) {
        REQUIRE(rep.rows.size() == 1);
        CHECK(rep.rows[0].verdict == CheckVerdict::Fail);
    }
    CHECK(reports[0].rows[0].check == "bc-exclusion");
    CHECK(reports[1].rows[0].check == "monotonicity");
    CHECK(reports[2].rows[0].check == "extremum-count");
}

TEST_CASE("CSV writing is deterministic") {
    auto make = [] {
        CsvWriter w({"a", "b"});
        w.add_row({CsvWriter::num(1.0 / 3.0), CsvWriter::num(2.0)});
        w.add_row({CsvWriter::num(-0.125), "x"});
        return w.to_string();
    };
    CHECK(make() == make());
    CHECK(make() == "a,b\n0.333333333333,2\n-0.125,x\n");
}
