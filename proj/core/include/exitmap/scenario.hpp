#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exitmap/hybrid.hpp"
#include "exitmap/planar.hpp"
#include "exitmap/realization.hpp"

namespace exitmap {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind { Analysis, Realization, Hybrid, Cooling, Induced };

struct AnalysisDecl {
    int samples = 64;
    double horizon = 100.0;
    bool transversal = false;
};

struct HybridDecl {
    Vec2 x0{};
    double horizon = 20.0;
    int max_events = 200;
    StartPolicy policy = StartPolicy::PreferFlow;
};

struct InducedDecl {
    Flow flow1; // reset donor, sampled over the lower half-plane
    Flow flow2; // system flow
    double lo = -0.5, hi = 0.5;
    int n = 65;
    double horizon = 10.0;
};

/// A fully instantiated scenario: what to run and on which objects.
struct Scenario {
    std::string name;
    ScenarioKind kind = ScenarioKind::Analysis;
    std::string description;

    Flow flow;                           // analysis flow (also the hybrid system flow)
    std::optional<BoundedRegion> region; // analysis region + boundary
    AnalysisDecl analysis;

    std::optional<ImpactingSystem> system;
    HybridDecl hybrid;

    std::optional<MapSpec> realize_line;
    std::optional<CircleMapSpec> realize_circle;
    std::vector<double> verify_samples; // realization round-trip points

    std::optional<CoolingParams> cooling;
    std::optional<InducedDecl> induced;

    Tolerances tol;
};

/// Builtin scenario registry; accepts "name" or "name(arg)" with numeric or
/// fractional arguments, e.g. "affine(1)", "impact_oscillator(2)",
/// "realize_disc(1/3)". Throws SchemaError for unknown names.
Scenario builtin_scenario(const std::string& spec);
std::vector<std::string> builtin_names();

/// Scenario files are JSON; see the README for the schema. Throws SchemaError
/// on malformed declarations.
Scenario scenario_from_json_text(const std::string& text);

// ---------------------------------------------------------------------------
// property suite

struct SuiteRow {
    std::string check;
    CheckVerdict verdict = CheckVerdict::NotApplicable;
    std::string detail;
};

struct SuiteReport {
    std::string scenario;
    std::vector<SuiteRow> rows;
    bool passed = true; // no Fail rows
};

/// Runs the structural checks backed by the analysis modules on one scenario:
/// flow axioms on seeded random probes, first-out/first-in duality, the
/// two-to-one bound, B-C exclusion, local monotonicity with interval trapping,
/// extremum count, and junction behavior where annotated.
SuiteReport run_property_suite(const Scenario& sc, unsigned seed = 0);

/// Synthetic negative controls: each report fails exactly the check it is
/// built to violate.
std::vector<SuiteReport> negative_control_reports();

} // namespace exitmap
