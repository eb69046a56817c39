#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "exitmap/first_maps.hpp"
#include "exitmap/flow.hpp"
#include "exitmap/planar.hpp"

namespace exitmap {

/// Partial reset map on the boundary line coordinate.
struct ResetMap {
    std::string name;
    std::function<double(double)> map;
    std::function<bool(double)> domain; // empty: total

    bool defined_at(double x) const { return !domain || domain(x); }
    double operator()(double x) const { return map(x); }
};

ResetMap restitution_reset(double r); // P(x) = -r x
ResetMap oscillator_reset(double mu); // P(x) = max(-mu x, x)

/// Piecewise-linear interpolation of sampled map values; undefined outside the
/// sampled range and across undefined samples.
ResetMap tabulated_reset(std::string name, std::vector<double> xs, std::vector<double> values,
                         std::vector<bool> defined);

/// Reset map + local flow near the closed upper half-plane + sliding flow on
/// R_s = {(x,0) : P(x) = x and the flow exits immediately}.
struct ImpactingSystem {
    std::string name;
    Flow flow;
    ResetMap reset;
    Flow sliding;
};

ImpactingSystem bouncing_ball_system(double g, double r); // state (velocity, height)
ImpactingSystem impact_oscillator_system(double mu);

bool in_sliding_set(const ImpactingSystem& sys, double x, const Tolerances& tol);

/// Sampled consistency of the impacting-system axioms: every exit image of
/// the upper half-plane lies in dom P, and sliding-set membership matches its
/// definition.
struct SystemValidation {
    bool ok = true;
    std::vector<std::string> failures;
    std::vector<double> sliding_params; // sampled x with (x,0) in R_s
};
SystemValidation validate_impacting(const ImpactingSystem& sys, double lo, double hi, int n,
                                    double horizon, const Tolerances& tol);

enum class HybridMode { FlowMode, Sliding };
enum class StartPolicy { PreferJump, PreferFlow, PreferSlide };
const char* to_string(StartPolicy p);

enum class Termination {
    Horizon,
    ZenoDetected,
    MaxEvents,
    ResetUndefined,
    LeftDomain,
    Unresolved,
};
const char* to_string(Termination t);

struct HybridSegment {
    int index = 0; // hybrid index n
    double t_begin = 0, t_end = 0;
    HybridMode mode = HybridMode::FlowMode;
    std::vector<std::pair<double, Vec2>> path; // sampled (t, state)
};

struct JumpRecord {
    int index = 0; // index of the segment the jump closes
    double t = 0;
    Vec2 pre{}, post{};
};

struct ZenoDiagnostics {
    int events = 0;
    std::vector<double> event_times;
    bool suspected = false;
    double accumulation_time = 0.0; // estimated, when suspected
    double tail_ratio = 0.0;        // last inter-event ratio
};

struct HybridTrajectory {
    std::vector<HybridSegment> segments;
    std::vector<JumpRecord> jumps;
    Termination termination = Termination::Horizon;
    ZenoDiagnostics zeno;
    StartPolicy policy = StartPolicy::PreferJump;
    double end_time = 0.0;
    std::string note;
};

struct HybridConfig {
    Tolerances tol;
    int min_events = 8;     // jumps needed before the Zeno heuristic may fire
    int ratio_window = 5;   // trailing inter-event ratios examined
    double ratio_eps = 0.05;
    StartPolicy policy = StartPolicy::PreferJump; // boundary start points only
    double path_dt = 0.05;  // trajectory export sampling
};

/// Alternates continuous segments (terminated by boundary events found with
/// the first-out detector), reset jumps, and sliding segments. Boundary start
/// points follow the policy; after a jump the flow continues whenever it can.
/// Terminates at the horizon, at max_events, on Zeno detection, or when the
/// reset is undefined at a reached boundary point.
HybridTrajectory simulate(const ImpactingSystem& sys, Vec2 x0, double horizon, int max_events,
                          const HybridConfig& cfg);

enum class ZenoVerdict { Zeno, NotZeno, Inconclusive };
const char* to_string(ZenoVerdict v);

struct ZenoReport {
    ZenoVerdict verdict = ZenoVerdict::Inconclusive;
    double accumulation_time = 0.0;
    double tail_ratio = 0.0;
    int events = 0;
    std::string note;
};

/// Geometric-decay heuristic on the recorded inter-event times.
ZenoReport detect_zeno(const HybridTrajectory& traj, const HybridConfig& cfg);
ZenoReport zeno_from_event_times(const std::vector<double>& times, double horizon,
                                 const HybridConfig& cfg);

struct InducedResult {
    bool ok = false;
    std::string report;
    std::vector<double> unresolved_at; // boundary coordinates with unresolved switching
    ParametricMap reset_samples;       // E over the lower half-plane for flow 1
    std::optional<ImpactingSystem> system;
};

/// Builds the impacting system induced by a pair of local flows: the reset is
/// the sampled-and-interpolated first-out map of flow1 over the lower
/// half-plane, the system flow is flow2, sliding is flow2 restricted to the
/// computed sliding set. Fails when the reset sampling has unresolved
/// switching or the exit image of the upper half-plane escapes dom P.
InducedResult induced_system(const Flow& flow1, const Flow& flow2, double lo, double hi, int n,
                             double horizon, const Tolerances& tol);

struct NormalFormResult {
    ImpactingSystem system; // conjugated: reset is -x on the nonpositive axis
    Homeomorphism2D conjugacy;
    double alpha = 0.0; // detected identity threshold of the original reset
};

/// Conjugates an impacting system with a total, continuous, non-identity
/// reset to the impact-oscillator normal form Q(x) = -x for x <= 0, via
/// h(x) = -P^{-1}(x) on the nonnegative axis (negative branch numerically).
/// Throws std::invalid_argument when the hypotheses fail on probes.
NormalFormResult normal_form_conjugate(const ImpactingSystem& sys, const Tolerances& tol);

struct ConjugacyReport {
    double reset_residual = 0.0;
    double flow_residual = 0.0;
    double sliding_residual = 0.0;
    double max_residual() const;
};

/// Residuals of the three defining identities of impacting-system conjugacy
/// on sample grids.
ConjugacyReport check_conjugacy_invariance(const ImpactingSystem& a, const ImpactingSystem& b,
                                           const Homeomorphism2D& H, const Tolerances& tol);

struct PoincareOutcome {
    enum class Kind { Value, Undefined, SlidingFixed } kind = Kind::Undefined;
    double value = 0.0;
    bool fixed = false; // equilibrium or periodic point of the impacting system
    std::string note;
};

/// One full bounce: the boundary coordinate of E_{H+}((P(x), 0)).
PoincareOutcome poincare_composition(const ImpactingSystem& sys, double x, double horizon,
                                     const Tolerances& tol);

struct CoolingParams {
    double alpha = 1.0, beta = 1.0, gamma = 1.0;
    double t_room = 20.0, t_hot = 80.0;
    double eps = 1.0;
};

struct CoolingResult {
    bool exits = false;
    double exit_time = 0.0;
    double return_time = 0.0;
    double total_time = 0.0;
    std::string note;
};

/// Newton-cooling return-time scenario: first exit of the observation band
/// |T_water - T_room| <= eps, then the first return into it.
CoolingResult cooling_return_time(const CoolingParams& p, double horizon, const Tolerances& tol);

} // namespace exitmap
