#pragma once

#include <optional>
#include <string>
#include <vector>

#include "exitmap/first_maps.hpp"

namespace exitmap {

struct MapSample {
    double s = 0.0;            // boundary parameter of the query point
    MapStatus status = MapStatus::Unresolved;
    double value = 0.0;        // boundary parameter of the image, when defined
    double time = 0.0;         // event time
    int grazes = 0;
    std::string note;
};

/// Dense sampling of a parametric boundary map (first-out or first-in),
/// with estimated discontinuity locations between adjacent samples.
struct ParametricMap {
    Boundary boundary;
    std::vector<MapSample> samples;       // ordered by s
    std::vector<int> marks;               // discontinuity between samples i and i+1
    std::vector<bool> near_discontinuity; // per sample: within the collar of a mark
    double horizon = 0.0;

    bool total() const;      // every sample defined
    bool continuous() const; // no marks and total
};

ParametricMap sample_exit_map(const Flow& flow, const BoundedRegion& br, int n, double horizon,
                              const Tolerances& tol);
ParametricMap sample_return_map(const Flow& flow, const BoundedRegion& br, int n, double horizon,
                                const Tolerances& tol);

struct TypeRun {
    int first = 0, last = 0;       // sample indexes, inclusive
    double s_first = 0, s_last = 0;
    BoundaryType label = BoundaryType::Unresolved;
    int length() const { return last - first + 1; }
};

struct TypeSequence {
    std::vector<BoundaryType> labels;
    std::vector<double> params;
    std::vector<TypeRun> runs;
    bool cyclic = false;
    double horizon = 0.0;
};

TypeSequence type_sequence(const Flow& flow, const BoundedRegion& br, int n, double horizon,
                           const Tolerances& tol);

/// Run-length encoding of per-sample labels (used directly by type_sequence
/// and by tests that build synthetic sequences).
TypeSequence run_length_encode(std::vector<BoundaryType> labels, std::vector<double> params,
                               bool cyclic, double horizon = 0.0);

enum class CheckVerdict { Pass, Fail, Inconclusive, NotApplicable };
const char* to_string(CheckVerdict v);

struct CheckViolation {
    double s1 = 0, s2 = 0;
    std::string what;
};

struct CheckResult {
    CheckVerdict verdict = CheckVerdict::NotApplicable;
    std::vector<CheckViolation> violations;
    std::string detail;
    bool passed() const { return verdict != CheckVerdict::Fail; }
};

/// No B-run may directly abut a C-run. Sampled single points do not witness
/// juxtaposed intervals, so a violation needs at least two samples per run.
/// Unresolved samples at a junction make the result inconclusive.
CheckResult check_forbidden_bc(const TypeSequence& seq);

/// Local monotonicity at continuous non-fixed samples (one-sided strict
/// decrease against sampled neighbors) plus the interval-trapping property of
/// the image over all defined sample pairs. Continuity is estimated from the
/// discontinuity marks; samples within the collar are skipped.
CheckResult check_monotonicity(const ParametricMap& f, const Tolerances& tol);

/// For total maps: at most one strict interior minimum and maximum of the
/// sampled sequence (plateau-merged), and every continuous interior extremum
/// is a fixed point.
CheckResult check_extremum_count(const ParametricMap& f, const Tolerances& tol);

/// Defined image values, merged within tolerance, may have at most two
/// preimages, and a two-preimage value needs one fixed preimage.
CheckResult check_two_to_one(const ParametricMap& f, const Tolerances& tol);

struct UnimodalNormalization {
    bool applicable = false;
    std::vector<MapSample> normalized; // shifted samples, ordered by shifted parameter
    double alpha = 0.0;                // sup{s : F(s) > s}, 0 for the empty set
    double beta = 0.0;                 // inf{s : F(s) < s}
    double max_location = 0.0;         // parameter of the normalized maximum
    bool unimodal = false;
    std::string note;
};

/// Shift the parameter origin to alpha so the map becomes unimodal
/// (circle domains only; requires a total, continuous sampling).
UnimodalNormalization unimodal_normalize(const ParametricMap& f, const Tolerances& tol);

/// At a junction where a launching run (A-1) abuts a diving or never-to-leave
/// run (A-2 or C), both one-sided orbits of the junction point must enter A.
/// The junction parameter is refined by bisection on the immediate-side
/// predicate between the abutting runs. Junctions at equilibria are skipped.
/// Requires the scenario's transversality annotation.
CheckResult check_junction_behavior(const Flow& flow, const BoundedRegion& br,
                                    const TypeSequence& seq, bool transversal_annotated,
                                    const Tolerances& tol);

} // namespace exitmap
