#pragma once

#include <string>
#include <vector>

#include "exitmap/config.hpp"
#include "exitmap/flow.hpp"
#include "exitmap/region.hpp"

namespace exitmap {

/// Undefined is always horizon-relative: the orbit stayed put for the whole
/// certification window, nothing more.
enum class MapStatus { Defined, Undefined, Unresolved };
const char* to_string(MapStatus s);

struct LadderProbe {
    double delta = 0.0;
    Locate loc = Locate::Boundary;
};

struct ExitOutcome {
    MapStatus status = MapStatus::Unresolved;
    double time = 0.0; // exit time (0 for immediate exits decided by the ladder)
    Vec2 point{};      // exit point, on the boundary within tolerance
    double horizon = 0.0;
    int grazes = 0;    // boundary touches discarded while marching
    std::vector<LadderProbe> ladder;
    std::string note;

    bool defined() const { return status == MapStatus::Defined; }
    bool fixed(double tol = 1e-8) const { return defined() && time <= tol; }
};

/// First-out query for the open set A: T = inf{t > 0 : orbit leaves A}.
/// x must lie on the boundary of A (within tolerance) or inside A.
/// Immediate exit (T = 0) is decided by a geometric zero-time probe ladder;
/// positive exit times by marching membership samples and bisecting the first
/// inside -> not-inside bracket down to the time tolerance.
ExitOutcome exit_time(const Flow& flow, const Region& A, Vec2 x, double horizon,
                      const Tolerances& tol);

inline ExitOutcome first_out(const Flow& flow, const Region& A, Vec2 x, double horizon,
                             const Tolerances& tol) {
    return exit_time(flow, A, x, horizon, tol);
}

/// First-in query for the closure of A, computed through the duality
/// R_{closure A} = E_{complement of closure A}.
ExitOutcome first_in(const Flow& flow, const Region& A, Vec2 x, double horizon,
                     const Tolerances& tol);

enum class BoundaryType { A1, A2, A3, B, C, Unresolved };
const char* to_string(BoundaryType t);

struct Classification {
    BoundaryType type = BoundaryType::Unresolved;
    ExitOutcome exit; // E_A
    ExitOutcome ret;  // R_{closure A}
    bool exit_fixed = false;
    bool ret_fixed = false;
    double horizon = 0.0;
    std::string note;
};

/// Five-type taxonomy of a boundary point:
///   A-1 launching:       E(x) = x, R(x) != x
///   A-2 diving:          E(x) != x, R(x) = x
///   A-3 tangency:        E(x) = x, R(x) = x
///   B   never-to-return: R undefined (within horizon)
///   C   never-to-leave:  E undefined (within horizon)
/// At least one of E(x) = x, R(x) = x must hold for a regular open set;
/// violations and probe ambiguities downgrade to Unresolved with diagnostics.
Classification classify_boundary_point(const Flow& flow, const Region& A, Vec2 x,
                                       double horizon, const Tolerances& tol);

/// True when the forward orbit of x enters the *open* set A within the horizon.
bool orbit_enters_open(const Flow& flow, const Region& A, Vec2 x, double horizon,
                       const Tolerances& tol);

/// Zero-time behavior of the forward orbit of a boundary point, from the
/// probe ladder alone: does it enter A, leave the closure, ride the boundary,
/// or alternate too much to tell.
enum class ImmediateSide { Enters, Leaves, Rides, Ambiguous };
ImmediateSide immediate_side(const Flow& flow, const Region& A, Vec2 x, const Tolerances& tol);

struct InvarianceVerdict {
    bool all_B = false;                 // every classified boundary sample is type B
    bool boundary_never_enters = false; // no boundary orbit enters open A (within horizon)
    bool backward_invariant = false;    // direct test on interior samples
    bool consistent = false;            // backward_invariant == boundary_never_enters
    int unresolved = 0;
    std::string note;                   // e.g. "invariant, not via type B"
};

/// Compares the all-boundary-type-B criterion against a direct sampled
/// backward-invariance test. `anchor` must be an interior point; interior
/// samples are blends of boundary samples toward it.
InvarianceVerdict check_backward_invariance(const Flow& flow, const BoundedRegion& br,
                                            Vec2 anchor, int n_samples, double horizon,
                                            const Tolerances& tol);

/// Uniform parameter samples: n equally spaced values, [0,1) for circle
/// domains (endpoint excluded), [lo, hi] inclusive for line domains.
std::vector<double> uniform_params(const Boundary& b, int n);

} // namespace exitmap
