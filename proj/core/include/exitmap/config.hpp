#pragma once

namespace exitmap {

/// All numeric tolerances and probe parameters, in one record.
/// "Equal" anywhere in this library means equal within one of these.
struct Tolerances {
    // flow evaluation
    double integ_rel = 1e-10;     // integrator relative tolerance
    double integ_abs = 1e-12;     // integrator absolute tolerance
    double eval = 1e-8;           // point-identity comparisons between flows

    // geometry
    double boundary = 1e-9;       // |indicator| band classified as boundary
    double param = 1e-9;          // boundary-parameter comparisons
    double pole = 1e-12;          // Moebius pole proximity

    // event detection
    double time = 1e-9;           // event-time bisection width
    double ladder_base = 1e-2;    // zero-time probe ladder: base * ratio^k
    double ladder_ratio = 0.25;
    int ladder_steps = 13;        // k = 0 .. ladder_steps-1
    double march_dt = 1e-2;       // membership sampling step while marching
    double horizon = 100.0;       // default certification horizon

    // derived-map analysis
    double fixed_point = 1e-6;    // |F(s)-s| below this counts as fixed
    double value_merge = 1e-6;    // parameter-space merging in the two-to-one check
    double jump_factor = 10.0;    // jump > factor * local spacing marks a discontinuity
    int discontinuity_collar = 3; // samples skipped around a discontinuity mark
};

} // namespace exitmap
