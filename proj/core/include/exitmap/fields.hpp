#pragma once

// Built-in vector fields and the canonical closed-form flows used by the
// scenario registry. Closed forms carry their generating field when one
// exists, so integrator cross-checks stay possible.

#include <vector>

#include "exitmap/flow.hpp"

namespace exitmap {

VectorField linear_field(double a, double b, double c, double d); // v = [[a,b],[c,d]] x

/// v(x, y) = [[-lambda, -mu], [mu, -lambda]] (x, y - p): spiral focus at (0, p).
VectorField affine_focus_field(double lambda, double mu, double p);

/// Free fall in (velocity, height) coordinates: d(u, h)/dt = (-g, u).
VectorField gravity_field(double g);

/// v_x = sum cx[i][j] x^i y^j, v_y likewise.
VectorField polynomial_field(const std::vector<std::vector<double>>& cx,
                             const std::vector<std::vector<double>>& cy);

/// Newton-cooling pair in (water, stone) temperatures:
/// Tw' = gamma (Ts - Tw) - beta (Tw - Tr), Ts' = -alpha (Ts - Tw).
VectorField cooling_field(double alpha, double beta, double gamma, double t_room);

// canonical closed-form flows

Flow saddle_flow();                 // (x e^t, y e^-t), field (x, -y)
Flow source_flow();                 // (x e^t, y e^t)
Flow sink_flow();                   // (x e^-t, y e^-t)
Flow affine_focus_flow(double lambda, double mu, double p);
Flow gravity_flow(double g);        // closed form of gravity_field
Flow translation_flow();            // (x + t, y)

/// x sin(1/x), continuously extended by 0: the shear profile whose graph the
/// translation flow is conjugated along in the oscillating-switching example.
double comsin_profile(double x);

/// Shear (x, y) -> (x, y + comsin_profile(x)); conjugating translation_flow by
/// it produces a flow whose switching times on the axis are not well-ordered.
Homeomorphism2D comsin_shear();

} // namespace exitmap
