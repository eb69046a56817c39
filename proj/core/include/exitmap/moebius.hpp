#pragma once

#include <complex>

#include "exitmap/flow.hpp"
#include "exitmap/vec2.hpp"

namespace exitmap {

/// Moebius transformation z -> (a z + b) / (c z + d), ad - bc != 0.
/// Composition corresponds to the product of coefficient matrices.
struct MoebiusMap {
    std::complex<double> a{1.0}, b{0.0}, c{0.0}, d{1.0};

    static MoebiusMap identity() { return {}; }

    std::complex<double> det() const { return a * d - b * c; }
    bool invertible(double tol = 1e-12) const { return std::abs(det()) > tol; }
    MoebiusMap inverse() const { return {d, -b, -c, a}; }
    MoebiusMap compose(const MoebiusMap& o) const { // this after o
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }

    bool fixes_infinity(double tol = 1e-14) const { return std::abs(c) <= tol; }
    std::complex<double> pole() const { return -d / c; }              // maps to infinity
    std::complex<double> image_of_infinity() const { return a / c; }

    std::complex<double> apply(std::complex<double> z) const { return (a * z + b) / (c * z + d); }
    Vec2 apply(Vec2 p) const {
        auto w = apply(std::complex<double>(p.x, p.y));
        return {w.real(), w.imag()};
    }
};

/// M(z) = i (z + 1) / (z - 1): maps -1 -> 0, 1 -> infinity, and the open unit
/// disc onto the lower half-plane.
MoebiusMap disc_to_lower_halfplane();

/// Planar flow Psi with Psi(t, M(z)) = M(Phi(t, z)), using the one-point
/// compactification convention: the plane flow is extended with infinity
/// fixed, so M(infinity) is an equilibrium of the result. When the pole of M
/// is not an equilibrium of `flow`, the result is a local flow (the orbit
/// through the pole escapes through infinity) and evaluations near it report
/// OutOfDomain. Throws std::invalid_argument when M is singular.
Flow moebius_conjugate(const Flow& flow, const MoebiusMap& M, const Tolerances& tol = {});

/// True when the pole of M is (numerically) an equilibrium of the flow, i.e.
/// the conjugated flow is a global planar flow rather than a local one.
bool moebius_conjugate_is_global(const Flow& flow, const MoebiusMap& M, const Tolerances& tol = {});

} // namespace exitmap
