#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "exitmap/first_maps.hpp"
#include "exitmap/flow.hpp"
#include "exitmap/moebius.hpp"

namespace exitmap {

/// A map to realize as the first-out map of the lower half-plane:
/// continuous, P(0) = 0, identity on [0, inf), strictly decreasing on
/// (-inf, 0] with range [0, inf) (two-to-one except at 0).
struct MapSpec {
    std::string name;
    std::function<double(double)> P;
    std::function<double(double)> P_inv_neg; // optional negative-branch inverse
};

MapSpec neg_map_spec();                 // P(x) = -x
MapSpec square_map_spec();              // P(x) = x^2 for x <= 0, identity above
MapSpec scaled_neg_map_spec(double mu); // P(x) = -mu x below 0, identity above

/// Piecewise-linear interpolation through sorted sample pairs; identity to
/// the right of the sampled range, end-slope extrapolation to the left.
MapSpec tabulated_map_spec(std::vector<double> xs, std::vector<double> values);

struct SpecEvidence {
    bool ok = true;
    std::vector<std::string> failures;
};

/// Probes the hypotheses on a grid: P(0) = 0, identity on [0, probe_max],
/// strict decrease on [-probe_max, 0], range covering [0, probe_max].
SpecEvidence validate_halfplane_spec(const MapSpec& spec, double probe_max = 6.0, int n = 48);

/// Flow built from a prescribed map P so that the first-out map of the lower
/// half-plane is x -> (P(x), 0): a half-turn rotation conjugated by the radial
/// reshaping H(r, theta) = rho(r, theta) (cos theta, sin theta) with
/// rho = (1 - |theta|/pi) P(-r) + (|theta|/pi) r. Orbits are the closed curves
/// rho(r0, .), and every exit from the half-plane takes time exactly 1.
class HalfplaneRealization {
public:
    const Flow& flow() const { return flow_; }
    const MapSpec& spec() const { return spec_; }

    Vec2 reshape(Vec2 p) const;         // H
    Vec2 reshape_inverse(Vec2 p) const; // H^{-1}, by bracketed radial root-finding
    double orbit_radius(double r0, double theta) const; // gamma_{r0}
    double P(double x) const;
    double P_inv_neg(double y) const;   // negative branch, numeric when not supplied

    struct Impl;
    explicit HalfplaneRealization(std::shared_ptr<const Impl> impl);

private:
    std::shared_ptr<const Impl> impl_;
    Flow flow_;
    MapSpec spec_;
};

/// Throws std::invalid_argument when the spec evidence fails.
HalfplaneRealization build_halfplane_realization(const MapSpec& spec, const Tolerances& tol = {});

struct RealizationReport {
    double max_point_error = 0.0; // |E(x,0) - (P(x),0)| over samples
    double max_time_error = 0.0;  // |T - 1| over samples with x < 0
    int undefined = 0;            // samples whose exit query did not resolve
    struct Row {
        double x, error, time;
        MapStatus status;
    };
    std::vector<Row> rows;
};

/// Round-trip check: run the generic first-out machinery on the constructed
/// flow and compare against the prescribed map.
RealizationReport verify_realization(const HalfplaneRealization& rf, std::span<const double> xs,
                                     double horizon, const Tolerances& tol);

/// A circle map to realize as F_E on the unit disc: continuous, unimodal with
/// the maximum at alpha, identity on [0, alpha], decreasing to 0 at 1.
struct CircleMapSpec {
    std::string name;
    std::function<double(double)> P; // [0,1) -> [0,1)
    double alpha = 0.5;
};

/// Induce a circle map from a half-plane map spec through the standard
/// Moebius identification (maximum lands at alpha = 1/2).
CircleMapSpec circle_map_from_halfplane(const MapSpec& spec);

/// Reparametrize a circle map by the piecewise-linear homeomorphism moving
/// its maximum from 1/2 to alpha.
CircleMapSpec with_maximum_at(const CircleMapSpec& spec, double alpha);

struct DiscRealization {
    Flow flow;            // planar (local) flow whose F_E on the unit circle is the spec
    CircleMapSpec spec;
    MoebiusMap to_halfplane;
};

/// Composition: reparametrize the maximum to 1/2, transport the circle map to
/// the real line through M(z) = i(z+1)/(z-1), build the half-plane
/// realization, and conjugate back (Moebius, then the angular
/// reparametrization). Throws on hypothesis violations.
DiscRealization build_disc_realization(const CircleMapSpec& spec, const Tolerances& tol = {});

} // namespace exitmap
