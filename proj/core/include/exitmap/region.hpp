#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "exitmap/config.hpp"
#include "exitmap/flow.hpp"
#include "exitmap/moebius.hpp"
#include "exitmap/vec2.hpp"

namespace exitmap {

enum class Locate { Inside, Outside, Boundary };

/// Regular open planar set, given by a membership oracle and (usually) a
/// signed indicator g with g < 0 inside, g = 0 on the boundary, g > 0 outside.
/// Regularity (bd A = bd of closure) is asserted by the constructors, not
/// verified; the classification taxonomy depends on it.
class Region {
public:
    Region() = default;

    bool contains(Vec2 p) const;               // membership in the open set
    Locate locate(Vec2 p, double tol) const;   // tolerance-banded membership
    bool has_indicator() const;
    double indicator(Vec2 p) const;
    Region complement() const;                 // open exterior; same boundary when regular
    bool regular_asserted() const;
    const std::string& name() const;

    struct Data;
    explicit Region(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

private:
    std::shared_ptr<const Data> d_;
};

Region make_region(std::string name, std::function<bool(Vec2)> membership,
                   std::function<double(Vec2)> indicator = {}, bool regular_asserted = false);
Region make_disc_region(Vec2 center, double radius); // indicator |p-c|^2 - r^2; throws on r <= 0
enum class HalfplaneSide { Lower, Upper };
Region make_halfplane_region(HalfplaneSide side);    // indicator +-y
Region transform_region(const Region& r, const Homeomorphism2D& h);
Region moebius_region(const Region& r, const MoebiusMap& M, const Tolerances& tol = {});

/// Parametrized boundary curve. Circle domains use s in [0,1) with periodic
/// continuation; line domains use the x-style parameter directly (the stored
/// range only scopes sampling).
class Boundary {
public:
    enum class Domain { Circle, Line };

    Boundary() = default;

    Domain domain() const;
    Vec2 at(double s) const;
    double lo() const; // sampling range
    double hi() const;

    /// Inverse parametrization: coarse scan (1024 samples) over the range,
    /// golden-section refinement of distance, then parabolic polish. Returns
    /// nullopt when p is farther than max_distance from the curve. Boundaries
    /// with an analytic inverse (canonical lines) use it directly.
    std::optional<double> param_of(Vec2 p, double max_distance = 1e-4) const;

    /// |s1 - s2| with wraparound on circle domains.
    double param_distance(double s1, double s2) const;
    double wrap(double s) const; // reduce into [0,1) on circle domains

    struct Data;
    explicit Boundary(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

private:
    std::shared_ptr<const Data> d_;
};

Boundary make_circle_boundary(Vec2 center, double radius); // c(t) = center + r(cos 2 pi t, sin 2 pi t)
Boundary make_line_boundary(double lo, double hi);         // c(s) = (s, 0)
Boundary transform_boundary(const Boundary& b, const Homeomorphism2D& h);

struct BoundedRegion {
    Region region;
    Boundary boundary;
};

BoundedRegion make_disc(Vec2 center, double radius);
BoundedRegion make_halfplane(HalfplaneSide side, double lo = -3.0, double hi = 3.0);
BoundedRegion transform(const BoundedRegion& br, const Homeomorphism2D& h);

} // namespace exitmap
