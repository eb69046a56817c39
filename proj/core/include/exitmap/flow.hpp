#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "exitmap/config.hpp"
#include "exitmap/vec2.hpp"

namespace exitmap {

enum class EvalStatus { Ok, OutOfDomain, IntegratorFailure };

struct FlowEval {
    EvalStatus status = EvalStatus::Ok;
    Vec2 value{};
    bool ok() const { return status == EvalStatus::Ok; }
};

enum class FlowKind { ClosedForm, VectorField, Rotation, Conjugated, Moebius, Realization };

/// Marches along one orbit. The cursor exposes a window [t0, t1] (t1 < t0 when
/// marching backward) inside which sample() provides dense evaluation; event
/// detectors choose their own membership-sampling resolution within windows.
class OrbitCursor {
public:
    virtual ~OrbitCursor() = default;
    virtual bool advance() = 0;            // extend the window by one step
    virtual double t0() const = 0;         // window edge closer to 0
    virtual double t1() const = 0;         // window edge farther from 0
    virtual FlowEval sample(double t) = 0; // t between t0 and t1
    virtual EvalStatus status() const = 0; // reason advance() failed
};

class FlowImpl;

/// Immutable handle to a planar flow (possibly a local flow whose evaluation
/// reports OutOfDomain past the per-orbit time domain).
class Flow {
public:
    Flow() = default;
    explicit Flow(std::shared_ptr<const FlowImpl> impl) : impl_(std::move(impl)) {}

    bool valid() const { return impl_ != nullptr; }
    FlowEval at(double t, Vec2 x) const;
    std::unique_ptr<OrbitCursor> orbit(Vec2 x, double direction = +1.0) const;
    FlowKind kind() const;
    const std::string& name() const;
    bool has_field() const;
    Vec2 field(Vec2 x) const; // generating vector field, when attached

private:
    std::shared_ptr<const FlowImpl> impl_;
};

struct Homeomorphism2D {
    std::function<Vec2(Vec2)> fwd;
    std::function<Vec2(Vec2)> inv;
    std::string tag;

    Vec2 operator()(Vec2 p) const { return fwd(p); }
    Vec2 inverse(Vec2 p) const { return inv(p); }
};

Homeomorphism2D identity_homeomorphism();
Homeomorphism2D compose(const Homeomorphism2D& outer, const Homeomorphism2D& inner);

struct ProbeGrid {
    Vec2 lo{-2.0, -2.0};
    Vec2 hi{2.0, 2.0};
    int nx = 9;
    int ny = 9;
    std::vector<Vec2> points() const;
};

/// Max over the grid of |inv(fwd(p)) - p| and |fwd(inv(p)) - p|.
double inverse_consistency(const Homeomorphism2D& h, const ProbeGrid& grid);

using FlowFormula = std::function<Vec2(double, Vec2)>;
using VectorField = std::function<Vec2(Vec2)>;

Flow make_closed_form(std::string name, FlowFormula formula, VectorField field = {});
Flow make_vector_field_flow(std::string name, VectorField field, const Tolerances& tol = {});
Flow make_rotation(double angular_speed);

/// Flow satisfying eval(t, h(x)) = h(eval(flow, t, x)). Throws
/// std::invalid_argument when h fails inverse consistency on the probe grid.
Flow conjugate_flow(const Flow& flow, const Homeomorphism2D& h,
                    const ProbeGrid& grid = {}, const Tolerances& tol = {});

struct GroupLawProbe {
    double s = 0.0;
    double t = 0.0;
    Vec2 x{};
};

struct ResidualReport {
    double max_residual = 0.0;
    int evaluated = 0;
    int skipped = 0; // probes with any OutOfDomain/failed evaluation
};

/// max over probes of |Phi(s+t,x) - Phi(s, Phi(t,x))|.
ResidualReport group_law_residual(const Flow& flow, std::span<const GroupLawProbe> probes);

/// max over points of |Phi(0,x) - x|.
ResidualReport identity_residual(const Flow& flow, std::span<const Vec2> points);

} // namespace exitmap
