#pragma once

// Implementation surface shared by the flow constructors spread across the
// library (closed forms, Moebius conjugates, realization-built flows).

#include <memory>
#include <stdexcept>
#include <string>

#include "exitmap/flow.hpp"

namespace exitmap::detail {

constexpr double kBlowupRadius = 1e150; // past this the orbit has left every bounded set
constexpr double kDirectWindow = 0.5;   // pacing for cursors with cheap arbitrary-t eval

class FlowImplBase;

} // namespace exitmap::detail

namespace exitmap {

class FlowImpl {
public:
    virtual ~FlowImpl() = default;
    virtual FlowEval at(double t, Vec2 x) const = 0;
    virtual std::unique_ptr<OrbitCursor> orbit(Vec2 x, double direction) const = 0;
    virtual FlowKind kind() const = 0;
    virtual const std::string& name() const = 0;
    virtual bool has_field() const { return false; }
    virtual Vec2 field(Vec2) const { throw std::logic_error("flow has no attached vector field"); }
};

namespace detail {

inline FlowEval checked_value(Vec2 v) {
    if (!v.finite() || v.norm2() > kBlowupRadius * kBlowupRadius)
        return {EvalStatus::OutOfDomain, v};
    return {EvalStatus::Ok, v};
}

/// Cursor over any flow whose at() is valid for arbitrary t. The window is
/// pure pacing; sample() evaluates from the start point directly.
class DirectCursor final : public OrbitCursor {
public:
    DirectCursor(const FlowImpl* flow, Vec2 x, double dir, double window = kDirectWindow)
        : flow_(flow), x_(x), dir_(dir), window_(window) {}

    bool advance() override {
        if (status_ != EvalStatus::Ok) return false;
        double next = t1_ + dir_ * window_;
        FlowEval e = flow_->at(next, x_);
        if (!e.ok()) {
            status_ = e.status;
            return false;
        }
        t0_ = t1_;
        t1_ = next;
        return true;
    }
    double t0() const override { return t0_; }
    double t1() const override { return t1_; }
    FlowEval sample(double t) override { return flow_->at(t, x_); }
    EvalStatus status() const override { return status_; }

private:
    const FlowImpl* flow_;
    Vec2 x_;
    double dir_;
    double window_;
    double t0_ = 0.0;
    double t1_ = 0.0;
    EvalStatus status_ = EvalStatus::Ok;
};

} // namespace detail
} // namespace exitmap
