#include "exitmap/flow.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

#include "exitmap/detail/flow_impl.hpp"

namespace exitmap {

FlowEval Flow::at(double t, Vec2 x) const { return impl_->at(t, x); }
std::unique_ptr<OrbitCursor> Flow::orbit(Vec2 x, double direction) const {
    return impl_->orbit(x, direction);
}
FlowKind Flow::kind() const { return impl_->kind(); }
const std::string& Flow::name() const { return impl_->name(); }
bool Flow::has_field() const { return impl_->has_field(); }
Vec2 Flow::field(Vec2 x) const { return impl_->field(x); }

namespace {

using detail::checked_value;
using detail::DirectCursor;

class ClosedFormFlow final : public FlowImpl {
public:
    ClosedFormFlow(std::string name, FlowFormula f, VectorField field, FlowKind kind)
        : name_(std::move(name)), f_(std::move(f)), field_(std::move(field)), kind_(kind) {}

    FlowEval at(double t, Vec2 x) const override { return checked_value(f_(t, x)); }
    std::unique_ptr<OrbitCursor> orbit(Vec2 x, double dir) const override {
        return std::make_unique<DirectCursor>(this, x, dir);
    }
    FlowKind kind() const override { return kind_; }
    const std::string& name() const override { return name_; }
    bool has_field() const override { return static_cast<bool>(field_); }
    Vec2 field(Vec2 x) const override {
        if (!field_) return FlowImpl::field(x);
        return field_(x);
    }

private:
    std::string name_;
    FlowFormula f_;
    VectorField field_;
    FlowKind kind_;
};

// ---------------------------------------------------------------------------
// vector-field flows (adaptive dopri5 with dense output)

namespace od = boost::numeric::odeint;
using State = std::array<double, 2>;
using DenseStepper = od::result_of::make_dense_output<od::runge_kutta_dopri5<State>>::type;

struct OdeSystem {
    const VectorField* field;
    void operator()(const State& s, State& ds, double) const {
        Vec2 v = (*field)(Vec2{s[0], s[1]});
        ds[0] = v.x;
        ds[1] = v.y;
    }
};

bool state_ok(const State& s) {
    return std::isfinite(s[0]) && std::isfinite(s[1]) &&
           s[0] * s[0] + s[1] * s[1] <= detail::kBlowupRadius * detail::kBlowupRadius;
}

class IntegratedCursor final : public OrbitCursor {
public:
    IntegratedCursor(const VectorField* field, Vec2 x, double dir, const Tolerances& tol)
        : field_(field),
          stepper_(od::make_dense_output(tol.integ_abs, tol.integ_rel,
                                         od::runge_kutta_dopri5<State>())) {
        State s{x.x, x.y};
        stepper_.initialize(s, 0.0, dir * 1e-4);
    }

    bool advance() override {
        if (status_ != EvalStatus::Ok) return false;
        try {
            auto range = stepper_.do_step(OdeSystem{field_});
            t0_ = range.first;
            t1_ = range.second;
        } catch (const std::exception&) {
            status_ = state_ok(stepper_.current_state()) ? EvalStatus::IntegratorFailure
                                                         : EvalStatus::OutOfDomain;
            return false;
        }
        if (!state_ok(stepper_.current_state())) {
            status_ = EvalStatus::OutOfDomain;
            return false;
        }
        return true;
    }
    double t0() const override { return t0_; }
    double t1() const override { return t1_; }
    FlowEval sample(double t) override {
        State s;
        stepper_.calc_state(t, s);
        if (!state_ok(s)) return {EvalStatus::OutOfDomain, Vec2{s[0], s[1]}};
        return {EvalStatus::Ok, Vec2{s[0], s[1]}};
    }
    EvalStatus status() const override { return status_; }

private:
    const VectorField* field_;
    DenseStepper stepper_;
    double t0_ = 0.0;
    double t1_ = 0.0;
    EvalStatus status_ = EvalStatus::Ok;
};

class VectorFieldFlow final : public FlowImpl {
public:
    VectorFieldFlow(std::string name, VectorField field, Tolerances tol)
        : name_(std::move(name)), field_(std::move(field)), tol_(tol) {}

    FlowEval at(double t, Vec2 x) const override {
        if (t == 0.0) return {EvalStatus::Ok, x};
        IntegratedCursor cur(&field_, x, t > 0 ? 1.0 : -1.0, tol_);
        while (std::abs(cur.t1()) < std::abs(t)) {
            if (!cur.advance()) return {cur.status(), Vec2{}};
        }
        return cur.sample(t);
    }
    std::unique_ptr<OrbitCursor> orbit(Vec2 x, double dir) const override {
        return std::make_unique<IntegratedCursor>(&field_, x, dir, tol_);
    }
    FlowKind kind() const override { return FlowKind::VectorField; }
    const std::string& name() const override { return name_; }
    bool has_field() const override { return true; }
    Vec2 field(Vec2 x) const override { return field_(x); }

private:
    std::string name_;
    VectorField field_;
    Tolerances tol_;
};

// ---------------------------------------------------------------------------
// conjugated flows: Psi(t, h(x)) = h(Phi(t, x))

class ConjugatedCursor final : public OrbitCursor {
public:
    ConjugatedCursor(std::unique_ptr<OrbitCursor> inner, const Homeomorphism2D* h)
        : inner_(std::move(inner)), h_(h) {}

    bool advance() override { return inner_->advance(); }
    double t0() const override { return inner_->t0(); }
    double t1() const override { return inner_->t1(); }
    FlowEval sample(double t) override {
        FlowEval e = inner_->sample(t);
        if (!e.ok()) return e;
        return checked_value(h_->fwd(e.value));
    }
    EvalStatus status() const override { return inner_->status(); }

private:
    std::unique_ptr<OrbitCursor> inner_;
    const Homeomorphism2D* h_;
};

class ConjugatedFlow final : public FlowImpl {
public:
    ConjugatedFlow(Flow inner, Homeomorphism2D h)
        : inner_(std::move(inner)), h_(std::move(h)),
          name_(h_.tag.empty() ? "conj(" + inner_.name() + ")"
                               : h_.tag + "(" + inner_.name() + ")") {}

    FlowEval at(double t, Vec2 y) const override {
        FlowEval e = inner_.at(t, h_.inv(y));
        if (!e.ok()) return e;
        return checked_value(h_.fwd(e.value));
    }
    std::unique_ptr<OrbitCursor> orbit(Vec2 y, double dir) const override {
        return std::make_unique<ConjugatedCursor>(inner_.orbit(h_.inv(y), dir), &h_);
    }
    FlowKind kind() const override { return FlowKind::Conjugated; }
    const std::string& name() const override { return name_; }

private:
    Flow inner_;
    Homeomorphism2D h_;
    std::string name_;
};

} // namespace

// ---------------------------------------------------------------------------

Flow make_closed_form(std::string name, FlowFormula formula, VectorField field) {
    return Flow(std::make_shared<ClosedFormFlow>(std::move(name), std::move(formula),
                                                 std::move(field), FlowKind::ClosedForm));
}

Flow make_vector_field_flow(std::string name, VectorField field, const Tolerances& tol) {
    return Flow(std::make_shared<VectorFieldFlow>(std::move(name), std::move(field), tol));
}

Flow make_rotation(double w) {
    auto formula = [w](double t, Vec2 p) -> Vec2 {
        double c = std::cos(w * t), s = std::sin(w * t);
        return {c * p.x - s * p.y, s * p.x + c * p.y};
    };
    auto field = [w](Vec2 p) -> Vec2 { return {-w * p.y, w * p.x}; };
    return Flow(std::make_shared<ClosedFormFlow>("rotation", formula, field, FlowKind::Rotation));
}

Flow conjugate_flow(const Flow& flow, const Homeomorphism2D& h,
                    const ProbeGrid& grid, const Tolerances& tol) {
    double res = inverse_consistency(h, grid);
    if (!(res <= 1e3 * tol.eval))
        throw std::invalid_argument(
            "conjugate_flow: homeomorphism fails inverse consistency, residual " +
            std::to_string(res));
    return Flow(std::make_shared<ConjugatedFlow>(flow, h));
}

Homeomorphism2D identity_homeomorphism() {
    auto id = [](Vec2 p) { return p; };
    return {id, id, "id"};
}

Homeomorphism2D compose(const Homeomorphism2D& outer, const Homeomorphism2D& inner) {
    Homeomorphism2D h;
    h.fwd = [o = outer.fwd, i = inner.fwd](Vec2 p) { return o(i(p)); };
    h.inv = [o = outer.inv, i = inner.inv](Vec2 p) { return i(o(p)); };
    h.tag = outer.tag + "*" + inner.tag;
    return h;
}

std::vector<Vec2> ProbeGrid::points() const {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(nx) * ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            double fx = nx > 1 ? static_cast<double>(i) / (nx - 1) : 0.5;
            double fy = ny > 1 ? static_cast<double>(j) / (ny - 1) : 0.5;
            pts.push_back({lo.x + fx * (hi.x - lo.x), lo.y + fy * (hi.y - lo.y)});
        }
    return pts;
}

double inverse_consistency(const Homeomorphism2D& h, const ProbeGrid& grid) {
    double worst = 0.0;
    for (Vec2 p : grid.points()) {
        worst = std::max(worst, dist(h.inv(h.fwd(p)), p));
        worst = std::max(worst, dist(h.fwd(h.inv(p)), p));
    }
    return worst;
}

ResidualReport group_law_residual(const Flow& flow, std::span<const GroupLawProbe> probes) {
    ResidualReport rep;
    for (const auto& pr : probes) {
        FlowEval inner = flow.at(pr.t, pr.x);
        FlowEval whole = flow.at(pr.s + pr.t, pr.x);
        FlowEval outer = inner.ok() ? flow.at(pr.s, inner.value) : inner;
        if (!inner.ok() || !whole.ok() || !outer.ok()) {
            ++rep.skipped;
            continue;
        }
        ++rep.evaluated;
        rep.max_residual = std::max(rep.max_residual, dist(whole.value, outer.value));
    }
    return rep;
}

ResidualReport identity_residual(const Flow& flow, std::span<const Vec2> points) {
    ResidualReport rep;
    for (Vec2 p : points) {
        FlowEval e = flow.at(0.0, p);
        if (!e.ok()) {
            ++rep.skipped;
            continue;
        }
        ++rep.evaluated;
        rep.max_residual = std::max(rep.max_residual, dist(e.value, p));
    }
    return rep;
}

} // namespace exitmap
