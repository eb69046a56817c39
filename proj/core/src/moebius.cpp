#include "exitmap/moebius.hpp"

#include <cmath>
#include <stdexcept>

#include "exitmap/detail/flow_impl.hpp"

namespace exitmap {

MoebiusMap disc_to_lower_halfplane() {
    using namespace std::complex_literals;
    return {1.0i, 1.0i, 1.0, -1.0};
}

namespace {

using detail::checked_value;

class MoebiusFlow final : public FlowImpl {
public:
    MoebiusFlow(Flow inner, MoebiusMap m, const Tolerances& tol)
        : inner_(std::move(inner)), m_(m), minv_(m.inverse()), tol_(tol),
          name_("moebius(" + inner_.name() + ")") {}

    FlowEval at(double t, Vec2 w) const override {
        std::complex<double> wz(w.x, w.y);
        if (!m_.fixes_infinity()) {
            // w = M(infinity): infinity is fixed by the extended inner flow
            if (std::abs(wz - m_.image_of_infinity()) <= tol_.pole) return {EvalStatus::Ok, w};
            if (std::abs(minv_.c * wz + minv_.d) <= tol_.pole) return {EvalStatus::OutOfDomain, {}};
        }
        std::complex<double> z = minv_.apply(wz);
        FlowEval e = inner_.at(t, Vec2{z.real(), z.imag()});
        if (!e.ok()) return e;
        std::complex<double> y(e.value.x, e.value.y);
        if (!m_.fixes_infinity() && std::abs(m_.c * y + m_.d) <= tol_.pole)
            return {EvalStatus::OutOfDomain, {}}; // orbit reached the pole of M
        std::complex<double> img = m_.apply(y);
        return checked_value(Vec2{img.real(), img.imag()});
    }

    std::unique_ptr<OrbitCursor> orbit(Vec2 w, double dir) const override {
        return std::make_unique<detail::DirectCursor>(this, w, dir);
    }
    FlowKind kind() const override { return FlowKind::Moebius; }
    const std::string& name() const override { return name_; }

private:
    Flow inner_;
    MoebiusMap m_;
    MoebiusMap minv_;
    Tolerances tol_;
    std::string name_;
};

} // namespace

bool moebius_conjugate_is_global(const Flow& flow, const MoebiusMap& M, const Tolerances& tol) {
    if (M.fixes_infinity()) return true;
    auto p = M.pole();
    Vec2 pole{p.real(), p.imag()};
    for (double t : {0.37, 1.1, 2.9}) {
        FlowEval e = flow.at(t, pole);
        if (!e.ok() || dist(e.value, pole) > 1e3 * tol.eval) return false;
    }
    return true;
}

Flow moebius_conjugate(const Flow& flow, const MoebiusMap& M, const Tolerances& tol) {
    if (!M.invertible())
        throw std::invalid_argument("moebius_conjugate: singular coefficient matrix");
    return Flow(std::make_shared<MoebiusFlow>(flow, M, tol));
}

} // namespace exitmap
