#include "exitmap/realization.hpp"

#include <cmath>
#include <stdexcept>

#include "exitmap/detail/flow_impl.hpp"

namespace exitmap {

MapSpec neg_map_spec() {
    return {"neg", [](double x) { return x >= 0.0 ? x : -x; },
            [](double y) { return -y; }};
}

MapSpec square_map_spec() {
    return {"square", [](double x) { return x >= 0.0 ? x : x * x; },
            [](double y) { return -std::sqrt(y); }};
}

MapSpec scaled_neg_map_spec(double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("scaled_neg_map_spec: mu must be positive");
    return {"scaled_neg", [mu](double x) { return x >= 0.0 ? x : -mu * x; },
            [mu](double y) { return -y / mu; }};
}

MapSpec tabulated_map_spec(std::vector<double> xs, std::vector<double> values) {
    if (xs.size() != values.size() || xs.size() < 2)
        throw std::invalid_argument("tabulated_map_spec: need matching sample arrays (>= 2)");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw std::invalid_argument("tabulated_map_spec: sample abscissae must increase");
    auto P = [xs = std::move(xs), values = std::move(values)](double x) -> double {
        if (x >= xs.back()) return x >= 0.0 ? x : values.back();
        std::size_t i = 0;
        if (x <= xs.front()) {
            double slope = (values[1] - values[0]) / (xs[1] - xs[0]);
            return values[0] + slope * (x - xs[0]);
        }
        while (i + 2 < xs.size() && xs[i + 1] <= x) ++i;
        double f = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return (1.0 - f) * values[i] + f * values[i + 1];
    };
    return {"tabulated", P, {}};
}

SpecEvidence validate_halfplane_spec(const MapSpec& spec, double probe_max, int n) {
    SpecEvidence ev;
    auto fail = [&](const std::string& msg) {
        ev.ok = false;
        ev.failures.push_back(msg);
    };
    if (std::abs(spec.P(0.0)) > 1e-12) fail("P(0) != 0");
    for (int i = 0; i <= n; ++i) {
        double x = probe_max * i / n;
        if (std::abs(spec.P(x) - x) > 1e-9)
            fail("not identity at x=" + std::to_string(x) + " (P=" + std::to_string(spec.P(x)) +
                 ")");
    }
    double prev = spec.P(0.0);
    for (int i = 1; i <= n; ++i) {
        double x = -probe_max * i / n;
        double v = spec.P(x);
        if (!(v > prev)) fail("not strictly decreasing at x=" + std::to_string(x));
        if (v < -1e-12) fail("negative value at x=" + std::to_string(x));
        prev = v;
    }
    // range must cover [0, probe_max]
    double b = 1.0;
    while (b < 1e9 && spec.P(-b) < probe_max) b *= 2.0;
    if (spec.P(-b) < probe_max) fail("range does not cover [0, probe_max]");
    return ev;
}

namespace {

double numeric_inv_neg(const std::function<double(double)>& P, double y) {
    // strictly decreasing on (-inf, 0] with P(0) = 0: bracket and bisect
    if (y <= 0.0) return 0.0;
    double b = 1.0;
    while (P(-b) < y) {
        b *= 2.0;
        if (b > 1e300) throw std::runtime_error("inverse bracket growth failed");
    }
    double lo = -b, hi = 0.0; // P(lo) >= y >= P(hi)
    for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, -lo); ++i) {
        double mid = 0.5 * (lo + hi);
        (P(mid) >= y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

struct HalfplaneRealization::Impl {
    MapSpec spec;

    double rho(double r, double theta) const {
        double f = std::abs(theta) / M_PI; // 0 at the positive axis, 1 at the negative
        return (1.0 - f) * spec.P(-r) + f * r;
    }
    double radius_from(double rho_target, double theta) const {
        if (rho_target <= 0.0) return 0.0;
        double hi = std::max(rho_target, 1.0);
        while (rho(hi, theta) < rho_target) {
            hi *= 2.0;
            if (hi > 1e300) throw std::runtime_error("radial bracket growth failed");
        }
        double lo = 0.0;
        for (int i = 0; i < 200 && hi - lo > 1e-10 * std::max(1.0, hi); ++i) {
            double mid = 0.5 * (lo + hi);
            (rho(mid, theta) < rho_target ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
    double inv_neg(double y) const {
        if (spec.P_inv_neg) return spec.P_inv_neg(y);
        return numeric_inv_neg(spec.P, y);
    }
};

namespace {

double wrap_pi(double a) { // into (-pi, pi]
    a = std::fmod(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

class RealizedFlowImpl final : public FlowImpl {
public:
    RealizedFlowImpl(std::shared_ptr<const HalfplaneRealization::Impl> impl, std::string name)
        : impl_(std::move(impl)), name_(std::move(name)) {}

    FlowEval at(double t, Vec2 p) const override {
        double rho = p.norm();
        if (rho == 0.0) return {EvalStatus::Ok, {0.0, 0.0}};
        double theta = p.angle();
        double r = impl_->radius_from(rho, theta);
        double theta2 = wrap_pi(theta + M_PI * t);
        return detail::checked_value(from_polar(impl_->rho(r, theta2), theta2));
    }
    std::unique_ptr<OrbitCursor> orbit(Vec2 x, double dir) const override {
        return std::make_unique<detail::DirectCursor>(this, x, dir);
    }
    FlowKind kind() const override { return FlowKind::Realization; }
    const std::string& name() const override { return name_; }

private:
    std::shared_ptr<const HalfplaneRealization::Impl> impl_;
    std::string name_;
};

} // namespace

HalfplaneRealization::HalfplaneRealization(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)),
      flow_(Flow(std::make_shared<RealizedFlowImpl>(impl_, "realized(" + impl_->spec.name + ")"))),
      spec_(impl_->spec) {}

Vec2 HalfplaneRealization::reshape(Vec2 p) const {
    double r = p.norm();
    if (r == 0.0) return {0.0, 0.0};
    double theta = p.angle();
    return from_polar(impl_->rho(r, theta), theta);
}

Vec2 HalfplaneRealization::reshape_inverse(Vec2 p) const {
    double rho = p.norm();
    if (rho == 0.0) return {0.0, 0.0};
    double theta = p.angle();
    return from_polar(impl_->radius_from(rho, theta), theta);
}

double HalfplaneRealization::orbit_radius(double r0, double theta) const {
    return impl_->rho(r0, theta);
}

double HalfplaneRealization::P(double x) const { return impl_->spec.P(x); }
double HalfplaneRealization::P_inv_neg(double y) const { return impl_->inv_neg(y); }

HalfplaneRealization build_halfplane_realization(const MapSpec& spec, const Tolerances&) {
    SpecEvidence ev = validate_halfplane_spec(spec);
    if (!ev.ok) {
        std::string msg = "build_halfplane_realization: spec hypotheses fail:";
        for (const auto& f : ev.failures) msg += " " + f + ";";
        throw std::invalid_argument(msg);
    }
    auto impl = std::make_shared<HalfplaneRealization::Impl>();
    impl->spec = spec;
    return HalfplaneRealization(std::move(impl));
}

RealizationReport verify_realization(const HalfplaneRealization& rf, std::span<const double> xs,
                                     double horizon, const Tolerances& tol) {
    RealizationReport rep;
    Region lower = make_halfplane_region(HalfplaneSide::Lower);
    for (double x : xs) {
        ExitOutcome out = first_out(rf.flow(), lower, {x, 0.0}, horizon, tol);
        RealizationReport::Row row{x, 0.0, out.time, out.status};
        if (out.status != MapStatus::Defined) {
            ++rep.undefined;
        } else {
            row.error = dist(out.point, {rf.P(x), 0.0});
            rep.max_point_error = std::max(rep.max_point_error, row.error);
            if (x < 0.0)
                rep.max_time_error = std::max(rep.max_time_error, std::abs(out.time - 1.0));
        }
        rep.rows.push_back(row);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// disc realization

CircleMapSpec circle_map_from_halfplane(const MapSpec& spec) {
    MoebiusMap M = disc_to_lower_halfplane();
    MoebiusMap Minv = M.inverse();
    auto P = [spec, M, Minv](double t) -> double {
        // identity arc maps to itself without numerical detours
        if (t <= 0.5) return t;
        std::complex<double> z = std::exp(std::complex<double>(0.0, 2.0 * M_PI * t));
        double x = M.apply(z).real();
        double y = spec.P(x);
        std::complex<double> w = Minv.apply(std::complex<double>(y, 0.0));
        double s = std::arg(w) / (2.0 * M_PI);
        if (s < 0.0) s += 1.0;
        return s;
    };
    return {"circle(" + spec.name + ")", P, 0.5};
}

namespace {

// piecewise-linear homeomorphism of [0,1] with h(alpha) = 1/2
std::pair<std::function<double(double)>, std::function<double(double)>> pin_half(double alpha) {
    auto fwd = [alpha](double s) {
        return s <= alpha ? 0.5 * s / alpha : 0.5 + 0.5 * (s - alpha) / (1.0 - alpha);
    };
    auto inv = [alpha](double s) {
        return s <= 0.5 ? 2.0 * s * alpha : alpha + (2.0 * s - 1.0) * (1.0 - alpha);
    };
    return {fwd, inv};
}

} // namespace

CircleMapSpec with_maximum_at(const CircleMapSpec& spec, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("with_maximum_at: alpha must lie in (0,1)");
    if (spec.alpha != 0.5)
        throw std::invalid_argument("with_maximum_at: expects a spec with maximum at 1/2");
    auto [h_fwd, h_inv] = pin_half(alpha);
    auto P = [base = spec.P, h_fwd, h_inv](double t) { return h_inv(base(h_fwd(t))); };
    return {spec.name + "@" + std::to_string(alpha), P, alpha};
}

DiscRealization build_disc_realization(const CircleMapSpec& spec, const Tolerances& tol) {
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
        throw std::invalid_argument("build_disc_realization: alpha must lie in (0,1)");
    // hypothesis probes: identity on [0, alpha], decreasing after, wraps to 0
    for (int i = 0; i <= 32; ++i) {
        double s = spec.alpha * i / 32.0;
        if (std::abs(spec.P(s) - s) > 1e-9)
            throw std::invalid_argument("build_disc_realization: not identity on [0, alpha]");
    }
    double prev = spec.P(spec.alpha);
    for (int i = 1; i <= 32; ++i) {
        double s = spec.alpha + (1.0 - spec.alpha) * i / 32.0 * (1.0 - 1e-9);
        double v = spec.P(s);
        if (!(v < prev + 1e-12))
            throw std::invalid_argument("build_disc_realization: not decreasing past alpha");
        prev = v;
    }

    // move the maximum to 1/2 for the core construction
    CircleMapSpec base = spec;
    std::function<double(double)> k_fwd, k_inv;
    bool reparam = std::abs(spec.alpha - 0.5) > 1e-15;
    if (reparam) {
        auto [h_fwd, h_inv] = pin_half(spec.alpha);
        base.P = [P = spec.P, h_fwd, h_inv](double t) { return h_fwd(P(h_inv(t))); };
        base.alpha = 0.5;
        k_fwd = h_fwd;
        k_inv = h_inv;
    }

    MoebiusMap M = disc_to_lower_halfplane();
    MoebiusMap Minv = M.inverse();

    // transport the circle map to the real line
    auto Q = [P = base.P, M, Minv](double x) -> double {
        if (x >= 0.0) return x;
        std::complex<double> z = Minv.apply(std::complex<double>(x, 0.0));
        double t = std::arg(z) / (2.0 * M_PI);
        if (t < 0.0) t += 1.0;
        double pt = P(t);
        std::complex<double> w = std::exp(std::complex<double>(0.0, 2.0 * M_PI * pt));
        return M.apply(w).real();
    };
    HalfplaneRealization half =
        build_halfplane_realization({"line(" + spec.name + ")", Q, {}}, tol);

    Flow disc_flow = moebius_conjugate(half.flow(), Minv, tol);

    if (reparam) {
        // angular reparametrization K(r e^{2 pi i s}) = r e^{2 pi i k(s)};
        // the final flow is K^{-1} after the core flow after K
        auto angle_map = [](const std::function<double(double)>& k, Vec2 p) -> Vec2 {
            double r = p.norm();
            if (r == 0.0) return {0.0, 0.0};
            double s = std::atan2(p.y, p.x) / (2.0 * M_PI);
            if (s < 0.0) s += 1.0;
            return from_polar(r, 2.0 * M_PI * k(s));
        };
        Homeomorphism2D Kinv{[k_inv, angle_map](Vec2 p) { return angle_map(k_inv, p); },
                             [k_fwd, angle_map](Vec2 p) { return angle_map(k_fwd, p); },
                             "angle_reparam"};
        disc_flow = conjugate_flow(disc_flow, Kinv, ProbeGrid{}, tol);
    }
    return {disc_flow, spec, M};
}

} // namespace exitmap
