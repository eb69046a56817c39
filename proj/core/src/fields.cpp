#include "exitmap/fields.hpp"

#include <cmath>

namespace exitmap {

VectorField linear_field(double a, double b, double c, double d) {
    return [=](Vec2 p) -> Vec2 { return {a * p.x + b * p.y, c * p.x + d * p.y}; };
}

VectorField affine_focus_field(double lambda, double mu, double p) {
    return [=](Vec2 q) -> Vec2 {
        double w = q.y - p;
        return {-lambda * q.x - mu * w, mu * q.x - lambda * w};
    };
}

VectorField gravity_field(double g) {
    return [=](Vec2 q) -> Vec2 { return {-g, q.x}; };
}

VectorField polynomial_field(const std::vector<std::vector<double>>& cx,
                             const std::vector<std::vector<double>>& cy) {
    auto eval = [](const std::vector<std::vector<double>>& c, Vec2 p) {
        double acc = 0.0, xi = 1.0;
        for (const auto& row : c) {
            double yj = 1.0;
            for (double coeff : row) {
                acc += coeff * xi * yj;
                yj *= p.y;
            }
            xi *= p.x;
        }
        return acc;
    };
    return [=](Vec2 p) -> Vec2 { return {eval(cx, p), eval(cy, p)}; };
}

VectorField cooling_field(double alpha, double beta, double gamma, double t_room) {
    return [=](Vec2 q) -> Vec2 {
        double tw = q.x, ts = q.y;
        return {gamma * (ts - tw) - beta * (tw - t_room), -alpha * (ts - tw)};
    };
}

Flow saddle_flow() {
    return make_closed_form(
        "saddle",
        [](double t, Vec2 p) -> Vec2 { return {p.x * std::exp(t), p.y * std::exp(-t)}; },
        [](Vec2 p) -> Vec2 { return {p.x, -p.y}; });
}

Flow source_flow() {
    return make_closed_form(
        "source",
        [](double t, Vec2 p) -> Vec2 { return {p.x * std::exp(t), p.y * std::exp(t)}; },
        [](Vec2 p) -> Vec2 { return {p.x, p.y}; });
}

Flow sink_flow() {
    return make_closed_form(
        "sink",
        [](double t, Vec2 p) -> Vec2 { return {p.x * std::exp(-t), p.y * std::exp(-t)}; },
        [](Vec2 p) -> Vec2 { return {-p.x, -p.y}; });
}

Flow affine_focus_flow(double lambda, double mu, double p) {
    // relative to the focus (0, p): w(t) = e^{-lambda t} R(mu t) w(0)
    auto formula = [=](double t, Vec2 q) -> Vec2 {
        double wx = q.x, wy = q.y - p;
        double damp = std::exp(-lambda * t);
        double c = std::cos(mu * t), s = std::sin(mu * t);
        return {damp * (c * wx - s * wy), p + damp * (s * wx + c * wy)};
    };
    return make_closed_form("affine_focus", formula, affine_focus_field(lambda, mu, p));
}

Flow gravity_flow(double g) {
    auto formula = [=](double t, Vec2 q) -> Vec2 {
        return {q.x - g * t, q.y + q.x * t - 0.5 * g * t * t};
    };
    return make_closed_form("gravity", formula, gravity_field(g));
}

Flow translation_flow() {
    return make_closed_form(
        "translation", [](double t, Vec2 p) -> Vec2 { return {p.x + t, p.y}; },
        [](Vec2) -> Vec2 { return {1.0, 0.0}; });
}

double comsin_profile(double x) {
    if (x == 0.0) return 0.0;
    return x * std::sin(1.0 / x);
}

Homeomorphism2D comsin_shear() {
    return {[](Vec2 p) -> Vec2 { return {p.x, p.y + comsin_profile(p.x)}; },
            [](Vec2 p) -> Vec2 { return {p.x, p.y - comsin_profile(p.x)}; },
            "comsin_shear"};
}

} // namespace exitmap
