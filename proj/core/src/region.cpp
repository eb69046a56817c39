#include "exitmap/region.hpp"

#include <cmath>
#include <stdexcept>

namespace exitmap {

struct Region::Data {
    std::string name;
    std::function<bool(Vec2)> membership;
    std::function<double(Vec2)> indicator; // may be empty
    bool regular = false;
};

bool Region::contains(Vec2 p) const { return d_->membership(p); }
bool Region::has_indicator() const { return static_cast<bool>(d_->indicator); }
double Region::indicator(Vec2 p) const { return d_->indicator(p); }
bool Region::regular_asserted() const { return d_->regular; }
const std::string& Region::name() const { return d_->name; }

Locate Region::locate(Vec2 p, double tol) const {
    if (has_indicator()) {
        double g = d_->indicator(p);
        if (g < -tol) return Locate::Inside;
        if (g > tol) return Locate::Outside;
        return Locate::Boundary;
    }
    // membership flip within an l-inf ball of radius tol
    bool base = d_->membership(p);
    for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
            if (dx == 0 && dy == 0) continue;
            if (d_->membership({p.x + dx * tol, p.y + dy * tol}) != base)
                return Locate::Boundary;
        }
    return base ? Locate::Inside : Locate::Outside;
}

Region Region::complement() const {
    auto data = std::make_shared<Region::Data>();
    data->name = "compl(" + d_->name + ")";
    if (has_indicator()) {
        data->indicator = [g = d_->indicator](Vec2 p) { return -g(p); };
        data->membership = [g = d_->indicator](Vec2 p) { return g(p) > 0.0; };
    } else {
        data->membership = [m = d_->membership](Vec2 p) { return !m(p); };
    }
    data->regular = d_->regular;
    return Region(std::move(data));
}

Region make_region(std::string name, std::function<bool(Vec2)> membership,
                   std::function<double(Vec2)> indicator, bool regular_asserted) {
    auto data = std::make_shared<Region::Data>();
    data->name = std::move(name);
    if (!membership && indicator)
        membership = [indicator](Vec2 p) { return indicator(p) < 0.0; };
    data->membership = std::move(membership);
    data->indicator = std::move(indicator);
    data->regular = regular_asserted;
    return Region(std::move(data));
}

Region make_disc_region(Vec2 center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("make_disc_region: radius must be positive");
    auto g = [center, r2 = radius * radius](Vec2 p) { return dist2(p, center) - r2; };
    return make_region("disc", {}, g, true);
}

Region make_halfplane_region(HalfplaneSide side) {
    if (side == HalfplaneSide::Lower)
        return make_region("halfplane_lower", {}, [](Vec2 p) { return p.y; }, true);
    return make_region("halfplane_upper", {}, [](Vec2 p) { return -p.y; }, true);
}

Region transform_region(const Region& r, const Homeomorphism2D& h) {
    auto data = std::make_shared<Region::Data>();
    data->name = h.tag + "(" + r.name() + ")";
    data->membership = [r, inv = h.inv](Vec2 p) { return r.contains(inv(p)); };
    if (r.has_indicator())
        data->indicator = [r, inv = h.inv](Vec2 p) { return r.indicator(inv(p)); };
    data->regular = r.regular_asserted();
    return Region(std::move(data));
}

Region moebius_region(const Region& r, const MoebiusMap& M, const Tolerances& tol) {
    if (!M.invertible()) throw std::invalid_argument("moebius_region: singular matrix");
    MoebiusMap minv = M.inverse();
    auto pull = [minv, pole_tol = tol.pole](Vec2 p) -> std::optional<Vec2> {
        std::complex<double> z(p.x, p.y);
        if (std::abs(minv.c * z + minv.d) <= pole_tol) return std::nullopt; // preimage is infinity
        auto w = minv.apply(z);
        return Vec2{w.real(), w.imag()};
    };
    auto data = std::make_shared<Region::Data>();
    data->name = "moebius(" + r.name() + ")";
    data->membership = [r, pull](Vec2 p) {
        auto z = pull(p);
        return z && r.contains(*z);
    };
    if (r.has_indicator())
        data->indicator = [r, pull](Vec2 p) {
            auto z = pull(p);
            return z ? r.indicator(*z) : 1e30;
        };
    data->regular = r.regular_asserted();
    return Region(std::move(data));
}

// ---------------------------------------------------------------------------

struct Boundary::Data {
    Boundary::Domain domain = Boundary::Domain::Circle;
    std::function<Vec2(double)> curve;
    std::function<std::optional<double>(Vec2)> analytic_inverse; // optional
    double lo = 0.0;
    double hi = 1.0;
};

Boundary::Domain Boundary::domain() const { return d_->domain; }
double Boundary::lo() const { return d_->lo; }
double Boundary::hi() const { return d_->hi; }

double Boundary::wrap(double s) const {
    if (d_->domain != Domain::Circle) return s;
    double w = s - std::floor(s);
    return w >= 1.0 ? 0.0 : w;
}

Vec2 Boundary::at(double s) const { return d_->curve(wrap(s)); }

double Boundary::param_distance(double s1, double s2) const {
    double diff = std::abs(s1 - s2);
    if (d_->domain == Domain::Circle) {
        diff = std::fmod(diff, 1.0);
        diff = std::min(diff, 1.0 - diff);
    }
    return diff;
}

namespace {

// Quadratic-vertex polish of a 1-D minimizer; exact for parabolic minima.
double parabolic_polish(const std::function<double(double)>& f, double s, double h, int rounds) {
    for (int i = 0; i < rounds; ++i) {
        double fm = f(s - h), f0 = f(s), fp = f(s + h);
        double denom = fm - 2.0 * f0 + fp;
        if (denom <= 0.0) break;
        double step = 0.5 * h * (fm - fp) / denom;
        if (!std::isfinite(step) || std::abs(step) > h) break;
        s += step;
        h *= 0.25;
    }
    return s;
}

} // namespace

std::optional<double> Boundary::param_of(Vec2 p, double max_distance) const {
    if (d_->analytic_inverse) {
        auto s = d_->analytic_inverse(p);
        if (!s) return std::nullopt;
        if (dist(at(*s), p) > max_distance) return std::nullopt;
        return s;
    }

    const int kCoarse = 1024;
    const bool circle = d_->domain == Domain::Circle;
    double lo = d_->lo, hi = d_->hi;
    double span = hi - lo;
    auto f = [&](double s) { return dist2(at(s), p); };

    int best = 0;
    double best_f = f(lo);
    for (int i = 1; i < kCoarse; ++i) {
        double s = lo + span * i / kCoarse;
        double v = f(s);
        if (v < best_f) {
            best_f = v;
            best = i;
        }
    }
    double step = span / kCoarse;
    double a = lo + step * (best - 1);
    double b = lo + step * (best + 1);
    if (!circle) {
        a = std::max(a, lo);
        b = std::min(b, hi);
    }

    // golden-section to a narrow bracket, then parabolic vertex polish
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > 1e-10) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    double s = parabolic_polish(f, 0.5 * (a + b), 1e-7, 3);
    s = circle ? wrap(s) : std::clamp(s, d_->lo, d_->hi);
    if (dist(at(s), p) > max_distance) return std::nullopt;
    return s;
}

namespace {

// cos/sin of 2 pi t, exact at quadrant points (plain cos(M_PI/2) is 6e-17,
// which seeds spurious escapes along separatrices through axis points)
Vec2 circle_direction(double t) {
    t -= std::floor(t);
    int q = static_cast<int>(4.0 * t);
    double a = 0.5 * M_PI * (4.0 * t - q);
    double c = std::cos(a), s = std::sin(a);
    switch (q) {
        case 0: return {c, s};
        case 1: return {-s, c};
        case 2: return {-c, -s};
        default: return {s, -c};
    }
}

} // namespace

Boundary make_circle_boundary(Vec2 center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("make_circle_boundary: radius must be positive");
    auto data = std::make_shared<Boundary::Data>();
    data->domain = Boundary::Domain::Circle;
    data->curve = [center, radius](double t) { return center + radius * circle_direction(t); };
    data->lo = 0.0;
    data->hi = 1.0;
    return Boundary(std::move(data));
}

Boundary make_line_boundary(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("make_line_boundary: empty range");
    auto data = std::make_shared<Boundary::Data>();
    data->domain = Boundary::Domain::Line;
    data->curve = [](double s) { return Vec2{s, 0.0}; };
    data->analytic_inverse = [](Vec2 p) -> std::optional<double> { return p.x; };
    data->lo = lo;
    data->hi = hi;
    return Boundary(std::move(data));
}

Boundary transform_boundary(const Boundary& b, const Homeomorphism2D& h) {
    auto data = std::make_shared<Boundary::Data>();
    data->domain = b.domain();
    data->curve = [b, fwd = h.fwd](double s) { return fwd(b.at(s)); };
    data->lo = b.lo();
    data->hi = b.hi();
    return Boundary(std::move(data));
}

BoundedRegion make_disc(Vec2 center, double radius) {
    return {make_disc_region(center, radius), make_circle_boundary(center, radius)};
}

BoundedRegion make_halfplane(HalfplaneSide side, double lo, double hi) {
    return {make_halfplane_region(side), make_line_boundary(lo, hi)};
}

BoundedRegion transform(const BoundedRegion& br, const Homeomorphism2D& h) {
    return {transform_region(br.region, h), transform_boundary(br.boundary, h)};
}

} // namespace exitmap
