#include "exitmap/first_maps.hpp"

#include <algorithm>
#include <cmath>

namespace exitmap {

const char* to_string(MapStatus s) {
    switch (s) {
        case MapStatus::Defined: return "defined";
        case MapStatus::Undefined: return "undefined";
        case MapStatus::Unresolved: return "unresolved";
    }
    return "?";
}

const char* to_string(BoundaryType t) {
    switch (t) {
        case BoundaryType::A1: return "A-1";
        case BoundaryType::A2: return "A-2";
        case BoundaryType::A3: return "A-3";
        case BoundaryType::B: return "B";
        case BoundaryType::C: return "C";
        case BoundaryType::Unresolved: return "unresolved";
    }
    return "?";
}

namespace {

constexpr int kMaxGrazes = 64;
constexpr double kFixedTimeTol = 1e-8;
// A boundary touch this close to the start point witnesses a periodic return
// (the start point lies on the orbit exactly), unlike a generic graze.
constexpr double kPeriodicReturnTol = 1e-3;

struct LadderScan {
    enum class Verdict {
        Banded,    // every usable probe sat in the boundary band
        Leaves,    // tail consensus: not inside A
        Stays,     // tail consensus: inside A
        Alternates,
        Failed,    // too few usable probes
    } verdict = Verdict::Failed;
    std::vector<LadderProbe> probes;
    double largest_inside = -1.0;        // largest delta whose probe was Inside
    double bracket_outside = -1.0;       // smallest non-inside delta above largest_inside
};

/// Zero-time probe ladder: membership of Phi(delta, x) for geometrically
/// decreasing delta. Band-valued probes are uninformative (every continuous
/// orbit ends in the band as delta -> 0) and are skipped when forming the
/// consensus; more than one switch between inside and not-inside among the
/// informative probes means the tangency is too complicated to resolve.
LadderScan ladder_scan(const Flow& flow, const Region& A, Vec2 x, const Tolerances& tol) {
    LadderScan out;
    double delta = tol.ladder_base;
    std::vector<int> informative; // -1 inside, +1 not inside, ordered big -> small delta
    int usable = 0;
    for (int k = 0; k < tol.ladder_steps; ++k, delta *= tol.ladder_ratio) {
        FlowEval e = flow.at(delta, x);
        if (!e.ok()) continue;
        Locate loc = A.locate(e.value, tol.boundary);
        out.probes.push_back({delta, loc});
        ++usable;
        if (loc == Locate::Inside && delta > out.largest_inside) out.largest_inside = delta;
        if (loc != Locate::Boundary) informative.push_back(loc == Locate::Inside ? -1 : +1);
    }
    if (usable < 3) {
        out.verdict = LadderScan::Verdict::Failed;
        return out;
    }
    if (informative.empty()) {
        out.verdict = LadderScan::Verdict::Banded;
        return out;
    }
    int switches = 0;
    for (std::size_t i = 1; i < informative.size(); ++i)
        if (informative[i] != informative[i - 1]) ++switches;
    if (switches >= 2) {
        out.verdict = LadderScan::Verdict::Alternates;
        return out;
    }
    out.verdict = informative.back() < 0 ? LadderScan::Verdict::Stays : LadderScan::Verdict::Leaves;
    if (out.verdict == LadderScan::Verdict::Stays && out.largest_inside > 0.0) {
        // a larger probe may already witness the first exit
        double best = -1.0;
        for (const auto& p : out.probes)
            if (p.loc != Locate::Inside && p.delta > out.largest_inside &&
                (best < 0.0 || p.delta < best))
                best = p.delta;
        out.bracket_outside = best;
    }
    return out;
}

/// Secant-style root polish of the crossing time on the indicator: bisection
/// stops at the tolerance-band edge, which is offset from the true zero by
/// band/speed; slow crossings need the extra digits.
template <class Sampler>
bool polish_crossing_time(Sampler&& sample, const Region& A, double t_inside, double& t_hit,
                          Vec2& p_hit, const Tolerances& tol) {
    if (!A.has_indicator()) return false;
    auto g_at = [&](double t, bool& ok) {
        FlowEval e = sample(t);
        ok = e.ok();
        return ok ? A.indicator(e.value) : 0.0;
    };
    bool ok = false;
    double ga = g_at(t_inside, ok);
    if (!ok || !(ga < 0.0)) return false;
    double tb = t_hit;
    double gb = g_at(tb, ok);
    if (!ok) return false;
    double step = std::max(tb - t_inside, tol.time);
    for (int i = 0; i < 40 && gb <= 0.0; ++i) { // walk to the positive side of the band
        tb += step;
        step *= 2.0;
        gb = g_at(tb, ok);
        if (!ok) return false;
    }
    if (gb <= 0.0) return false; // tangency: keep the band-entry event
    double ta = t_inside;
    for (int i = 0; i < 80 && tb - ta > 1e-14 * std::max(1.0, std::abs(tb)); ++i) {
        double tm = ta + (tb - ta) * (-ga) / (gb - ga); // regula falsi
        double lo = ta + 0.1 * (tb - ta), hi = tb - 0.1 * (tb - ta);
        tm = std::min(std::max(tm, lo), hi);
        double gm = g_at(tm, ok);
        if (!ok) return false;
        if (gm < 0.0)
            ta = tm, ga = gm;
        else
            tb = tm, gb = gm;
    }
    FlowEval e = sample(tb);
    if (!e.ok()) return false;
    t_hit = tb;
    p_hit = e.value;
    return true;
}

/// Finite-difference projection of a near-boundary point onto {indicator = 0}.
Vec2 project_to_boundary(const Region& A, Vec2 p) {
    if (!A.has_indicator()) return p;
    const double h = 1e-7;
    for (int i = 0; i < 2; ++i) {
        double g = A.indicator(p);
        if (g == 0.0) break;
        double gx = (A.indicator({p.x + h, p.y}) - A.indicator({p.x - h, p.y})) / (2 * h);
        double gy = (A.indicator({p.x, p.y + h}) - A.indicator({p.x, p.y - h})) / (2 * h);
        double n2 = gx * gx + gy * gy;
        if (n2 < 1e-30) break;
        p = {p.x - g * gx / n2, p.y - g * gy / n2};
    }
    return p;
}

struct Refined {
    double t = 0.0;
    Vec2 p{};
    bool ok = false;
};

/// Bisect sampler output on [a, b] for the first time trigger(loc) holds;
/// a must be certified non-trigger.
template <class Sampler, class Trigger>
Refined bisect_first(Sampler&& sample, Trigger&& trig, const Region& A, double a, double b,
                     const Tolerances& tol) {
    Refined r;
    Vec2 pb{};
    for (int i = 0; i < 200 && std::abs(b - a) > tol.time; ++i) {
        double m = 0.5 * (a + b);
        FlowEval e = sample(m);
        if (!e.ok()) return r;
        if (trig(A.locate(e.value, tol.boundary)))
            b = m, pb = e.value;
        else
            a = m;
    }
    FlowEval e = sample(b);
    if (!e.ok()) return r;
    r.t = b;
    r.p = e.value;
    r.ok = true;
    return r;
}

enum class MarchEvent { Trigger, Horizon, Failed };

struct MarchResult {
    MarchEvent event = MarchEvent::Failed;
    double t_before = 0.0; // last certified non-trigger time
    double t_hit = 0.0;
    EvalStatus fail = EvalStatus::Ok;
};

/// March membership samples along the orbit cursor until trigger(loc) holds.
/// `t_start` must be certified non-trigger (or 0 at a boundary start point).
template <class Trigger>
MarchResult march_until(OrbitCursor& cur, const Region& A, Trigger&& trig, double t_start,
                        double horizon, double dir, const Tolerances& tol) {
    MarchResult res;
    res.t_before = t_start;
    if (std::abs(t_start) >= horizon) {
        res.event = MarchEvent::Horizon;
        return res;
    }
    bool final_sample_done = false;
    double next = t_start + dir * tol.march_dt;
    if (std::abs(next) >= horizon) {
        next = dir * horizon;
        final_sample_done = true;
    }
    for (;;) {
        // grow the window to cover `next`
        while (std::abs(cur.t1()) < std::abs(next)) {
            if (!cur.advance()) {
                // window ended early: check remaining reachable part
                double edge = cur.t1();
                if (std::abs(edge) > std::abs(res.t_before)) {
                    FlowEval e = cur.sample(edge);
                    if (e.ok() && trig(A.locate(e.value, tol.boundary))) {
                        res.event = MarchEvent::Trigger;
                        res.t_hit = edge;
                        return res;
                    }
                }
                res.event = MarchEvent::Failed;
                res.fail = cur.status();
                return res;
            }
        }
        FlowEval e = cur.sample(next);
        if (!e.ok()) {
            res.event = MarchEvent::Failed;
            res.fail = e.status;
            return res;
        }
        if (trig(A.locate(e.value, tol.boundary))) {
            res.event = MarchEvent::Trigger;
            res.t_hit = next;
            return res;
        }
        res.t_before = next;
        if (final_sample_done) {
            res.event = MarchEvent::Horizon;
            return res;
        }
        next += dir * tol.march_dt;
        if (std::abs(next) >= horizon) { // close with a sample exactly at the horizon
            next = dir * horizon;
            final_sample_done = true;
        }
    }
}

} // namespace

ExitOutcome exit_time(const Flow& flow, const Region& A, Vec2 x, double horizon,
                      const Tolerances& tol) {
    ExitOutcome out;
    out.horizon = horizon;

    Locate start = A.locate(x, tol.boundary);
    if (start == Locate::Outside) {
        out.status = MapStatus::Unresolved;
        out.note = "start point is outside the closure";
        return out;
    }

    double t_certified = 0.0;
    double bracket_hint = -1.0;
    if (start == Locate::Boundary) {
        LadderScan scan = ladder_scan(flow, A, x, tol);
        out.ladder = scan.probes;
        switch (scan.verdict) {
            case LadderScan::Verdict::Leaves:
            case LadderScan::Verdict::Banded:
                // orbit sits outside the open set arbitrarily close to t = 0
                out.status = MapStatus::Defined;
                out.time = 0.0;
                out.point = x;
                return out;
            case LadderScan::Verdict::Alternates:
                out.status = MapStatus::Unresolved;
                out.note = "zero-time probe ladder alternates membership";
                return out;
            case LadderScan::Verdict::Failed:
                out.status = MapStatus::Unresolved;
                out.note = "zero-time probe ladder mostly unevaluable";
                return out;
            case LadderScan::Verdict::Stays:
                t_certified = scan.largest_inside;
                bracket_hint = scan.bracket_outside;
                break;
        }
    }

    auto cursor = flow.orbit(x, +1.0);
    auto trig = [](Locate l) { return l != Locate::Inside; };
    auto sample = [&](double t) {
        while (std::abs(cursor->t1()) < std::abs(t))
            if (!cursor->advance()) break;
        return cursor->sample(t);
    };

    double from = t_certified;
    for (;;) {
        double hit_lo, hit_hi;
        if (bracket_hint > 0.0) {
            hit_lo = from;
            hit_hi = bracket_hint;
            bracket_hint = -1.0;
            while (std::abs(cursor->t1()) < hit_hi)
                if (!cursor->advance()) break;
        } else {
            MarchResult m = march_until(*cursor, A, trig, from, horizon, +1.0, tol);
            if (m.event == MarchEvent::Horizon) {
                out.status = MapStatus::Undefined;
                return out;
            }
            if (m.event == MarchEvent::Failed) {
                out.status = MapStatus::Unresolved;
                out.note = m.fail == EvalStatus::OutOfDomain
                               ? "orbit left the flow domain before any exit"
                               : "integrator failure while marching";
                return out;
            }
            hit_lo = m.t_before;
            hit_hi = m.t_hit;
        }

        Refined r = bisect_first(sample, trig, A, hit_lo, hit_hi, tol);
        if (!r.ok) {
            out.status = MapStatus::Unresolved;
            out.note = "evaluation failure while refining the exit bracket";
            return out;
        }

        // Tangential touches: if membership returns inside right after the
        // band, the event is discarded and the march continues. One exception:
        // a touch at the start point itself witnesses a periodic return (the
        // orbit provably contains x), so that event is genuine.
        if (A.locate(r.p, tol.boundary) == Locate::Boundary) {
            double dt = std::max(tol.time * 10.0, 1e-12);
            Locate after = Locate::Boundary;
            double t_after = r.t;
            while (dt <= tol.march_dt) {
                t_after = r.t + dt;
                while (std::abs(cursor->t1()) < t_after)
                    if (!cursor->advance()) break;
                FlowEval e = cursor->sample(t_after);
                if (!e.ok()) break;
                after = A.locate(e.value, tol.boundary);
                if (after != Locate::Boundary) break;
                dt *= 4.0;
            }
            if (after == Locate::Inside) {
                if (dist(r.p, x) <= kPeriodicReturnTol) {
                    out.status = MapStatus::Defined;
                    out.time = r.t;
                    out.point = x;
                    return out;
                }
                ++out.grazes;
                if (out.grazes > kMaxGrazes) {
                    out.status = MapStatus::Unresolved;
                    out.note = "bisection stalls on tangential grazing";
                    return out;
                }
                from = t_after;
                continue;
            }
        }

        double t_exit = r.t;
        Vec2 p_exit = r.p;
        polish_crossing_time(sample, A, hit_lo, t_exit, p_exit, tol);
        out.status = MapStatus::Defined;
        out.time = t_exit;
        out.point = project_to_boundary(A, p_exit);
        return out;
    }
}

ExitOutcome first_in(const Flow& flow, const Region& A, Vec2 x, double horizon,
                     const Tolerances& tol) {
    return exit_time(flow, A.complement(), x, horizon, tol);
}

ImmediateSide immediate_side(const Flow& flow, const Region& A, Vec2 x, const Tolerances& tol) {
    LadderScan scan = ladder_scan(flow, A, x, tol);
    switch (scan.verdict) {
        case LadderScan::Verdict::Stays: return ImmediateSide::Enters;
        case LadderScan::Verdict::Leaves: return ImmediateSide::Leaves;
        case LadderScan::Verdict::Banded: return ImmediateSide::Rides;
        default: return ImmediateSide::Ambiguous;
    }
}

bool orbit_enters_open(const Flow& flow, const Region& A, Vec2 x, double horizon,
                       const Tolerances& tol) {
    // quick ladder look near t = 0
    double delta = tol.ladder_base;
    for (int k = 0; k < tol.ladder_steps; ++k, delta *= tol.ladder_ratio) {
        FlowEval e = flow.at(delta, x);
        if (e.ok() && A.locate(e.value, tol.boundary) == Locate::Inside) return true;
    }
    auto cursor = flow.orbit(x, +1.0);
    auto trig = [](Locate l) { return l == Locate::Inside; };
    MarchResult m = march_until(*cursor, A, trig, 0.0, horizon, +1.0, tol);
    return m.event == MarchEvent::Trigger;
}

Classification classify_boundary_point(const Flow& flow, const Region& A, Vec2 x,
                                       double horizon, const Tolerances& tol) {
    Classification c;
    c.horizon = horizon;
    if (A.locate(x, tol.boundary) != Locate::Boundary) {
        c.note = "point is not on the boundary";
        return c;
    }
    c.exit = exit_time(flow, A, x, horizon, tol);
    c.ret = first_in(flow, A, x, horizon, tol);
    // fixedness is about the map value: immediate exits have E(x) = x, and so
    // do periodic returns at positive time
    c.exit_fixed = c.exit.defined() &&
                   (c.exit.time <= kFixedTimeTol || dist(c.exit.point, x) <= tol.fixed_point);
    c.ret_fixed = c.ret.defined() &&
                  (c.ret.time <= kFixedTimeTol || dist(c.ret.point, x) <= tol.fixed_point);

    if (c.exit.status == MapStatus::Unresolved || c.ret.status == MapStatus::Unresolved) {
        c.note = c.exit.status == MapStatus::Unresolved ? "E unresolved: " + c.exit.note
                                                        : "R unresolved: " + c.ret.note;
        return c;
    }

    const bool e_def = c.exit.defined();
    const bool r_def = c.ret.defined();
    if (e_def && r_def) {
        if (c.exit_fixed && c.ret_fixed) c.type = BoundaryType::A3;
        else if (c.exit_fixed) c.type = BoundaryType::A1;
        else if (c.ret_fixed) c.type = BoundaryType::A2;
        else c.note = "coverage violation: neither E nor R fixed"; // regular sets exclude this
    } else if (!r_def) {
        if (!e_def) {
            c.note = "both maps undefined within horizon";
        } else if (c.exit_fixed) {
            c.type = BoundaryType::B;
        } else {
            c.note = "R undefined but E not fixed";
        }
    } else { // !e_def
        if (c.ret_fixed) {
            c.type = BoundaryType::C;
        } else {
            c.note = "E undefined but R not fixed";
        }
    }
    return c;
}

InvarianceVerdict check_backward_invariance(const Flow& flow, const BoundedRegion& br,
                                            Vec2 anchor, int n_samples, double horizon,
                                            const Tolerances& tol) {
    InvarianceVerdict v;
    v.all_B = true;
    v.boundary_never_enters = true;

    for (double s : uniform_params(br.boundary, n_samples)) {
        Vec2 p = br.boundary.at(s);
        Classification c = classify_boundary_point(flow, br.region, p, horizon, tol);
        if (c.type == BoundaryType::Unresolved) ++v.unresolved;
        if (c.type != BoundaryType::B) v.all_B = false;
        if (orbit_enters_open(flow, br.region, p, horizon, tol)) v.boundary_never_enters = false;
    }

    v.backward_invariant = true;
    auto interior_trig = [](Locate l) { return l != Locate::Inside; };
    for (double s : uniform_params(br.boundary, std::max(4, n_samples / 4))) {
        for (double f : {0.25, 0.6, 0.9}) {
            Vec2 p = anchor + f * (br.boundary.at(s) - anchor);
            if (br.region.locate(p, tol.boundary) != Locate::Inside) continue;
            auto cur = flow.orbit(p, -1.0);
            MarchResult m = march_until(*cur, br.region, interior_trig, 0.0, horizon, -1.0, tol);
            if (m.event == MarchEvent::Trigger) {
                v.backward_invariant = false;
                break;
            }
        }
        if (!v.backward_invariant) break;
    }

    v.consistent = (v.backward_invariant == v.boundary_never_enters) && v.unresolved == 0;
    if (v.backward_invariant && !v.all_B) v.note = "invariant, not via type B";
    return v;
}

std::vector<double> uniform_params(const Boundary& b, int n) {
    std::vector<double> s;
    s.reserve(n);
    if (b.domain() == Boundary::Domain::Circle) {
        for (int i = 0; i < n; ++i) s.push_back(static_cast<double>(i) / n);
    } else {
        for (int i = 0; i < n; ++i)
            s.push_back(n > 1 ? b.lo() + (b.hi() - b.lo()) * i / (n - 1) : 0.5 * (b.lo() + b.hi()));
    }
    return s;
}

} // namespace exitmap
