#include "exitmap/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exitmap/fields.hpp"

namespace exitmap {

const char* to_string(StartPolicy p) {
    switch (p) {
        case StartPolicy::PreferJump: return "prefer-jump";
        case StartPolicy::PreferFlow: return "prefer-flow";
        case StartPolicy::PreferSlide: return "prefer-slide";
    }
    return "?";
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::Horizon: return "horizon";
        case Termination::ZenoDetected: return "zeno-detected";
        case Termination::MaxEvents: return "max-events";
        case Termination::ResetUndefined: return "reset-undefined";
        case Termination::LeftDomain: return "left-domain";
        case Termination::Unresolved: return "unresolved";
    }
    return "?";
}

const char* to_string(ZenoVerdict v) {
    switch (v) {
        case ZenoVerdict::Zeno: return "zeno";
        case ZenoVerdict::NotZeno: return "not-zeno";
        case ZenoVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

double ConjugacyReport::max_residual() const {
    return std::max({reset_residual, flow_residual, sliding_residual});
}

ResetMap restitution_reset(double r) {
    return {"restitution", [r](double x) { return -r * x; }, {}};
}

ResetMap oscillator_reset(double mu) {
    return {"oscillator", [mu](double x) { return std::max(-mu * x, x); }, {}};
}

ResetMap tabulated_reset(std::string name, std::vector<double> xs, std::vector<double> values,
                         std::vector<bool> defined) {
    if (xs.size() != values.size() || xs.size() != defined.size() || xs.size() < 2)
        throw std::invalid_argument("tabulated_reset: inconsistent table");
    auto bracket = [xs](double x) -> std::optional<std::size_t> {
        if (x < xs.front() || x > xs.back()) return std::nullopt;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t i = it == xs.begin() ? 0 : (it - xs.begin()) - 1;
        if (i + 1 >= xs.size()) i = xs.size() - 2;
        return i;
    };
    auto dom = [bracket, defined](double x) {
        auto i = bracket(x);
        return i && defined[*i] && defined[*i + 1];
    };
    auto map = [bracket, xs, values](double x) {
        auto i = *bracket(x);
        double f = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return (1.0 - f) * values[i] + f * values[i + 1];
    };
    return {std::move(name), map, dom};
}

ImpactingSystem bouncing_ball_system(double g, double r) {
    Flow rest = make_closed_form("rest", [](double, Vec2 p) { return p; });
    return {"bouncing_ball", gravity_flow(g), restitution_reset(r), rest};
}

ImpactingSystem impact_oscillator_system(double mu) {
    Flow still = make_closed_form("identity", [](double, Vec2 p) { return p; });
    return {"impact_oscillator", make_rotation(M_PI), oscillator_reset(mu), still};
}

namespace {

Region upper_halfplane() { return make_halfplane_region(HalfplaneSide::Upper); }

bool flow_exits_immediately(const Flow& flow, const Region& upper, Vec2 p,
                            const Tolerances& tol) {
    ImmediateSide side = immediate_side(flow, upper, p, tol);
    return side == ImmediateSide::Leaves || side == ImmediateSide::Rides;
}

} // namespace

bool in_sliding_set(const ImpactingSystem& sys, double x, const Tolerances& tol) {
    if (!sys.reset.defined_at(x)) return false;
    if (std::abs(sys.reset(x) - x) > tol.fixed_point) return false;
    return flow_exits_immediately(sys.flow, upper_halfplane(), {x, 0.0}, tol);
}

SystemValidation validate_impacting(const ImpactingSystem& sys, double lo, double hi, int n,
                                    double horizon, const Tolerances& tol) {
    SystemValidation v;
    Region upper = upper_halfplane();
    Boundary line = make_line_boundary(lo, hi);
    for (double x : uniform_params(line, n)) {
        ExitOutcome e = exit_time(sys.flow, upper, {x, 0.0}, horizon, tol);
        if (e.status == MapStatus::Defined && !sys.reset.defined_at(e.point.x)) {
            v.ok = false;
            v.failures.push_back("exit image x=" + std::to_string(e.point.x) +
                                 " is outside dom P (from x=" + std::to_string(x) + ")");
        }
        if (in_sliding_set(sys, x, tol)) v.sliding_params.push_back(x);
    }
    return v;
}

// ---------------------------------------------------------------------------
// simulation

namespace {

void record_flow_path(HybridSegment& seg, const Flow& flow, Vec2 p, double t0, double T,
                      double path_dt) {
    seg.path.push_back({t0, p});
    for (double u = path_dt; u < T; u += path_dt) {
        FlowEval e = flow.at(u, p);
        if (!e.ok()) break;
        seg.path.push_back({t0 + u, e.value});
    }
    FlowEval last = flow.at(T, p);
    if (last.ok()) seg.path.push_back({t0 + T, last.value});
}

} // namespace

ZenoReport zeno_from_event_times(const std::vector<double>& times, double horizon,
                                 const HybridConfig& cfg) {
    ZenoReport rep;
    rep.events = static_cast<int>(times.size());
    if (rep.events < cfg.min_events) {
        rep.note = "fewer than min_events jumps";
        return rep;
    }
    std::vector<double> dts;
    dts.push_back(times.front());
    for (std::size_t i = 1; i < times.size(); ++i) dts.push_back(times[i] - times[i - 1]);

    int window = std::min<int>(cfg.ratio_window, static_cast<int>(dts.size()) - 1);
    bool all_shrink = true, all_stable = true;
    double ratio = 0.0;
    for (int k = 0; k < window; ++k) {
        double a = dts[dts.size() - 2 - k], b = dts[dts.size() - 1 - k];
        if (a <= 0.0) {
            all_stable = false;
            continue;
        }
        ratio = b / a;
        if (!(ratio < 1.0 - cfg.ratio_eps)) all_shrink = false;
        if (ratio < 1.0 - cfg.ratio_eps) all_stable = false;
    }
    rep.tail_ratio = dts.size() >= 2 && dts[dts.size() - 2] > 0.0
                         ? dts.back() / dts[dts.size() - 2]
                         : 0.0;
    if (all_shrink) {
        double rho = rep.tail_ratio;
        double accum = times.back() + dts.back() * rho / (1.0 - rho);
        if (accum <= horizon) {
            rep.verdict = ZenoVerdict::Zeno;
            rep.accumulation_time = accum;
            return rep;
        }
        rep.note = "geometric decay but accumulation beyond horizon";
        return rep;
    }
    if (all_stable) {
        rep.verdict = ZenoVerdict::NotZeno;
        return rep;
    }
    rep.note = "inter-event ratios neither shrinking nor stable";
    return rep;
}

ZenoReport detect_zeno(const HybridTrajectory& traj, const HybridConfig& cfg) {
    std::vector<double> times;
    for (const auto& j : traj.jumps) times.push_back(j.t);
    double horizon = std::max(traj.end_time, times.empty() ? 0.0 : times.back());
    ZenoReport rep = zeno_from_event_times(times, horizon * 2.0 + 1.0, cfg);
    return rep;
}

HybridTrajectory simulate(const ImpactingSystem& sys, Vec2 x0, double horizon, int max_events,
                          const HybridConfig& cfg) {
    const Tolerances& tol = cfg.tol;
    Region upper = upper_halfplane();

    HybridTrajectory traj;
    traj.policy = cfg.policy;
    if (upper.locate(x0, tol.boundary) == Locate::Outside)
        throw std::invalid_argument("simulate: start point below the boundary");

    Vec2 p = x0;
    double t = 0.0;
    int index = 0;
    int consecutive_jumps = 0;
    bool start_decision = true; // the policy applies to the initial boundary point

    std::vector<double> event_times;

    auto finish = [&](Termination why, std::string note = "") {
        traj.termination = why;
        traj.end_time = t;
        traj.note = std::move(note);
        traj.zeno.events = static_cast<int>(event_times.size());
        traj.zeno.event_times = event_times;
        return traj;
    };

    while (t < horizon) {
        bool on_boundary = upper.locate(p, tol.boundary) == Locate::Boundary;

        if (on_boundary) {
            bool can_slide = in_sliding_set(sys, p.x, tol);
            bool flow_enters =
                immediate_side(sys.flow, upper, p, tol) == ImmediateSide::Enters;
            bool jump_moves = sys.reset.defined_at(p.x) &&
                              std::abs(sys.reset(p.x) - p.x) > tol.fixed_point;

            enum class Action { Slide, Jump, FlowOn, Stuck } action = Action::Stuck;
            if (start_decision && cfg.policy == StartPolicy::PreferFlow && flow_enters)
                action = Action::FlowOn;
            else if (start_decision && cfg.policy == StartPolicy::PreferJump && jump_moves)
                action = Action::Jump;
            else if (can_slide)
                action = Action::Slide;
            else if (!start_decision && consecutive_jumps > 0 && flow_enters)
                action = Action::FlowOn; // after a jump the flow continues when it can
            else if (jump_moves && !flow_enters)
                action = Action::Jump;
            else if (flow_enters)
                action = Action::FlowOn;
            else if (jump_moves)
                action = Action::Jump;
            start_decision = false;

            if (action == Action::Stuck) {
                if (!sys.reset.defined_at(p.x))
                    return finish(Termination::ResetUndefined,
                                  "reset undefined at x=" + std::to_string(p.x));
                return finish(Termination::Unresolved,
                              "no continuation at boundary point x=" + std::to_string(p.x));
            }

            if (action == Action::Jump) {
                if (static_cast<int>(event_times.size()) >= max_events)
                    return finish(Termination::MaxEvents);
                Vec2 post{sys.reset(p.x), 0.0};
                traj.jumps.push_back({index, t, p, post});
                event_times.push_back(t);
                ++index;
                p = post;
                ++consecutive_jumps;
                if (consecutive_jumps > 32)
                    return finish(Termination::ZenoDetected,
                                  "zero-advance jump cascade at t=" + std::to_string(t));
                ZenoReport z = zeno_from_event_times(event_times, horizon, cfg);
                if (z.verdict == ZenoVerdict::Zeno) {
                    traj.zeno.suspected = true;
                    traj.zeno.accumulation_time = z.accumulation_time;
                    traj.zeno.tail_ratio = z.tail_ratio;
                    t = std::min(z.accumulation_time, horizon);
                    return finish(Termination::ZenoDetected);
                }
                continue;
            }

            if (action == Action::Slide) {
                HybridSegment seg;
                seg.index = index;
                seg.t_begin = t;
                seg.mode = HybridMode::Sliding;
                // stationary sliding flows pin the state to the horizon
                FlowEval probe = sys.sliding.at(1.0, p);
                if (probe.ok() && dist(probe.value, p) <= tol.eval) {
                    seg.t_end = horizon;
                    seg.path = {{t, p}, {horizon, p}};
                    traj.segments.push_back(seg);
                    t = horizon;
                    return finish(Termination::Horizon, "sliding equilibrium");
                }
                double u = 0.0;
                Vec2 q = p;
                while (t + u < horizon) {
                    u += tol.march_dt;
                    FlowEval e = sys.sliding.at(u, p);
                    if (!e.ok()) return finish(Termination::LeftDomain, "sliding flow domain end");
                    q = e.value;
                    seg.path.push_back({t + u, q});
                    if (!in_sliding_set(sys, q.x, tol)) break;
                }
                seg.t_end = t + u;
                traj.segments.push_back(seg);
                t += u;
                p = q;
                ++index;
                consecutive_jumps = 0;
                continue;
            }
            // fall through: Action::FlowOn with p on the boundary
        }

        consecutive_jumps = 0;
        ExitOutcome exit = exit_time(sys.flow, upper, p, horizon - t, tol);
        HybridSegment seg;
        seg.index = index;
        seg.t_begin = t;
        seg.mode = HybridMode::FlowMode;
        if (exit.status == MapStatus::Undefined) {
            record_flow_path(seg, sys.flow, p, t, horizon - t, cfg.path_dt);
            seg.t_end = horizon;
            traj.segments.push_back(seg);
            t = horizon;
            return finish(Termination::Horizon);
        }
        if (exit.status == MapStatus::Unresolved)
            return finish(exit.note.find("domain") != std::string::npos ? Termination::LeftDomain
                                                                        : Termination::Unresolved,
                          exit.note);
        record_flow_path(seg, sys.flow, p, t, exit.time, cfg.path_dt);
        seg.t_end = t + exit.time;
        traj.segments.push_back(seg);
        t += exit.time;
        p = {exit.point.x, 0.0};
        ++index;
    }
    return finish(Termination::Horizon);
}

// ---------------------------------------------------------------------------

InducedResult induced_system(const Flow& flow1, const Flow& flow2, double lo, double hi, int n,
                             double horizon, const Tolerances& tol) {
    InducedResult res;
    BoundedRegion lower{make_halfplane_region(HalfplaneSide::Lower), make_line_boundary(lo, hi)};
    res.reset_samples = sample_exit_map(flow1, lower, n, horizon, tol);

    std::vector<double> xs, values;
    std::vector<bool> defined;
    int n_defined = 0;
    for (const MapSample& m : res.reset_samples.samples) {
        xs.push_back(m.s);
        values.push_back(m.status == MapStatus::Defined ? m.value : 0.0);
        defined.push_back(m.status == MapStatus::Defined);
        if (m.status == MapStatus::Defined) ++n_defined;
        if (m.status == MapStatus::Unresolved) res.unresolved_at.push_back(m.s);
    }

    if (!res.unresolved_at.empty()) {
        res.report = "does not induce: unresolved switching at " +
                     std::to_string(res.unresolved_at.size()) + " sample(s), nearest to zero x=";
        double best = res.unresolved_at.front();
        for (double u : res.unresolved_at)
            if (std::abs(u) < std::abs(best)) best = u;
        res.report += std::to_string(best);
        return res;
    }
    if (n_defined == 0) {
        res.report = "does not induce: no exits within horizon (reset domain empty)";
        return res;
    }

    ImpactingSystem sys{"induced(" + flow1.name() + "," + flow2.name() + ")", flow2,
                        tabulated_reset("induced_reset", xs, values, defined), flow2};
    SystemValidation v = validate_impacting(sys, lo, hi, n, horizon, tol);
    if (!v.ok) {
        res.report = "does not induce: " + v.failures.front();
        return res;
    }
    res.ok = true;
    res.report = "induces an impacting system (" + std::to_string(n_defined) + "/" +
                 std::to_string(n) + " reset samples defined)";
    res.system = std::move(sys);
    return res;
}

// ---------------------------------------------------------------------------

NormalFormResult normal_form_conjugate(const ImpactingSystem& sys, const Tolerances& tol) {
    const double L = 6.0;
    const int n = 97;
    const auto& P = sys.reset;

    double max_dev = 0.0;
    double prev = 0.0;
    bool have_prev = false;
    for (int i = 0; i < n; ++i) {
        double x = -L + 2.0 * L * i / (n - 1);
        if (!P.defined_at(x))
            throw std::invalid_argument("normal_form_conjugate: reset not total at x=" +
                                        std::to_string(x));
        double v = P(x);
        if (have_prev && std::abs(v - prev) > 1.0 * (2.0 * L / (n - 1)) * 50.0)
            throw std::invalid_argument("normal_form_conjugate: reset looks discontinuous");
        prev = v;
        have_prev = true;
        max_dev = std::max(max_dev, std::abs(v - x));
    }
    if (max_dev <= tol.fixed_point)
        throw std::invalid_argument("normal_form_conjugate: reset is the identity");

    // identity threshold: P is identity on [alpha, inf), deviating below
    double alpha;
    {
        auto coarse = [&](double x) { return std::abs(P(x) - x) > tol.fixed_point; };
        if (coarse(L))
            throw std::invalid_argument(
                "normal_form_conjugate: reset deviates from identity at the right edge");
        if (!coarse(-L))
            throw std::invalid_argument(
                "normal_form_conjugate: reset has no decreasing branch on the probe range");
        double lo = -L, hi = L;
        for (int i = 0; i < 60 && hi - lo > 1e-9; ++i) {
            double mid = 0.5 * (lo + hi);
            (coarse(mid) ? lo : hi) = mid;
        }
        // second stage with a noise-adaptive threshold: the coarse stage lands
        // where |P(x) - x| crosses fixed_point, offset from the true junction
        // for resets with a finite slope
        double noise = 0.0;
        for (int i = 0; i <= 16; ++i) {
            double x = hi + 0.5 + (L - hi - 0.5) * i / 16.0;
            noise = std::max(noise, std::abs(P(x) - x));
        }
        double thr = std::max(1e-12, 10.0 * noise);
        auto fine = [&](double x) { return std::abs(P(x) - x) > thr; };
        double flo = lo, fhi = std::min(L, hi + 1.0);
        if (!fine(flo) || fine(fhi)) {
            alpha = 0.5 * (lo + hi); // noise floor hides the junction; keep the coarse estimate
        } else {
            for (int i = 0; i < 100 && fhi - flo > 1e-12; ++i) {
                double mid = 0.5 * (flo + fhi);
                (fine(mid) ? flo : fhi) = mid;
            }
            alpha = 0.5 * (flo + fhi);
        }
    }

    // shifted reset decreasing on (-inf, 0], identity on [0, inf)
    auto shifted = [map = P.map, alpha](double x) { return map(x + alpha) - alpha; };
    auto shifted_inv_neg = [shifted](double y) { // strictly decreasing negative branch
        if (y <= 0.0) return 0.0;
        double b = 1.0;
        while (shifted(-b) < y && b < 1e300) b *= 2.0;
        double lo = -b, hi = 0.0;
        for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, -lo); ++i) {
            double mid = 0.5 * (lo + hi);
            (shifted(mid) >= y ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    auto h = [shifted_inv_neg](double x) { return x < 0.0 ? x : -shifted_inv_neg(x); };
    auto h_inv = [shifted](double u) { return u < 0.0 ? u : shifted(-u); };

    Homeomorphism2D H{
        [h, alpha](Vec2 p) { return Vec2{h(p.x - alpha), p.y}; },
        [h_inv, alpha](Vec2 p) { return Vec2{h_inv(p.x) + alpha, p.y}; },
        "normal_form",
    };

    NormalFormResult out;
    out.alpha = alpha;
    out.conjugacy = H;
    out.system.name = "normal_form(" + sys.name + ")";
    out.system.flow = conjugate_flow(sys.flow, H, ProbeGrid{{-3, -3}, {3, 3}, 7, 7}, tol);
    out.system.sliding = conjugate_flow(sys.sliding, H, ProbeGrid{{-3, -3}, {3, 3}, 7, 7}, tol);
    out.system.reset = {"conjugated_reset",
                        [map = P.map, H](double x) { return H.fwd({map(H.inv({x, 0}).x), 0}).x; },
                        [dom = P.domain, H](double x) {
                            return !dom || dom(H.inv({x, 0}).x);
                        }};
    return out;
}

ConjugacyReport check_conjugacy_invariance(const ImpactingSystem& a, const ImpactingSystem& b,
                                           const Homeomorphism2D& H, const Tolerances& tol) {
    ConjugacyReport rep;
    // reset identity: H(P(x), 0) = (Q(H_x(x,0)), 0)
    for (int i = 0; i <= 64; ++i) {
        double x = -3.0 + 6.0 * i / 64;
        if (!a.reset.defined_at(x)) continue;
        double hx = H.fwd({x, 0}).x;
        if (!b.reset.defined_at(hx)) continue;
        Vec2 lhs = H.fwd({a.reset(x), 0.0});
        Vec2 rhs{b.reset(hx), 0.0};
        rep.reset_residual = std::max(rep.reset_residual, dist(lhs, rhs));
    }
    // flow identity on a grid in the closed upper half-plane
    for (double x : {-2.0, -0.7, 0.3, 1.6})
        for (double y : {0.0, 0.4, 1.3})
            for (double t : {0.3, 0.9}) {
                FlowEval inner = a.flow.at(t, {x, y});
                if (!inner.ok()) continue;
                FlowEval outer = b.flow.at(t, H.fwd({x, y}));
                if (!outer.ok()) continue;
                rep.flow_residual =
                    std::max(rep.flow_residual, dist(outer.value, H.fwd(inner.value)));
            }
    // sliding identity on sampled sliding points of system a
    for (int i = 0; i <= 32; ++i) {
        double x = -2.0 + 4.0 * i / 32;
        if (!in_sliding_set(a, x, tol)) continue;
        for (double t : {0.2, 0.8}) {
            FlowEval inner = a.sliding.at(t, {x, 0.0});
            if (!inner.ok()) continue;
            FlowEval outer = b.sliding.at(t, H.fwd({x, 0.0}));
            if (!outer.ok()) continue;
            rep.sliding_residual =
                std::max(rep.sliding_residual, dist(outer.value, H.fwd(inner.value)));
        }
    }
    return rep;
}

PoincareOutcome poincare_composition(const ImpactingSystem& sys, double x, double horizon,
                                     const Tolerances& tol) {
    PoincareOutcome out;
    if (!sys.reset.defined_at(x)) {
        out.note = "x outside dom P";
        return out;
    }
    if (in_sliding_set(sys, x, tol)) {
        out.kind = PoincareOutcome::Kind::SlidingFixed;
        out.value = x;
        out.fixed = true;
        out.note = "sliding point: composition returns x";
        return out;
    }
    Vec2 post{sys.reset(x), 0.0};
    ExitOutcome e = exit_time(sys.flow, upper_halfplane(), post, horizon, tol);
    if (e.status != MapStatus::Defined) {
        out.note = "post-jump orbit has no boundary exit within horizon";
        return out;
    }
    out.kind = PoincareOutcome::Kind::Value;
    out.value = e.point.x;
    out.fixed = std::abs(out.value - x) <= tol.fixed_point;
    if (out.fixed) out.note = "equilibrium or periodic";
    return out;
}

CoolingResult cooling_return_time(const CoolingParams& p, double horizon, const Tolerances& tol) {
    CoolingResult res;
    Flow flow = make_vector_field_flow(
        "cooling", cooling_field(p.alpha, p.beta, p.gamma, p.t_room), tol);
    Region band = make_region(
        "band", {}, [p](Vec2 q) { return std::abs(q.x - p.t_room) - p.eps; }, true);

    Vec2 start{p.t_room, p.t_hot};
    ExitOutcome exit = exit_time(flow, band, start, horizon, tol);
    if (exit.status != MapStatus::Defined) {
        res.note = "never exits the band within horizon";
        return res;
    }
    res.exits = true;
    res.exit_time = exit.time;
    ExitOutcome ret = first_in(flow, band, exit.point, horizon - exit.time, tol);
    if (ret.status != MapStatus::Defined) {
        res.note = "exits but never returns within horizon";
        return res;
    }
    res.return_time = ret.time;
    res.total_time = res.exit_time + res.return_time;
    return res;
}

} // namespace exitmap
