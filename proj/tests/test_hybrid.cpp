#include <doctest.h>

#include <cmath>

#include "exitmap/fields.hpp"
#include "exitmap/hybrid.hpp"
#include "exitmap/realization.hpp"

using namespace exitmap;

namespace {
const Tolerances kTol{};
HybridConfig default_cfg() { return HybridConfig{}; }
} // namespace

TEST_CASE("bouncing ball flight times follow the geometric series") {
    ImpactingSystem ball = bouncing_ball_system(1.0, 0.5);
    HybridConfig cfg = default_cfg();
    cfg.policy = StartPolicy::PreferFlow;
    cfg.min_events = 12; // let at least ten bounces happen before the Zeno cutoff

    HybridTrajectory traj = simulate(ball, {1.0, 0.0}, 20.0, 100, cfg);
    REQUIRE(traj.jumps.size() >= 10);
    // flight times 2, 1, 0.5, ...
    CHECK(traj.jumps[0].t == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(traj.jumps[1].t - traj.jumps[0].t == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(traj.jumps[2].t - traj.jumps[1].t == doctest::Approx(0.5).epsilon(1e-7));
    // accumulated time after 10 events: 4 (1 - 2^-10)
    CHECK(std::abs(traj.jumps[9].t - 4.0 * (1.0 - std::pow(0.5, 10))) < 1e-6);

    SUBCASE("every jump applies the reset to the pre-point") {
        for (const JumpRecord& j : traj.jumps) {
            CHECK(std::abs(j.post.x - ball.reset(j.pre.x)) < 1e-9);
            CHECK(std::abs(j.post.y) < 1e-9);
            CHECK(std::abs(j.pre.y) < 1e-6);
        }
    }
    SUBCASE("event times strictly increase (no simultaneous jumps)") {
        for (std::size_t i = 1; i < traj.jumps.size(); ++i)
            CHECK(traj.jumps[i].t > traj.jumps[i - 1].t);
    }
}

TEST_CASE("bouncing ball is Zeno with accumulation 2 v0 / (g (1 - r))") {
    ImpactingSystem ball = bouncing_ball_system(1.0, 0.5);
    HybridConfig cfg = default_cfg();
    cfg.policy = StartPolicy::PreferFlow;

    HybridTrajectory traj = simulate(ball, {1.0, 0.0}, 20.0, 200, cfg);
    CHECK(traj.termination == Termination::ZenoDetected);
    CHECK(std::abs(traj.zeno.accumulation_time - 4.0) < 1e-3);

    ZenoReport rep = detect_zeno(traj, cfg);
    CHECK(rep.verdict == ZenoVerdict::Zeno);
    CHECK(std::abs(rep.accumulation_time - 4.0) < 1e-3);
}

TEST_CASE("impact oscillator is periodic, not Zeno") {
    ImpactingSystem osc = impact_oscillator_system(1.0);
    HybridConfig cfg = default_cfg();
    cfg.policy = StartPolicy::PreferFlow;

    HybridTrajectory traj = simulate(osc, {-1.0, 0.0}, 12.0, 100, cfg);
    CHECK(traj.termination == Termination::Horizon);
    REQUIRE(traj.jumps.size() >= 10);
    // the start point cannot flow, so the first jump happens at t = 0 and the
    // semicircular flights take time 1 each
    CHECK(traj.jumps[0].t == doctest::Approx(0.0));
    for (std::size_t i = 1; i < traj.jumps.size(); ++i) {
        CHECK(traj.jumps[i].t - traj.jumps[i - 1].t == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(dist(traj.jumps[i].pre, {-1.0, 0.0}) < 1e-6); // returns to the start
    }
    CHECK(detect_zeno(traj, cfg).verdict == ZenoVerdict::NotZeno);
}

TEST_CASE("short trajectories give an inconclusive Zeno verdict") {
    ImpactingSystem osc = impact_oscillator_system(1.0);
    HybridConfig cfg = default_cfg();
    cfg.policy = StartPolicy::PreferFlow;
    HybridTrajectory traj = simulate(osc, {-1.0, 0.0}, 12.0, 2, cfg);
    CHECK(traj.termination == Termination::MaxEvents);
    CHECK(detect_zeno(traj, cfg).verdict == ZenoVerdict::Inconclusive);
}

TEST_CASE("a sliding start point follows the sliding flow with zero jumps") {
    ImpactingSystem osc = impact_oscillator_system(1.0);
    CHECK(in_sliding_set(osc, 0.0, kTol)); // P(0)=0 and the origin is an equilibrium
    CHECK(!in_sliding_set(osc, 1.0, kTol));
    CHECK(!in_sliding_set(osc, -1.0, kTol));

    HybridConfig cfg = default_cfg();
    HybridTrajectory traj = simulate(osc, {0.0, 0.0}, 5.0, 10, cfg);
    CHECK(traj.jumps.empty());
    REQUIRE(!traj.segments.empty());
    CHECK(traj.segments[0].mode == HybridMode::Sliding);
    CHECK(traj.termination == Termination::Horizon);
}

TEST_CASE("induced systems") {
    SUBCASE("realized elastic reset with the gravity flow induces a ball-like system") {
        Flow phi1 = build_halfplane_realization(neg_map_spec()).flow();
        Flow phi2 = gravity_flow(1.0);
        InducedResult res = induced_system(phi1, phi2, -2.0, 2.0, 41, 10.0, kTol);
        REQUIRE(res.ok);
        REQUIRE(res.system.has_value());
        CHECK(res.system->reset.defined_at(-1.0));
        CHECK(res.system->reset(-1.0) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(res.system->reset(-0.4) == doctest::Approx(0.4).epsilon(1e-6));
    }
    SUBCASE("a flow whose boundary orbits never exit gives an empty reset domain") {
        Flow down = make_closed_form("descent", [](double t, Vec2 p) -> Vec2 {
            return {p.x, p.y - t};
        });
        InducedResult res = induced_system(down, gravity_flow(1.0), -1.0, 1.0, 17, 5.0, kTol);
        CHECK(!res.ok);
        CHECK(res.report.find("no exits") != std::string::npos);
    }
    SUBCASE("the oscillating shear flow does not induce: unresolved switching near 0") {
        Flow shear = conjugate_flow(translation_flow(), comsin_shear());
        InducedResult res = induced_system(shear, shear, -0.5, 0.5, 65, 10.0, kTol);
        CHECK(!res.ok);
        CHECK(res.report.find("unresolved") != std::string::npos);
        REQUIRE(!res.unresolved_at.empty());
        double nearest = res.unresolved_at.front();
        for (double u : res.unresolved_at) nearest = std::min(nearest, std::abs(u));
        CHECK(nearest < 0.01);
    }
}

TEST_CASE("normal form conjugation") {
    SUBCASE("oscillator mu = 2: h(x) = x/2 on the nonnegative axis, Q(x) = -x below 0") {
        ImpactingSystem osc = impact_oscillator_system(2.0);
        NormalFormResult nf = normal_form_conjugate(osc, kTol);
        CHECK(std::abs(nf.alpha) < 1e-9);
        CHECK(nf.conjugacy.fwd({1.0, 0.3}).x == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(nf.conjugacy.fwd({-1.0, 0.3}).x == doctest::Approx(-1.0));
        double worst = 0.0;
        for (int i = 0; i <= 64; ++i) {
            double x = -3.0 + 3.0 * i / 64;
            worst = std::max(worst, std::abs(nf.system.reset(x) + x));
        }
        CHECK(worst < 1e-6);

        ConjugacyReport rep = check_conjugacy_invariance(osc, nf.system, nf.conjugacy, kTol);
        CHECK(rep.max_residual() < 1e-8);
    }
    SUBCASE("mu = 1 is already in normal form") {
        ImpactingSystem osc = impact_oscillator_system(1.0);
        NormalFormResult nf = normal_form_conjugate(osc, kTol);
        CHECK(std::abs(nf.alpha) < 1e-9);
        for (double x : {-2.0, -0.5, 0.7, 1.4})
            CHECK(nf.system.reset(x) == doctest::Approx(osc.reset(x)).epsilon(1e-9));
    }
    SUBCASE("identity resets are rejected") {
        ImpactingSystem sys{"id", make_rotation(M_PI),
                            {"identity", [](double x) { return x; }, {}},
                            make_closed_form("still", [](double, Vec2 p) { return p; })};
        CHECK_THROWS_AS(normal_form_conjugate(sys, kTol), std::invalid_argument);
    }
    SUBCASE("identity conjugacy between different oscillators has a visible reset residual") {
        ImpactingSystem a = impact_oscillator_system(1.0);
        ImpactingSystem b = impact_oscillator_system(2.0);
        ConjugacyReport rep = check_conjugacy_invariance(a, b, identity_homeomorphism(), kTol);
        CHECK(rep.reset_residual > 0.1);
    }
}

TEST_CASE("poincare composition") {
    SUBCASE("oscillator mu = 1: x = -1 is a period-one fixed point") {
        ImpactingSystem osc = impact_oscillator_system(1.0);
        PoincareOutcome out = poincare_composition(osc, -1.0, 10.0, kTol);
        REQUIRE(out.kind == PoincareOutcome::Kind::Value);
        CHECK(std::abs(out.value - (-1.0)) < 1e-6);
        CHECK(out.fixed);
    }
    SUBCASE("bouncing ball contracts exit velocities by r") {
        ImpactingSystem ball = bouncing_ball_system(1.0, 0.5);
        PoincareOutcome out = poincare_composition(ball, -0.8, 10.0, kTol);
        REQUIRE(out.kind == PoincareOutcome::Kind::Value);
        CHECK(out.value == doctest::Approx(-0.4).epsilon(1e-6));
        CHECK(!out.fixed);
        PoincareOutcome rest = poincare_composition(ball, 0.0, 10.0, kTol);
        CHECK(rest.kind == PoincareOutcome::Kind::SlidingFixed);
        CHECK(rest.fixed);
    }
}

TEST_CASE("cooling return time") {
    CoolingParams p; // alpha = beta = gamma = 1, room 20, hot 80, eps 1

    SUBCASE("matches the closed-form linear-system oracle") {
        CoolingResult res = cooling_return_time(p, 60.0, kTol);
        REQUIRE(res.exits);
        CHECK(res.exit_time > 0.0);
        CHECK(res.return_time > 0.0);

        // closed form for u1(t) = Tw - 20 with A = [[-2, 1], [1, -1]]:
        // eigenvalues (-3 +- sqrt 5)/2, u(0) = (0, 60), u1 = c (e^{l1 t} - e^{l2 t})
        double l1 = (-3.0 + std::sqrt(5.0)) / 2.0, l2 = (-3.0 - std::sqrt(5.0)) / 2.0;
        double c = 60.0 / std::sqrt(5.0);
        auto u1 = [&](double t) { return c * (std::exp(l1 * t) - std::exp(l2 * t)); };
        auto cross = [&](double lo, double hi) { // u1 - eps crossing inside [lo, hi]
            for (int i = 0; i < 200; ++i) {
                double mid = 0.5 * (lo + hi);
                ((u1(mid) - p.eps > 0) == (u1(lo) - p.eps > 0) ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        };
        // u1 rises through eps, peaks, then decays below it
        double t_peak = std::log((l2 * c) / (l1 * c) * (l2 / l1)) // placeholder, scan instead
            ;
        (void)t_peak;
        double scan = 0.0, peak_at = 0.0, peak = -1e9;
        for (double t = 0.0; t < 20.0; t += 1e-3) {
            if (u1(t) > peak) {
                peak = u1(t);
                peak_at = t;
            }
            scan = t;
        }
        (void)scan;
        REQUIRE(peak > p.eps);
        double t_up = cross(0.0, peak_at);
        double t_down = cross(peak_at, 60.0);
        CHECK(std::abs(res.exit_time - t_up) < 1e-5);
        CHECK(std::abs(res.total_time - t_down) < 1e-5);
    }
    SUBCASE("a band wider than the excursion never exits") {
        CoolingParams wide = p;
        wide.eps = 70.0;
        CoolingResult res = cooling_return_time(wide, 40.0, kTol);
        CHECK(!res.exits);
        CHECK(res.note.find("never exits") != std::string::npos);
    }
    SUBCASE("total time grows as the band shrinks") {
        double prev = -1.0;
        for (double eps : {2.0, 1.0, 0.5}) {
            CoolingParams q = p;
            q.eps = eps;
            CoolingResult res = cooling_return_time(q, 80.0, kTol);
            REQUIRE(res.exits);
            CHECK(res.total_time > prev);
            prev = res.total_time;
        }
    }
}

TEST_CASE("impacting-system validation on samples") {
    ImpactingSystem osc = impact_oscillator_system(1.0);
    SystemValidation v = validate_impacting(osc, -2.0, 2.0, 33, 10.0, kTol);
    CHECK(v.ok);
    REQUIRE(!v.sliding_params.empty());
    CHECK(std::abs(v.sliding_params.front()) < 1e-9); // R_s = {0}
}
