#include <doctest.h>

#include <cmath>
#include <random>

#include "exitmap/planar.hpp"
#include "exitmap/realization.hpp"

using namespace exitmap;

namespace {
const Tolerances kTol{};
}

TEST_CASE("spec validation") {
    CHECK(validate_halfplane_spec(neg_map_spec()).ok);
    CHECK(validate_halfplane_spec(square_map_spec()).ok);
    CHECK(validate_halfplane_spec(scaled_neg_map_spec(2.5)).ok);

    SUBCASE("a map that is not identity on the positive axis is rejected") {
        MapSpec bad{"bad", [](double x) { return x >= 0.0 ? 2.0 * x : -x; }, {}};
        SpecEvidence ev = validate_halfplane_spec(bad);
        CHECK(!ev.ok);
        REQUIRE(!ev.failures.empty());
        CHECK(ev.failures.front().find("identity") != std::string::npos);
        CHECK_THROWS_AS(build_halfplane_realization(bad), std::invalid_argument);
    }
    SUBCASE("a non-monotone negative branch is rejected") {
        MapSpec bad{"wobble", [](double x) { return x >= 0.0 ? x : x * x * (1.1 + std::sin(5 * x)); }, {}};
        CHECK(!validate_halfplane_spec(bad).ok);
    }
}

TEST_CASE("realizing P(x) = -x reproduces the rotation flow") {
    HalfplaneRealization rf = build_halfplane_realization(neg_map_spec());

    // rho(r, theta) = r: orbits are circles
    for (double r : {0.5, 1.0, 2.7})
        for (double th : {-2.5, -0.3, 0.0, 1.2, 3.0})
            CHECK(rf.orbit_radius(r, th) == doctest::Approx(r).epsilon(1e-12));

    Flow rot = make_rotation(M_PI);
    for (Vec2 p : {Vec2{0.7, 0.2}, Vec2{-1.0, 0.0}, Vec2{0.0, -1.3}})
        for (double t : {0.3, 1.7}) {
            FlowEval a = rf.flow().at(t, p), b = rot.at(t, p);
            REQUIRE(a.ok());
            CHECK(dist(a.value, b.value) < 1e-9);
        }

    ExitOutcome e = first_out(rf.flow(), make_halfplane_region(HalfplaneSide::Lower), {-1.0, 0.0},
                              10.0, kTol);
    REQUIRE(e.status == MapStatus::Defined);
    CHECK(dist(e.point, {1.0, 0.0}) < 1e-7);
    CHECK(std::abs(e.time - 1.0) < 1e-7);
}

TEST_CASE("the origin is an equilibrium and a fixed point of the exit map") {
    HalfplaneRealization rf = build_halfplane_realization(square_map_spec());
    ExitOutcome e = first_out(rf.flow(), make_halfplane_region(HalfplaneSide::Lower), {0.0, 0.0},
                              5.0, kTol);
    REQUIRE(e.status == MapStatus::Defined);
    CHECK(e.time == 0.0);
    CHECK(dist(e.point, {0.0, 0.0}) == 0.0);
}

TEST_CASE("round-trip verification against the prescribed map") {
    SUBCASE("P(x) = -x on a few samples") {
        HalfplaneRealization rf = build_halfplane_realization(neg_map_spec());
        double xs[] = {-2.0, -1.0, -0.5};
        RealizationReport rep = verify_realization(rf, xs, 10.0, kTol);
        CHECK(rep.undefined == 0);
        CHECK(rep.max_point_error < 1e-6);
        CHECK(rep.max_time_error < 1e-6);
    }
    SUBCASE("P(x) = x^2 hits (4, 0) from (-2, 0) and verifies over [-3, 0]") {
        HalfplaneRealization rf = build_halfplane_realization(square_map_spec());
        ExitOutcome e = first_out(rf.flow(), make_halfplane_region(HalfplaneSide::Lower),
                                  {-2.0, 0.0}, 10.0, kTol);
        REQUIRE(e.status == MapStatus::Defined);
        CHECK(dist(e.point, {4.0, 0.0}) < 1e-5);

        std::vector<double> xs;
        for (int i = 0; i < 32; ++i) xs.push_back(-3.0 + 3.0 * i / 31);
        RealizationReport rep = verify_realization(rf, xs, 10.0, kTol);
        CHECK(rep.undefined == 0);
        CHECK(rep.max_point_error < 1e-5);
        CHECK(rep.max_time_error < 1e-6);
    }
}

TEST_CASE("reshaping map H is a bijection on probe annuli") {
    HalfplaneRealization rf = build_halfplane_realization(square_map_spec());
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> rad(0.1, 4.0), ang(-M_PI, M_PI);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Vec2 p = from_polar(rad(rng), ang(rng));
        worst = std::max(worst, dist(rf.reshape_inverse(rf.reshape(p)), p));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("radial monotonicity and orbit non-crossing") {
    HalfplaneRealization rf = build_halfplane_realization(square_map_spec());
    for (double th = -M_PI; th <= M_PI; th += M_PI / 16) {
        double prev = rf.orbit_radius(0.05, th);
        for (double r = 0.1; r <= 4.0; r += 0.05) {
            double cur = rf.orbit_radius(r, th);
            CHECK(cur > prev);
            prev = cur;
        }
    }
    // distinct orbit curves stay disjoint
    for (double th = -M_PI; th <= M_PI; th += M_PI / 64)
        CHECK(rf.orbit_radius(1.3, th) > rf.orbit_radius(0.9, th));
}

TEST_CASE("realized exit map passes the structural checks on the line parameter") {
    HalfplaneRealization rf = build_halfplane_realization(square_map_spec());
    BoundedRegion lower = make_halfplane(HalfplaneSide::Lower, -3.0, 3.0);
    ParametricMap F = sample_exit_map(rf.flow(), lower, 49, 20.0, kTol);
    CHECK(F.total());
    CHECK(check_monotonicity(F, kTol).verdict == CheckVerdict::Pass);
    CHECK(check_two_to_one(F, kTol).verdict == CheckVerdict::Pass);
    // x^2 then identity: exactly one interior minimum, at the fixed origin
    CHECK(check_extremum_count(F, kTol).verdict == CheckVerdict::Pass);
}

TEST_CASE("realized flows satisfy the flow axioms on probes") {
    HalfplaneRealization rf = build_halfplane_realization(square_map_spec());
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    std::vector<GroupLawProbe> probes;
    for (int i = 0; i < 50; ++i) probes.push_back({U(rng), U(rng), Vec2{U(rng), U(rng)}});
    auto rep = group_law_residual(rf.flow(), probes);
    CHECK(rep.skipped == 0);
    CHECK(rep.max_residual < 1e-6);
}

TEST_CASE("disc realization round trip") {
    CircleMapSpec circle = circle_map_from_halfplane(neg_map_spec());

    SUBCASE("the induced circle map is identity up to 1/2 and wraps to 0") {
        CHECK(circle.P(0.2) == doctest::Approx(0.2));
        CHECK(circle.P(0.5) == doctest::Approx(0.5));
        CHECK(circle.P(0.999) < 0.02);
        // decreasing past the maximum
        CHECK(circle.P(0.6) > circle.P(0.7));
    }
    SUBCASE("alpha = 1/2: exit map of the built flow equals the input at 64 samples") {
        DiscRealization dr = build_disc_realization(circle);
        BoundedRegion disc = make_disc({0, 0}, 1.0);
        ParametricMap F = sample_exit_map(dr.flow, disc, 64, 20.0, kTol);
        double worst = 0.0;
        for (const MapSample& m : F.samples) {
            REQUIRE(m.status == MapStatus::Defined);
            worst = std::max(worst, F.boundary.param_distance(m.value, circle.P(m.s)));
        }
        CHECK(worst < 1e-5);
    }
    SUBCASE("alpha = 1/3 via the piecewise-linear reparametrization") {
        CircleMapSpec third = with_maximum_at(circle, 1.0 / 3.0);
        CHECK(third.P(0.2) == doctest::Approx(0.2).epsilon(1e-9)); // identity below alpha
        DiscRealization dr = build_disc_realization(third);
        BoundedRegion disc = make_disc({0, 0}, 1.0);
        ParametricMap F = sample_exit_map(dr.flow, disc, 64, 20.0, kTol);
        double worst = 0.0;
        for (const MapSample& m : F.samples) {
            REQUIRE(m.status == MapStatus::Defined);
            worst = std::max(worst, F.boundary.param_distance(m.value, third.P(m.s)));
        }
        CHECK(worst < 1e-4);
    }
    SUBCASE("hypothesis probes reject a non-unimodal circle map") {
        CircleMapSpec bad{"bad", [](double s) { return s < 0.5 ? s : 0.5 + 0.4 * std::sin(8 * s); },
                          0.5};
        CHECK_THROWS_AS(build_disc_realization(bad), std::invalid_argument);
    }
}
