#include <benchmark/benchmark.h>

#include <cmath>

#include "exitmap/fields.hpp"
#include "exitmap/first_maps.hpp"

using namespace exitmap;

namespace {

void BM_ExitQueryClosedForm(benchmark::State& state) {
    Flow f = saddle_flow();
    BoundedRegion d = make_disc({0, 0}, 1.0);
    Tolerances tol;
    Vec2 x{std::cos(M_PI / 3), std::sin(M_PI / 3)};
    for (auto _ : state) {
        ExitOutcome e = exit_time(f, d.region, x, 100.0, tol);
        benchmark::DoNotOptimize(e);
    }
}

void BM_ExitQueryIntegrated(benchmark::State& state) {
    Flow f = make_vector_field_flow("saddle_field", [](Vec2 p) { return Vec2{p.x, -p.y}; });
    BoundedRegion d = make_disc({0, 0}, 1.0);
    Tolerances tol;
    Vec2 x{std::cos(M_PI / 3), std::sin(M_PI / 3)};
    for (auto _ : state) {
        ExitOutcome e = exit_time(f, d.region, x, 100.0, tol);
        benchmark::DoNotOptimize(e);
    }
}

void BM_HorizonCensoredQuery(benchmark::State& state) {
    // undefined query: marches membership samples all the way to the horizon
    Flow f = saddle_flow();
    BoundedRegion d = make_disc({0, 0}, 1.0);
    Tolerances tol;
    double horizon = static_cast<double>(state.range(0));
    for (auto _ : state) {
        ExitOutcome e = exit_time(f, d.region, {0.0, 1.0}, horizon, tol);
        benchmark::DoNotOptimize(e);
    }
    state.SetItemsProcessed(state.iterations());
}

void BM_ClassifyBoundaryPoint(benchmark::State& state) {
    Flow f = affine_focus_flow(1.0, 1.0, 1.0);
    Region lower = make_halfplane_region(HalfplaneSide::Lower);
    for (auto _ : state) {
        Classification c = classify_boundary_point(f, lower, {-2.0, 0.0}, 100.0, Tolerances{});
        benchmark::DoNotOptimize(c);
    }
}

} // namespace

BENCHMARK(BM_ExitQueryClosedForm);
BENCHMARK(BM_ExitQueryIntegrated);
BENCHMARK(BM_HorizonCensoredQuery)->Arg(10)->Arg(100);
BENCHMARK(BM_ClassifyBoundaryPoint);

BENCHMARK_MAIN();
