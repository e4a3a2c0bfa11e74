#include <benchmark/benchmark.h>

#include <cmath>

#include "rotmin/profile.hpp"
#include "rotmin/spectrum.hpp"

using namespace rotmin;

namespace {

const PeriodicProfile& example1() {
    static const PeriodicProfile p =
        solve_periodic(ShootingProblem::with_default_bracket(RotationParams::from_nl(5, 1)));
    return p;
}

void BM_HalfFlight(benchmark::State& state) {
    const auto params = RotationParams::from_nl(static_cast<int>(state.range(0)), 1);
    const double a0 = 0.15 * std::sqrt(5.0 / params.n());
    for (auto _ : state) benchmark::DoNotOptimize(half_flight(params, a0).t_half);
}
BENCHMARK(BM_HalfFlight)->Arg(5)->Arg(50);

void BM_SolvePeriodic(benchmark::State& state) {
    const auto params = RotationParams::from_nl(5, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_periodic(ShootingProblem::with_default_bracket(params)).a0);
}
BENCHMARK(BM_SolvePeriodic);

void BM_Discriminant(benchmark::State& state) {
    const auto& p = example1();
    const auto mode = ModeIndex::make(static_cast<int>(state.range(0)), 0, p.params);
    for (auto _ : state)
        benchmark::DoNotOptimize(discriminant(p, mode, OperatorKind::jacobi, -10.0).delta0);
}
BENCHMARK(BM_Discriminant)->Arg(0)->Arg(4);

void BM_Coefficients(benchmark::State& state) {
    const auto& p = example1();
    const auto mode = ModeIndex::make(1, 1, p.params);
    const ProfileState s{0.1, 0.3, 0.7};
    double lambda = -3.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(coefficients(mode, OperatorKind::jacobi, lambda, s, p.params));
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_Coefficients);

}  // namespace

BENCHMARK_MAIN();
