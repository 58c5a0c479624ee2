#include <benchmark/benchmark.h>

#include "hbubble/blowup.hpp"
#include "hbubble/functionals.hpp"
#include "hbubble/mountain_pass.hpp"

using namespace hbubble;

namespace {

void BM_EnergySphere(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SurfaceMap w = make_sphere_bubble(1.0, n, 2 * n);
    const auto f = CurvatureField::constant(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(energy_value(w, f));
    state.SetComplexityN(static_cast<benchmark::IterationCount>(w.size()));
}
BENCHMARK(BM_EnergySphere)->RangeMultiplier(2)->Range(32, 256)->Complexity();

// The expression field goes through the m_H quadrature at every sample.
void BM_EnergyExpressionField(benchmark::State& state) {
    const SurfaceMap c = make_cone_map(0.5, 64, 64);
    const auto f = parse_field_spec("expr:1 + 0.5 * exp(-r^2)");
    for (auto _ : state) benchmark::DoNotOptimize(energy_value(c, f, 1.1));
}
BENCHMARK(BM_EnergyExpressionField);

void BM_Gradient(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SurfaceMap c = make_cone_map(0.5, n, n);
    const auto f = CurvatureField::constant(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(energy_gradient(c, f, 1.1));
    state.SetComplexityN(static_cast<benchmark::IterationCount>(c.size()));
}
BENCHMARK(BM_Gradient)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_Hessian(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const SurfaceMap c = make_cone_map(0.5, n, n);
    const auto f = CurvatureField::constant(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(energy_hessian(c, f, 1.1));
}
BENCHMARK(BM_Hessian)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_RadialProfile(benchmark::State& state) {
    const SurfaceMap w = make_sphere_bubble(2.0, 64, 128);
    const auto f = CurvatureField::constant(2.0);
    for (auto _ : state) benchmark::DoNotOptimize(radial_profile(w, f, 2.0));
}
BENCHMARK(BM_RadialProfile)->Unit(benchmark::kMillisecond);

void BM_Rescale(benchmark::State& state) {
    const SurfaceMap c = make_cone_map(0.5, 64, 64);
    const Concentration k = locate_concentration(c);
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(rescale(c, k.epsilon, k.z_star, kWindowRadius, n));
}
BENCHMARK(BM_Rescale)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
