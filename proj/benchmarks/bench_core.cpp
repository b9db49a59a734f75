#include <benchmark/benchmark.h>

#include <vector>

#include "ringqed/dynamics.hpp"
#include "ringqed/metrics.hpp"
#include "ringqed/spectra.hpp"
#include "ringqed/sweep.hpp"

using namespace ringqed;
using constants::two_pi;

namespace {
const CavityParams P = CavityParams::experiment_defaults();
const double DELTA30 = two_pi * 30e6;
}

static void BM_SteadyModes(benchmark::State& state) {
    const auto a = with_target_s(static_cast<int>(state.range(0)), 0.9, P.wavelength);
    const DriveConfig d{0.0, DELTA30, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(steady_modes(P, a, d));
}
BENCHMARK(BM_SteadyModes)->Arg(4)->Arg(64);

static void BM_Scan(benchmark::State& state) {
    const auto c = uniform_coupling(4, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(scan(P, c, DELTA30, -5e5, 1.5e6, 2001));
}
BENCHMARK(BM_Scan);

static void BM_DoubleLorentzianFit(benchmark::State& state) {
    const auto s = scan(P, uniform_coupling(4, 1.0), DELTA30, -5e5, 1.8e6, 2001);
    for (auto _ : state) benchmark::DoNotOptimize(fit_double_lorentzian(s));
}
BENCHMARK(BM_DoubleLorentzianFit)->Unit(benchmark::kMicrosecond);

static void BM_PurityContour(benchmark::State& state) {
    const int res = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(purity_contour(P, 0.9, {1.0, 1e3}, {two_pi * 1e6, two_pi * 1e9}, res));
    }
}
BENCHMARK(BM_PurityContour)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_ThermalS(benchmark::State& state) {
    const std::vector<int> ns{8};
    for (auto _ : state) benchmark::DoNotOptimize(thermal_s_curve(P.wavelength, 31e-9, ns, 1000, 1));
}
BENCHMARK(BM_ThermalS)->Unit(benchmark::kMillisecond);

static void BM_IntegrateFull(benchmark::State& state) {
    const auto a = with_target_s(static_cast<int>(state.range(0)), 0.9, P.wavelength);
    const DriveConfig d{resonance_shifts(P, state.range(0), 0.9, DELTA30).dark, DELTA30, 1.0};
    IntegratorConfig cfg;
    cfg.t_end = 100.0 / P.kappa;
    for (auto _ : state) benchmark::DoNotOptimize(integrate_full(P, a, d, cfg));
}
BENCHMARK(BM_IntegrateFull)->Arg(4)->Arg(9)->Unit(benchmark::kMillisecond);

static void BM_PhaseShift(benchmark::State& state) {
    const auto a = with_target_s(4, 0.9, P.wavelength);
    for (auto _ : state) benchmark::DoNotOptimize(phase_shift(P, a, 2.5 * P.wavelength, DELTA30));
}
BENCHMARK(BM_PhaseShift)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
