#include <benchmark/benchmark.h>

#include "crsim/crs_cell.hpp"
#include "crsim/ecm_device.hpp"
#include "crsim/exec.hpp"
#include "crsim/microcode.hpp"

using namespace crsim;

static void BM_SolveCellDc(benchmark::State& state) {
    const EcmParams p;
    double v = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_cell_dc(v, EcmState{2e-9}, p));
        v = v > 1.2 ? 0.3 : v + 0.01;
    }
}
BENCHMARK(BM_SolveCellDc);

static void BM_SolveCrsDc(benchmark::State& state) {
    const EcmParams p;
    const CrsDeviceState s = CrsDeviceState::zero(p);
    for (auto _ : state) benchmark::DoNotOptimize(solve_crs_dc(1.4, s, p));
}
BENCHMARK(BM_SolveCrsDc);

static void BM_CrsWritePulse(benchmark::State& state) {
    const EcmParams p;
    for (auto _ : state) benchmark::DoNotOptimize(drive_crs(CrsDeviceState::zero(p), 2.8, 100e-6, p));
}
BENCHMARK(BM_CrsWritePulse)->Unit(benchmark::kMillisecond);

static void BM_GenerateAdder(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(gen_tc_adder(n));
}
BENCHMARK(BM_GenerateAdder)->Arg(8)->Arg(64);

static void BM_Behavioral(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Program p = gen_pc_adder(n);
    const Word a = Word::from_int(0x5a, n), b = Word::from_int(0x33, n);
    for (auto _ : state) benchmark::DoNotOptimize(run_behavioral(p, a, b, false));
}
BENCHMARK(BM_Behavioral)->Arg(8)->Arg(32);
BENCHMARK_MAIN();
