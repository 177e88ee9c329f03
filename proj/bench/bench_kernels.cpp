// Serial reference kernels against their OpenMP counterparts on one
// full-window realization.

#include <benchmark/benchmark.h>

#include "mmwia/simulator.hpp"

using namespace mmwia;

namespace {

struct Fixture {
    SystemConfig cfg = SystemConfig::defaults();
    BlockageModel model{LosBall{100, 1}};
    Simulator sim{cfg, model, Protocol::make(ProtocolName::Baseline, 16, 4)};
    NetworkRealization real = sample_realization(cfg, model, SimulationConfig{}, {0, 0});
    std::vector<UserOutcome> after_cs = sim.run_cell_search(real);
    std::vector<UserOutcome> after_ra = [this] {
        auto o = after_cs;
        sim.run_random_access(real, o);
        return o;
    }();
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_CellSearchSerial(benchmark::State& st) {
    const auto& f = fixture();
    for (auto _ : st) benchmark::DoNotOptimize(f.sim.run_cell_search_serial(f.real));
}
void BM_CellSearchParallel(benchmark::State& st) {
    const auto& f = fixture();
    for (auto _ : st) benchmark::DoNotOptimize(f.sim.run_cell_search(f.real));
}

void BM_RandomAccessSerial(benchmark::State& st) {
    const auto& f = fixture();
    for (auto _ : st) {
        auto o = f.after_cs;
        f.sim.run_random_access_serial(f.real, o);
        benchmark::DoNotOptimize(o.data());
    }
}
void BM_RandomAccessParallel(benchmark::State& st) {
    const auto& f = fixture();
    for (auto _ : st) {
        auto o = f.after_cs;
        f.sim.run_random_access(f.real, o);
        benchmark::DoNotOptimize(o.data());
    }
}

void BM_DataPhaseSerial(benchmark::State& st) {
    const auto& f = fixture();
    for (auto _ : st) {
        auto o = f.after_ra;
        f.sim.run_data_phase_serial(f.real, o);
        benchmark::DoNotOptimize(o.data());
    }
}
void BM_DataPhaseParallel(benchmark::State& st) {
    const auto& f = fixture();
    for (auto _ : st) {
        auto o = f.after_ra;
        f.sim.run_data_phase(f.real, o);
        benchmark::DoNotOptimize(o.data());
    }
}

}  // namespace

BENCHMARK(BM_CellSearchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CellSearchParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RandomAccessSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RandomAccessParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DataPhaseSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DataPhaseParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
