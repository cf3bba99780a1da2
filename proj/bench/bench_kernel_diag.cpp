// Serial versus OpenMP kernel diagonal on the alpha = 1/2 two-end model.
#include <benchmark/benchmark.h>

#include <vector>

#include "heatlab/h_transform.hpp"
#include "heatlab/heat_solver.hpp"

using namespace heatlab;

namespace {

struct Setup {
    WeightedModel model;
    GridSpec grid;
    std::vector<int> sources;
    std::vector<double> times{1.0, 10.0, 50.0};
};

const Setup& setup() {
    static const Setup s = [] {
        WeightedModel base(RadialProfile::two_end(RadialProfile::exp_alpha(0.5, 2), RadialProfile::hyperbolic(2)));
        Setup out{build_two_end_weight(base).transformed, {}, {}};
        out.grid.r_min = -40.0;
        out.grid.r_max = 200.0;
        out.grid.nodes = 2000;
        out.grid.dt = 0.1;
        for (int i = 300; i < 500; i += 4) out.sources.push_back(i);
        return out;
    }();
    return s;
}

void BM_KernelDiagSerial(benchmark::State& state) {
    const Setup& s = setup();
    for (auto _ : state) {
        KernelDiag kd = kernel_diag_serial(s.model, s.grid, BoundaryCondition::dirichlet, s.times, s.sources);
        benchmark::DoNotOptimize(kd.diag.data());
    }
    state.counters["sources"] = static_cast<double>(s.sources.size());
}

void BM_KernelDiagParallel(benchmark::State& state) {
    const Setup& s = setup();
    KernelOptions opt;
    opt.parallel = true;
    for (auto _ : state) {
        KernelDiag kd = kernel_diag(s.model, s.grid, BoundaryCondition::dirichlet, s.times, s.sources, opt);
        benchmark::DoNotOptimize(kd.diag.data());
    }
    state.counters["sources"] = static_cast<double>(s.sources.size());
}

}  // namespace

BENCHMARK(BM_KernelDiagSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_KernelDiagParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_MAIN();
