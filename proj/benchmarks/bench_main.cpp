#include "modscat/grid.hpp"
#include "modscat/oracle.hpp"
#include "modscat/solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace modscat;

static void BM_ForwardTransform(benchmark::State& st) {
    GridSpec g(static_cast<std::size_t>(st.range(0)), 512.0);
    SimulationState s = initial_data_gaussian(0.1, 2.0, g);
    for (auto _ : st) benchmark::DoNotOptimize(forward_transform(s.u));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_ForwardTransform)->Arg(4096)->Arg(32768);

static void BM_Step(benchmark::State& st) {
    GridSpec g(static_cast<std::size_t>(st.range(0)), 512.0);
    SimulationState s = initial_data_gaussian(0.1, 2.0, g);
    NonlinearitySpec nl({1.0, 0.5});
    for (auto _ : st) s = step(s, 0.005, nl);
    st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_Step)->Arg(4096)->Arg(32768);

static void BM_DirectP1(benchmark::State& st) {
    GridSpec g(8192, 1024.0);
    SpectralField f(g);
    for (std::size_t k = 0; k < g.n; ++k) f.values[k] = std::exp(-g.xi(k) * g.xi(k));
    const double t = static_cast<double>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(direct_p1({f, t, 1, {0.0}}));
}
BENCHMARK(BM_DirectP1)->Arg(5)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
