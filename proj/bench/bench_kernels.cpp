// Serial reference against the OpenMP kernels.
#include <benchmark/benchmark.h>

#include "hlab/functions.hpp"
#include "hlab/kernel.hpp"
#include "hlab/operators.hpp"
#include "hlab/parallel.hpp"

using namespace hlab;

namespace {

Grid grid_for(const benchmark::State& st) { return Grid(1, {0.0, 0.0}, 1.0, static_cast<int>(st.range(0))); }

void BM_ApplySerial(benchmark::State& st) {
  Grid g = grid_for(st);
  DiscreteOperator op(Kernel::hilbert(), g);
  GridFunction f = make_function(g, "steps(7,4)");
  for (auto _ : st) benchmark::DoNotOptimize(op.apply_serial(f));
}

void BM_ApplyParallel(benchmark::State& st) {
  Grid g = grid_for(st);
  DiscreteOperator op(Kernel::hilbert(), g);
  GridFunction f = make_function(g, "steps(7,4)");
  for (auto _ : st) benchmark::DoNotOptimize(op.apply(f));
}

void BM_MaximalSerial(benchmark::State& st) {
  Grid g = grid_for(st);
  GridFunction f = make_function(g, "power_abs(-0.5,0.3)");
  auto v = MaximalVariant::orlicz(YoungFunction::llogl(1.0));
  for (auto _ : st) benchmark::DoNotOptimize(maximal_serial(f, v));
}

void BM_MaximalParallel(benchmark::State& st) {
  Grid g = grid_for(st);
  GridFunction f = make_function(g, "power_abs(-0.5,0.3)");
  auto v = MaximalVariant::orlicz(YoungFunction::llogl(1.0));
  for (auto _ : st) benchmark::DoNotOptimize(maximal(f, v));
}

}  // namespace

BENCHMARK(BM_ApplySerial)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplyParallel)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MaximalSerial)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MaximalParallel)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  configure_threads_from_env();
  benchmark::Initialize(&argc, argv);
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
