#include <benchmark/benchmark.h>

#include "polyshoot/integrator.hpp"
#include "polyshoot/shooting.hpp"

using namespace polyshoot;

namespace {

ProblemSpec biharmonic() { return build_problem("biharmonic", {{"N", 6}, {"p", 2}}); }

ShootOptions starts(int n) {
  ShootOptions o;
  o.multistart_count = n;
  return o;
}

void BM_MultistartSerial(benchmark::State& state) {
  const auto spec = biharmonic();
  const auto opts = starts(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(multistart_serial(spec, opts));
}

void BM_MultistartParallel(benchmark::State& state) {
  const auto spec = biharmonic();
  const auto opts = starts(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(multistart(spec, opts));
}

void BM_IntegrateStepper(benchmark::State& state) {
  const auto spec = build_problem("dirichlet-poly", {{"N", 10}, {"alpha", 4}, {"p", 2}});
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  for (auto _ : state) benchmark::DoNotOptimize(integrate(spec, a, 0.5));
}

void BM_IntegratePicard(benchmark::State& state) {
  const auto spec = build_problem("dirichlet-poly", {{"N", 10}, {"alpha", 4}, {"p", 2}});
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  IntegratorOptions o;
  o.method = IvpMethod::Picard;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(spec, a, 0.5, o));
}

}  // namespace

BENCHMARK(BM_MultistartSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultistartParallel)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_IntegrateStepper)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IntegratePicard)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
