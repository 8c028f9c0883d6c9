#include <benchmark/benchmark.h>

#include "infdist/converter.hpp"
#include "infdist/dikin.hpp"
#include "infdist/oracle.hpp"

namespace {

using infdist::Polytope;
using infdist::Rng;
using infdist::Vector;

Polytope cube(int d) { return Polytope::box(Vector::Constant(d, -1), Vector::Constant(d, 1)); }

void BM_DikinStep(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  infdist::DikinWalk walk(cube(d), infdist::linear_density(Vector::Ones(d)), 0.8);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(walk.step(rng));
  state.counters["acceptance"] = walk.acceptance_rate();
}
BENCHMARK(BM_DikinStep)->Arg(1)->Arg(2)->Arg(3)->Arg(8);

void BM_ConvertExact(benchmark::State& state) {
  const Polytope p = cube(1);
  const auto f = infdist::linear_density(Vector::Ones(1));
  Rng rng(2);
  const infdist::ExactSampler exact(p, f, rng);
  const auto params = infdist::compute_params(0.5, 1.0, 1.0, 2.0, 1);
  const infdist::SampleOracle oracle = [&] { return exact(rng); };
  for (auto _ : state) benchmark::DoNotOptimize(infdist::convert(p, oracle, params, rng));
}
BENCHMARK(BM_ConvertExact);

void BM_CellMasses(benchmark::State& state) {
  const Polytope p = cube(2);
  const auto f = infdist::norm1_density(1.0, 2);
  const infdist::GridSpec spec{Vector::Constant(2, -1), Vector::Constant(2, 1), {20, 20}};
  for (auto _ : state) benchmark::DoNotOptimize(infdist::cell_masses(p, f, spec));
}
BENCHMARK(BM_CellMasses)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
