#include <benchmark/benchmark.h>

#include <cmath>

#include "nehari/mountain_pass.hpp"
#include "nehari/operator.hpp"
#include "nehari/spectrum.hpp"
#include "nehari/variational.hpp"

using namespace nehari;

namespace {

Operator square_operator(int n) {
  const GridPtr g = Grid::build(Rectangle{-1, 1, -1, 1}, n);
  return Operator::assemble(sample(expr::parse("-pi^2/4"), g).field);
}

Field bump(const GridPtr& g) {
  return sample(expr::parse("(1-x^2)*(1-y^2)*(1+0.3*x)"), g).field;
}

void BM_SolveSpd(benchmark::State& state) {
  const Operator a = square_operator(static_cast<int>(state.range(0)));
  const Field rhs = bump(a.grid_ptr());
  for (auto _ : state) benchmark::DoNotOptimize(solve_spd(a, rhs));
  state.SetComplexityN(static_cast<int64_t>(a.size()));
}
BENCHMARK(BM_SolveSpd)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Gradient(benchmark::State& state) {
  const Operator a = square_operator(static_cast<int>(state.range(0)));
  const Field u = bump(a.grid_ptr());
  const ProblemParams params{4.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(grad_H(a, params, u));
}
BENCHMARK(BM_Gradient)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_OperatorApply(benchmark::State& state) {
  const Operator a = square_operator(static_cast<int>(state.range(0)));
  const Field u = bump(a.grid_ptr());
  for (auto _ : state) benchmark::DoNotOptimize(a.apply(u));
}
BENCHMARK(BM_OperatorApply)->Arg(128)->Arg(256);

void BM_Eigs(benchmark::State& state) {
  const Operator a = square_operator(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eig_smallest(a, 4, 1e-8));
}
BENCHMARK(BM_Eigs)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_GroundState(benchmark::State& state) {
  const Operator a = square_operator(static_cast<int>(state.range(0)));
  SolveConfig c;
  c.seed = expr::parse("(x-1)*(y-1)*(x+1)*(y+1)");
  c.morse_check = false;
  for (auto _ : state) benchmark::DoNotOptimize(ground_state(a, c));
}
BENCHMARK(BM_GroundState)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
