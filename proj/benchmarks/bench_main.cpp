#include <benchmark/benchmark.h>

#include <numbers>

#include "ktrg/coefficients.hpp"
#include "ktrg/covariance.hpp"
#include "ktrg/flow.hpp"
#include "ktrg/manifold.hpp"
#include "ktrg/oracle.hpp"
#include "ktrg/polymer.hpp"

using namespace ktrg;

namespace {

constexpr double kAlphaSq = 8.0 * std::numbers::pi;
constexpr double kC = -0.39232106808;

void BM_Decompose(benchmark::State& state) {
  const int R = static_cast<int>(state.range(0));
  auto lattice = Lattice::make(3, R, 3, 0.1);
  auto cutoffs = cov::build_cutoffs(3, 1, R);
  for (auto _ : state) benchmark::DoNotOptimize(cov::decompose(lattice, cutoffs, {}));
}
BENCHMARK(BM_Decompose)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_Coefficients(benchmark::State& state) {
  cov::StackOptions options;
  options.tail = false;
  auto stack = cov::decompose(Lattice::make(3, 5, 3, 0.0), cov::build_cutoffs(3, 1, 5), options);
  for (auto _ : state) benchmark::DoNotOptimize(coeffs::compute(stack, kAlphaSq));
}
BENCHMARK(BM_Coefficients)->Unit(benchmark::kMillisecond);

void BM_FlowTrajectory(benchmark::State& state) {
  auto c = flow::FlowCoefficients::limits(9, kC);
  flow::FlowConfig cfg;
  cfg.horizon = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(flow::trajectory(0.01, 0.01, cfg, c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FlowTrajectory)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_SeparatrixFixedPoint(benchmark::State& state) {
  manifold::ManifoldProblem p;
  p.y1 = 0.01;
  p.coeffs = flow::FlowCoefficients::limits(9, kC);
  for (auto _ : state) benchmark::DoNotOptimize(manifold::solve_fixed_point(p));
}
BENCHMARK(BM_SeparatrixFixedPoint)->Unit(benchmark::kMillisecond);

void BM_ConnectedPolymers(benchmark::State& state) {
  auto paving = poly::Paving::make(Lattice::make(3, 2, 3), 0);
  for (auto _ : state) benchmark::DoNotOptimize(poly::connected_polymers(paving, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ConnectedPolymers)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_OracleNeutral(benchmark::State& state) {
  auto lattice = Lattice::make(5, 1, 5);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(oracle::neutral_Z(lattice, kAlphaSq, 0.05, n));
}
BENCHMARK(BM_OracleNeutral)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
