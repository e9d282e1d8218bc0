#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "sadiff/deficiency.hpp"
#include "sadiff/solve.hpp"

namespace {

using namespace sadiff;

SpectralProblem problem(int n) {
  SpectralProblem p;
  p.op.n = n;
  if (n == 1) {
    p.op.a = {constant_seq({0.0, 0.0}), constant_seq({-1.0, 0.0})};
  } else {
    p.op.a = {constant_seq({0.7, 0.0}), constant_seq({-0.3, 0.1}), constant_seq({0.4, 0.2}),
              constant_seq({3.0, 0.8})};
  }
  p.weight = constant_seq({1.0, 0.0});
  p.lambda = {0.0, 1.0};
  return p;
}

void BM_Step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SpectralProblem p = problem(n);
  std::vector<ComplexScalar> window(static_cast<std::size_t>(2 * n), {0.3, -0.1});
  for (auto _ : state) {
    ComplexScalar y = step(p, window, 5);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_Step)->Arg(1)->Arg(3);

void BM_SolutionBasis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::int64_t T = state.range(1);
  const SpectralProblem p = problem(n);
  for (auto _ : state) {
    SolutionBasis basis = solution_basis(p, T);
    benchmark::DoNotOptimize(basis);
  }
  state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK(BM_SolutionBasis)
    ->Args({1, 1024})
    ->Args({1, 8192})
    ->Args({3, 1024})
    ->Args({3, 8192})
    ->Unit(benchmark::kMicrosecond);

void BM_GramTrace(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SpectralProblem p = problem(n);
  const std::int64_t T = 1024;
  const SolutionBasis basis = solution_basis(p, T);
  std::vector<std::int64_t> cps;
  for (std::int64_t c = 8; c <= T; c *= 2) cps.push_back(c);
  for (auto _ : state) {
    GramTrace tr = gram_trace(p, basis, cps);
    benchmark::DoNotOptimize(tr);
  }
}
BENCHMARK(BM_GramTrace)->Arg(1)->Arg(3)->Unit(benchmark::kMicrosecond);

void BM_EstimateNLambda(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SpectralProblem p = problem(n);
  EstimateParams params;
  params.T_max = state.range(1);
  for (auto _ : state) {
    EstimateResult r = estimate_n_lambda(p, params);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_EstimateNLambda)
    ->Args({1, 8192})
    ->Args({3, 8192})
    ->Unit(benchmark::kMillisecond);

void BM_DeficiencyReport(benchmark::State& state) {
  const SpectralProblem p = problem(static_cast<int>(state.range(0)));
  ReportParams params;
  params.est.T_max = 4096;
  for (auto _ : state) {
    DeficiencyReport r = deficiency_report(p.op, p.weight, params);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_DeficiencyReport)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace
