#include <benchmark/benchmark.h>

#include <cstdint>

#include "sadiff/factor.hpp"

namespace {

using namespace sadiff;

// Constant-coefficient expressions whose factorization sweep stays bounded.
// For order six that needs a dominant leading coefficient: the sweep feeds
// products of computed factors back into the recursion.
FSAExpr stable_op(int n) {
  FSAExpr L;
  L.n = n;
  switch (n) {
    case 1:
      L.a = {constant_seq({2.0, 0.0}), constant_seq({-1.0, 0.3})};
      break;
    case 2:
      L.a = {constant_seq({2.0, 0.0}), constant_seq({0.5, 0.25}), constant_seq({1.0, -0.4})};
      break;
    default:
      L.a = {constant_seq({0.7, 0.0}), constant_seq({-0.3, 0.1}), constant_seq({0.4, 0.2}),
             constant_seq({3.0, 0.8})};
      break;
  }
  return L;
}

ForwardExpr stable_factor(int n) {
  ForwardExpr F;
  F.n = n;
  F.b = {constant_seq({1.0, 0.0})};
  for (int j = 1; j < n; ++j) F.b.push_back(constant_seq({0.3, -0.2}));
  F.b.push_back(constant_seq({1.0, 0.5}));
  return F;
}

void BM_Factorize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::int64_t h = state.range(1);
  const FSAExpr L = stable_op(n);
  for (auto _ : state) {
    Factorization f = factorize(L, h);
    benchmark::DoNotOptimize(f);
  }
  state.SetItemsProcessed(state.iterations() * h);
}
BENCHMARK(BM_Factorize)
    ->Args({1, 256})
    ->Args({2, 256})
    ->Args({3, 256})
    ->Args({3, 1024})
    ->Args({3, 4096})
    ->Unit(benchmark::kMicrosecond);

void BM_VerifyFactorization(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::int64_t h = state.range(1);
  const FSAExpr L = stable_op(n);
  const Factorization f = factorize(L, h);
  for (auto _ : state) {
    FactorizationCheck chk = verify_factorization(L, f, h - n);
    benchmark::DoNotOptimize(chk);
  }
  state.SetItemsProcessed(state.iterations() * h);
}
BENCHMARK(BM_VerifyFactorization)
    ->Args({2, 256})
    ->Args({3, 1024})
    ->Unit(benchmark::kMicrosecond);

void BM_ComposeWithAdjoint(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::int64_t h = state.range(1);
  const ForwardExpr F = stable_factor(n);
  for (auto _ : state) {
    FSAExpr L = compose_with_adjoint(F, h);
    benchmark::DoNotOptimize(L);
  }
  state.SetItemsProcessed(state.iterations() * h);
}
BENCHMARK(BM_ComposeWithAdjoint)
    ->Args({1, 256})
    ->Args({3, 256})
    ->Args({3, 4096})
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
