#include <doctest.h>

#include <complex>
#include <random>
#include <vector>

#include "sadiff/coeff_seq.hpp"
#include "sadiff/errors.hpp"
#include "sadiff/expr.hpp"
#include "support.hpp"

using namespace sadiff;
using testsup::fsa_const;

TEST_CASE("shift expression validation") {
  ShiftExpr L;
  L.k = 1;
  L.s = 1;
  L.fwd = {constant_seq({2.0, 0.0}), constant_seq({-1.0, 0.0})};
  L.bwd = {constant_seq({-1.0, 0.0})};
  CHECK_NOTHROW(validate(L));

  ShiftExpr wrong = L;
  wrong.fwd.pop_back();
  CHECK_THROWS_AS(validate(wrong), precondition_error);

  ShiftExpr zerolead = L;
  zerolead.fwd[1] = constant_seq({0.0, 0.0});
  CHECK_THROWS_AS(validate(zerolead), precondition_error);
}

TEST_CASE("fsa validation") {
  CHECK_NOTHROW(validate(fsa_const({{2.0, 0.0}, {-1.0, 0.0}})));
  // A_0 must be real.
  FSAExpr bad = fsa_const({{2.0, 0.5}, {-1.0, 0.0}});
  CHECK_THROWS_AS(validate(bad), precondition_error);
  // A_n must be nonvanishing.
  FSAExpr deg = fsa_const({{2.0, 0.0}, {0.0, 0.0}});
  CHECK_THROWS_AS(validate(deg), precondition_error);
}

TEST_CASE("pointwise application of the free Laplacian stencil") {
  // (Ly)(t) = -y(t+1) + 2 y(t) - y(t-1).
  const FSAExpr L = fsa_const({{2.0, 0.0}, {-1.0, 0.0}});
  const CoeffSeq y = testsup::delta_seq(1, -5, 10);
  CHECK(apply(L, y, 0) == ComplexScalar{-1.0, 0.0});
  CHECK(apply(L, y, 1) == ComplexScalar{2.0, 0.0});
  CHECK(apply(L, y, 2) == ComplexScalar{-1.0, 0.0});
  CHECK(apply(L, y, 3) == ComplexScalar{0.0, 0.0});
}

TEST_CASE("embedding a self-adjoint expression into shift form") {
  std::mt19937_64 g(21);
  const FSAExpr L = testsup::random_fsa(g, 2);
  const ShiftExpr E = embed(L);
  CHECK(E.k == 2);
  CHECK(E.s == 2);
  for (int j = 1; j <= 2; ++j)
    CHECK(approx_equal_on(E.bwd[j - 1], conj(L.a[j]), 0, 80, 1e-14));
  // Same action on a sampled vector.
  const CoeffSeq y = testsup::random_compact(g, -4, 20);
  for (std::int64_t t = 2; t <= 12; ++t) {
    const ComplexScalar d = apply(L, y, t) - apply(E, y, t);
    CHECK(std::abs(d) <= 1e-13);
  }
}

TEST_CASE("formal adjoint is an involution") {
  std::mt19937_64 g(22);
  for (int rep = 0; rep < 100; ++rep) {
    const int k = static_cast<int>(g() % 4);
    const int s = static_cast<int>(g() % 4);
    if (k == 0 && s == 0) continue;
    const ShiftExpr L = testsup::random_shift(g, k, s);
    const ShiftExpr LL = formal_adjoint(formal_adjoint(L));
    REQUIRE(LL.k == L.k);
    REQUIRE(LL.s == L.s);
    for (int j = 0; j <= k; ++j) CHECK(approx_equal_on(LL.fwd[j], L.fwd[j], 0, 100, 1e-12));
    for (int j = 1; j <= s; ++j)
      CHECK(approx_equal_on(LL.bwd[j - 1], L.bwd[j - 1], 0, 100, 1e-12));
  }
}

TEST_CASE("adjoint swaps spans and conjugates") {
  std::mt19937_64 g(23);
  const ShiftExpr L = testsup::random_shift(g, 2, 1);
  const ShiftExpr A = formal_adjoint(L);
  CHECK(A.k == 1);
  CHECK(A.s == 2);
}

TEST_CASE("self-adjointness detection") {
  std::mt19937_64 g(24);
  for (int n = 1; n <= 3; ++n) {
    const FSAExpr L = testsup::random_fsa(g, n);
    CHECK(is_formally_self_adjoint(embed(L)).pass);
  }

  // Odd order always fails.
  const ShiftExpr odd = testsup::random_shift(g, 2, 1);
  const SelfAdjointReport rep = is_formally_self_adjoint(odd);
  CHECK(!rep.pass);
  CHECK(!rep.reason.empty());

  // A perturbed backward coefficient is caught and located.
  ShiftExpr E = embed(fsa_const({{1.0, 0.0}, {0.6, 0.3}}));
  std::vector<ComplexScalar> w(8, ComplexScalar{0.6, -0.3});
  w[5] += ComplexScalar{1e-3, 0.0};
  E.bwd[0] = table_seq(0, std::move(w), ConstantTail{{0.6, -0.3}});
  const SelfAdjointReport bad = is_formally_self_adjoint(E);
  CHECK(!bad.pass);
  CHECK(bad.coeff_index == 1);
  CHECK(bad.at == 5);

  // An imaginary part in A_0 is caught.
  ShiftExpr E2 = embed(testsup::random_fsa(g, 1));
  E2.fwd[0] = constant_seq({1.0, 0.25});
  CHECK(!is_formally_self_adjoint(E2).pass);
}

TEST_CASE("binomial coefficients") {
  CHECK(binomial(0, 0) == 1);
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(12, 6) == 924);
  CHECK(binomial(4, 7) == 0);
  CHECK(binomial(24, 12) == 2704156);
  CHECK_THROWS_AS(binomial(25, 2), precondition_error);
}

TEST_CASE("delta/nabla conversion: hand-checked order two") {
  // p_0 = 1, p_1 = 1, q_1 = 1/2 gives A_0 = 3, A_1 = -1 + i/2.
  DeltaNablaExpr d;
  d.n = 1;
  d.p = {constant_seq({1.0, 0.0}), constant_seq({1.0, 0.0})};
  d.q = {constant_seq({0.5, 0.0})};
  const FSAExpr L = from_delta_nabla(d, 30);
  for (std::int64_t t : {0, 5, 29}) {
    CHECK(eval(L.a[0], t).real() == doctest::Approx(3.0));
    CHECK(eval(L.a[0], t).imag() == doctest::Approx(0.0));
    CHECK(eval(L.a[1], t).real() == doctest::Approx(-1.0));
    CHECK(eval(L.a[1], t).imag() == doctest::Approx(0.5));
  }
  // Exact constant continuation past the horizon.
  CHECK(eval(L.a[0], 1000).real() == doctest::Approx(3.0));

  // Pure -Delta Nabla is the free Laplacian stencil.
  DeltaNablaExpr lap;
  lap.n = 1;
  lap.p = {constant_seq({0.0, 0.0}), constant_seq({1.0, 0.0})};
  lap.q = {constant_seq({0.0, 0.0})};
  const FSAExpr M = from_delta_nabla(lap, 30);
  CHECK(eval(M.a[0], 3).real() == doctest::Approx(2.0));
  CHECK(eval(M.a[1], 3).real() == doctest::Approx(-1.0));
}

TEST_CASE("delta/nabla conversion matches the literal expansion") {
  std::mt19937_64 g(25);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 1 + static_cast<int>(g() % 3);
    const DeltaNablaExpr d = testsup::random_dn_const(g, n);
    const FSAExpr L = from_delta_nabla(d, 40);
    const CoeffSeq y = testsup::random_compact(g, -6, 30);
    for (std::int64_t t = 0; t <= 18; t += 3) {
      const ComplexScalar lit = testsup::dn_apply_literal(d, y, t);
      const ComplexScalar via = apply(L, y, t);
      CHECK(std::abs(via - lit) <= 1e-12 * (1.0 + std::abs(lit)));
    }
  }
}

TEST_CASE("delta/nabla conversion output is formally self-adjoint") {
  std::mt19937_64 g(26);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 1 + static_cast<int>(g() % 3);
    const FSAExpr L = from_delta_nabla(testsup::random_dn_const(g, n), 50);
    CHECK(is_formally_self_adjoint(embed(L)).pass);
  }
}

TEST_CASE("vanishing leading p is rejected") {
  DeltaNablaExpr d;
  d.n = 1;
  d.p = {constant_seq({1.0, 0.0}),
         table_seq(0, {{1.0, 0.0}, {0.0, 0.0}}, ConstantTail{{1.0, 0.0}})};
  d.q = {constant_seq({0.0, 0.0})};
  CHECK_THROWS_AS(from_delta_nabla(d, 30), precondition_error);
}
