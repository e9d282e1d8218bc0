#pragma once

// Shared test helpers: a deterministic portable RNG mapping, random expression
// generators, and a literal delta/nabla evaluator used as an independent
// oracle for the conversion code.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "sadiff/coeff_seq.hpp"
#include "sadiff/expr.hpp"
#include "sadiff/green.hpp"

namespace testsup {

using sadiff::CoeffSeq;
using sadiff::ComplexScalar;
using sadiff::DeltaNablaExpr;
using sadiff::ForwardExpr;
using sadiff::FSAExpr;
using sadiff::ShiftExpr;

// mt19937_64 output folded to [0,1) the same way on every platform.
inline double u01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline ComplexScalar unit_square(std::mt19937_64& g) {
  const double re = 2.0 * u01(g) - 1.0;
  const double im = 2.0 * u01(g) - 1.0;
  return {re, im};
}

// Unit-square sample rejected until |z| >= lo (needs lo < 1.4).
inline ComplexScalar unit_square_min(std::mt19937_64& g, double lo) {
  for (;;) {
    const ComplexScalar z = unit_square(g);
    if (std::abs(z) >= lo) return z;
  }
}

inline double real_min(std::mt19937_64& g, double lo) {
  for (;;) {
    const double v = 2.0 * u01(g) - 1.0;
    if (std::fabs(v) >= lo) return v;
  }
}

// Table on [0, window_len) with a constant tail. min_mod > 0 keeps every
// value (and the tail) at least that far from zero.
inline CoeffSeq random_coeff(std::mt19937_64& g, int window_len, double min_mod = 0.0,
                             bool force_real = false) {
  auto draw = [&]() -> ComplexScalar {
    if (force_real) return {min_mod > 0.0 ? real_min(g, min_mod) : 2.0 * u01(g) - 1.0, 0.0};
    return min_mod > 0.0 ? unit_square_min(g, min_mod) : unit_square(g);
  };
  std::vector<ComplexScalar> w(static_cast<std::size_t>(window_len));
  for (auto& v : w) v = draw();
  return sadiff::table_seq(0, std::move(w), sadiff::ConstantTail{draw()});
}

inline ForwardExpr random_forward(std::mt19937_64& g, int n, double min_lead = 0.5) {
  ForwardExpr L;
  L.n = n;
  for (int j = 0; j <= n; ++j) {
    const int wl = static_cast<int>(g() % 6);
    L.b.push_back(random_coeff(g, wl, j == n ? min_lead : 0.0));
  }
  sadiff::validate(L);
  return L;
}

inline FSAExpr random_fsa(std::mt19937_64& g, int n, double min_lead = 0.5) {
  FSAExpr L;
  L.n = n;
  for (int j = 0; j <= n; ++j) {
    const int wl = static_cast<int>(g() % 6);
    L.a.push_back(random_coeff(g, wl, j == n ? min_lead : 0.0, j == 0));
  }
  sadiff::validate(L);
  return L;
}

// Modulus in [lo, hi], uniform phase.
inline ComplexScalar annulus(std::mt19937_64& g, double lo, double hi) {
  const double m = lo + (hi - lo) * u01(g);
  const double ph = 6.283185307179586 * u01(g);
  return {m * std::cos(ph), m * std::sin(ph)};
}

// Random formally self-adjoint expression whose factorization sweep stays
// representable in double precision. For n >= 3 the sweep feeds products of
// previously computed factor values back into the recursion, so generic O(1)
// coefficients blow up doubly exponentially before the usual horizons; a
// dominant leading coefficient keeps the recursion inside a bounded basin.
inline FSAExpr random_fsa_stable(std::mt19937_64& g, int n) {
  if (n <= 2) return random_fsa(g, n);
  FSAExpr L;
  L.n = n;
  for (int j = 0; j < n; ++j) {
    const int wl = static_cast<int>(g() % 6);
    L.a.push_back(random_coeff(g, wl, 0.0, j == 0));
  }
  const int wl = static_cast<int>(g() % 6);
  std::vector<ComplexScalar> w(static_cast<std::size_t>(wl));
  for (auto& v : w) v = annulus(g, 2.5, 3.5);
  L.a.push_back(sadiff::table_seq(0, std::move(w), sadiff::ConstantTail{annulus(g, 2.5, 3.5)}));
  sadiff::validate(L);
  return L;
}

inline ShiftExpr random_shift(std::mt19937_64& g, int k, int s) {
  ShiftExpr L;
  L.k = k;
  L.s = s;
  for (int j = 0; j <= k; ++j)
    L.fwd.push_back(random_coeff(g, static_cast<int>(g() % 5), j == k && k >= 1 ? 0.5 : 0.0));
  for (int j = 1; j <= s; ++j)
    L.bwd.push_back(random_coeff(g, static_cast<int>(g() % 5), j == s ? 0.5 : 0.0));
  sadiff::validate(L);
  return L;
}

// Real constant-coefficient delta/nabla expression, p_n bounded away from 0.
inline DeltaNablaExpr random_dn_const(std::mt19937_64& g, int n) {
  DeltaNablaExpr d;
  d.n = n;
  for (int j = 0; j <= n; ++j)
    d.p.push_back(sadiff::constant_seq({j == n ? real_min(g, 0.5) : 2.0 * u01(g) - 1.0, 0.0}));
  for (int j = 1; j <= n; ++j) d.q.push_back(sadiff::constant_seq({2.0 * u01(g) - 1.0, 0.0}));
  sadiff::validate(d);
  return d;
}

inline CoeffSeq random_compact(std::mt19937_64& g, std::int64_t start, int len) {
  std::vector<ComplexScalar> w(static_cast<std::size_t>(len));
  for (auto& v : w) v = unit_square(g);
  return sadiff::compact_seq(start, std::move(w));
}

// Delta sequence at m, tabulated (with zero padding) on [lo, hi].
inline CoeffSeq delta_seq(std::int64_t m, std::int64_t lo, std::int64_t hi) {
  std::vector<ComplexScalar> w(static_cast<std::size_t>(hi - lo + 1), ComplexScalar{0.0, 0.0});
  w[static_cast<std::size_t>(m - lo)] = {1.0, 0.0};
  return sadiff::compact_seq(lo, std::move(w));
}

// Constant-coefficient builders for hand examples.
inline ForwardExpr fwd_const(std::vector<ComplexScalar> b) {
  ForwardExpr L;
  L.n = static_cast<int>(b.size()) - 1;
  for (const auto& v : b) L.b.push_back(sadiff::constant_seq(v));
  return L;
}

inline FSAExpr fsa_const(std::vector<ComplexScalar> a) {
  FSAExpr L;
  L.n = static_cast<int>(a.size()) - 1;
  for (const auto& v : a) L.a.push_back(sadiff::constant_seq(v));
  return L;
}

// ---- Literal delta/nabla evaluation -----------------------------------------
//
// The conversion oracle: apply the definition
//   sum_j (-1)^j Delta^j(p_j Nabla^j y)
//   + i sum_k [(-1)^{k+1} Delta^k(q_k y) + q_k Nabla^k y]
// with Delta f(t) = f(t+1) - f(t) and Nabla f(t) = f(t) - f(t-1) spelled out
// as operations on function objects, no binomial algebra anywhere.

using SeqFn = std::function<ComplexScalar(std::int64_t)>;

inline SeqFn seq_fn(CoeffSeq f) {
  return [f = std::move(f)](std::int64_t t) { return sadiff::eval(f, t); };
}

inline SeqFn delta_op(SeqFn f) {
  return [f = std::move(f)](std::int64_t t) { return f(t + 1) - f(t); };
}

inline SeqFn nabla_op(SeqFn f) {
  return [f = std::move(f)](std::int64_t t) { return f(t) - f(t - 1); };
}

inline SeqFn iterate(SeqFn (*op)(SeqFn), SeqFn f, int times) {
  for (int i = 0; i < times; ++i) f = op(std::move(f));
  return f;
}

inline SeqFn product_fn(SeqFn a, SeqFn b) {
  return [a = std::move(a), b = std::move(b)](std::int64_t t) { return a(t) * b(t); };
}

// (Ly)(t) for t >= 0; y must be evaluable on [t - n, t + n].
inline ComplexScalar dn_apply_literal(const DeltaNablaExpr& d, const CoeffSeq& y,
                                      std::int64_t t) {
  const SeqFn yf = seq_fn(y);
  ComplexScalar acc{0.0, 0.0};
  for (int j = 0; j <= d.n; ++j) {
    SeqFn term = iterate(&delta_op,
                         product_fn(seq_fn(d.p[static_cast<std::size_t>(j)]),
                                    iterate(&nabla_op, yf, j)),
                         j);
    acc += (j % 2 == 0 ? 1.0 : -1.0) * term(t);
  }
  for (int k = 1; k <= d.n; ++k) {
    const CoeffSeq& qk = d.q[static_cast<std::size_t>(k - 1)];
    SeqFn head = iterate(&delta_op, product_fn(seq_fn(qk), yf), k);
    SeqFn back = iterate(&nabla_op, yf, k);
    const ComplexScalar v =
        (k % 2 == 1 ? 1.0 : -1.0) * head(t) + sadiff::eval(qk, t) * back(t);
    acc += ComplexScalar{0.0, 1.0} * v;
  }
  return acc;
}

}  // namespace testsup
