#pragma once

// Quasi-difference factorization: writing an even-order formally self-adjoint
// expression as L = Ln Ln+ + C with Ln purely forward of order n, B_0 == 1,
// B_n == A_n, and a real multiplication residual C. The factor coefficients
// are produced by a forward sweep and are unique once the initial triangle
// B_j(0..j-1), 1 <= j <= n-1, is fixed.

#include <complex>
#include <cstdint>
#include <vector>

#include "sadiff/coeff_seq.hpp"
#include "sadiff/expr.hpp"
#include "sadiff/green.hpp"

namespace sadiff {

/// Free values closing the factorization sweep: triangle[j-1] holds
/// B_j(0), ..., B_j(j-1) for 1 <= j <= n-1. Empty rows mean zeros.
using InitTriangle = std::vector<std::vector<ComplexScalar>>;

/// Factorization data on [0, horizon]: factors.b holds B_0..B_n (B_0 constant
/// one, B_n aliasing A_n), c is the real residual, and triangle records the
/// free initial values that were used.
struct Factorization {
  ForwardExpr factors;
  CoeffSeq c;
  InitTriangle triangle;
  std::int64_t horizon = 0;
};

/// Coefficients of Ln Ln+ as an expression of order 2n, tabulated on
/// [0, horizon]:
///   D_j(t) = sum_{k=j..n} B_k(t+k-j) conj(B_{k-j})(t+k-j).
/// Tails are exact when every factor tail is constant, last-value continuation
/// otherwise. D_0 is real by construction. The result is not validated: a
/// vanishing B_0 legitimately produces a vanishing top coefficient (degenerate
/// low-order composition), which downstream consumers reject themselves.
FSAExpr compose_with_adjoint(const ForwardExpr& ln, std::int64_t horizon);

/// Solve L = Ln Ln+ + C for the factor coefficients by the forward sweep
///   conj(B_{n-j})(t+n-j) = [A_j(t) - sum_{k=j..n-1} B_k(t+k-j) conj(B_{k-j})(t+k-j)]
///                          / B_n(t+n-j),   j = n-1, ..., 1,
/// then C(t) = A_0(t) - sum_{k=0..n} |B_k(t+k)|^2. The divisions are guarded
/// by a relative floor on |B_n|; a violation throws precondition_error.
Factorization factorize(const FSAExpr& l, std::int64_t horizon, const InitTriangle& triangle);

/// factorize with an all-zero initial triangle.
Factorization factorize(const FSAExpr& l, std::int64_t horizon);

struct FactorizationCheck {
  bool pass = false;
  double max_deviation = 0.0;  // |D_j + [j==0] C - A_j| at the worst point
  double scale = 0.0;          // local recomposition magnitude at that point
  int worst_j = 0;
  std::int64_t worst_t = 0;
};

/// Recompose the factors and compare coefficientwise against l for
/// t in [0, window], j = 0..n. The deviation at each point is measured
/// relative to the local recomposition magnitude (1 + |A_j| + the sum of
/// |B_k conj(B_{k-j})| terms), since the sweep can produce large factors whose
/// products cancel; pass iff every ratio is <= tol. The reported pair is the
/// deviation and scale at the worst point. Requires window <= f.horizon - n so
/// every factor value is tabulated.
FactorizationCheck verify_factorization(const FSAExpr& l, const Factorization& f,
                                        std::int64_t window, double tol = 1e-10);

}  // namespace sadiff
