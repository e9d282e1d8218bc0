#pragma once

// Discrete Green/Lagrange identity machinery for pure forward expressions
// (Ln y)(t) = sum_{j=0..n} B_j(t+j) y(t+j) and the boundary bracket of a
// formally self-adjoint expression. The summation-by-parts identity
//
//   sum_{t=k..r} [conj(y) (Ln x) - conj(Ln+ y) x] = s[x,y](r+1) - s[x,y](k)
//
// holds exactly; green_defect evaluates both sides independently and returns
// their difference.

#include <cstdint>
#include <vector>

#include "sadiff/coeff_seq.hpp"
#include "sadiff/expr.hpp"

namespace sadiff {

/// Pure forward expression of span n; b holds B_0..B_n with B_n nonvanishing.
struct ForwardExpr {
  int n = 0;
  std::vector<CoeffSeq> b;
};

void validate(const ForwardExpr& L);

/// (Ln y)(t) = sum_{j=0..n} B_j(t+j) y(t+j); t >= 0, y defined on [t, t+n].
ComplexScalar apply_forward(const ForwardExpr& L, const CoeffSeq& y, std::int64_t t);

/// Adjoint action (Ln+ y)(t) = sum_{j=0..n} conj(B_j)(t) y(t-j);
/// t >= 0, y defined on [t-n, t].
ComplexScalar apply_forward_adjoint(const ForwardExpr& L, const CoeffSeq& y, std::int64_t t);

/// Sesquilinear boundary form
///   s[x,y](t) = sum_{k=1..n} sum_{j=0..k-1}
///               conj(y(t-j-1)) B_k(t+k-1-j) x(t+k-1-j),
/// the summand whose forward difference telescopes the Green identity.
/// Requires x defined on [t, t+n-1] and y on [t-n, t-1].
ComplexScalar sesquilinear_s(const ForwardExpr& L, const CoeffSeq& x, const CoeffSeq& y,
                             std::int64_t t);

/// Left side minus right side of the Green identity over [k, r]; identically
/// zero up to roundoff. Requires 0 <= k <= r and x, y defined on [k-n, r+n].
ComplexScalar green_defect(const ForwardExpr& L, const CoeffSeq& x, const CoeffSeq& y,
                           std::int64_t k, std::int64_t r);

/// Boundary bracket of a self-adjoint expression, via the canonical split
/// Ln y = sum_{j=1..n} F^j(A_j y) + (A_0/2) y:
///   [x,y](t) = s[x,y](t) - conj(s[y,x](t)),
/// which satisfies conj(y) (Lx) - conj(Ly) x = Delta [x,y](t) and is
/// anti-Hermitian. Requires x, y defined on [t-n, t+n-1].
ComplexScalar fsa_bracket(const FSAExpr& L, const CoeffSeq& x, const CoeffSeq& y, std::int64_t t);

}  // namespace sadiff
