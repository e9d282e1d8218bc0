#pragma once

// Linear difference expressions on the half-line, written against the forward
// shift F: (Ly)(t) = sum_{j=0..k} (A_j y)(t+j) + sum_{j=1..s} A_{-j}(t) y(t-j).
// Three forms: the general two-sided shift form, the formally self-adjoint
// form (backward coefficients are conjugates of the forward ones), and the
// real delta/nabla form that converts into it.

#include <cstdint>
#include <string>
#include <vector>

#include "sadiff/coeff_seq.hpp"

namespace sadiff {

/// General shift-form expression with forward span k and backward span s.
/// fwd holds A_0..A_k; bwd holds A_{-1}..A_{-s} (bwd[j-1] is A_{-j}).
/// The leading coefficients A_k (k >= 1) and A_{-s} (s >= 1) must be
/// nonvanishing; every coefficient must be defined from index 0 down.
struct ShiftExpr {
  int k = 0;
  int s = 0;
  std::vector<CoeffSeq> fwd;
  std::vector<CoeffSeq> bwd;

  int order() const { return k + s; }
};

/// Formally self-adjoint expression of order 2n: coefficients A_0..A_n with
/// A_0 real-valued and A_n nonvanishing. The implied shift form has spans
/// k = s = n and backward coefficients conj(A_j).
struct FSAExpr {
  int n = 0;
  std::vector<CoeffSeq> a;
};

/// Real delta/nabla expression of order 2n:
///   sum_{j=0..n} (-1)^j Delta^j(p_j Nabla^j y)
///   + i * sum_{k=1..n} [(-1)^{k+1} Delta^k(q_k y) + q_k Nabla^k y].
/// p holds p_0..p_n and q holds q_1..q_n (q[j-1] is q_j); all real-valued,
/// p_n nonvanishing.
struct DeltaNablaExpr {
  int n = 0;
  std::vector<CoeffSeq> p;
  std::vector<CoeffSeq> q;
};

void validate(const ShiftExpr& L);
void validate(const FSAExpr& L);
void validate(const DeltaNablaExpr& L);

/// Exact binomial coefficient; supports the conversion orders (n <= 12) and
/// throws precondition_error beyond that range.
std::int64_t binomial(int n, int k);

/// The implied shift form of a self-adjoint expression.
ShiftExpr embed(const FSAExpr& L);

/// (Ly)(t) for t >= 0; y must be defined on [t-s, t+k].
ComplexScalar apply(const ShiftExpr& L, const CoeffSeq& y, std::int64_t t);
ComplexScalar apply(const FSAExpr& L, const CoeffSeq& y, std::int64_t t);

/// Formal adjoint: (L+ y)(t) = sum_{j=1..s} conj(A_{-j})(t+j) y(t+j)
///                          + sum_{j=0..k} conj(A_j)(t) y(t-j).
/// Spans swap (k' = s, s' = k); applying it twice restores L exactly.
ShiftExpr formal_adjoint(const ShiftExpr& L);

/// Outcome of the self-adjointness test; on failure, reason names the first
/// violating coefficient pair and lattice index.
struct SelfAdjointReport {
  bool pass = false;
  std::string reason;
  int coeff_index = 0;
  std::int64_t at = 0;
};

/// True iff spans agree (even order), A_{-j} equals conj(A_j) on
/// [0, probe_horizon] (and symbolically on constant tails), and Im A_0 stays
/// within tol. Tolerances are relative: |delta| <= tol * (1 + magnitude).
SelfAdjointReport is_formally_self_adjoint(const ShiftExpr& L, std::int64_t probe_horizon = 64,
                                           double tol = 1e-10);

/// Convert the delta/nabla form to shift form:
///   A_0 = P_0,  A_j = P_j + i Q_j, with
///   P_j(t) = (-1)^j sum_{s=j..n} sum_{k=0..s-j} C(s,k) C(s,s-j-k) p_s(t+k),
///   Q_j(t) = (-1)^{j+1} sum_{k=j..n} C(k,j) q_k(t).
/// Coefficients are tabulated on [0, horizon]; tails are exact when every
/// input tail is constant, otherwise the last computed value continues.
/// Throws precondition_error if p_n vanishes anywhere on [0, horizon + n].
FSAExpr from_delta_nabla(const DeltaNablaExpr& d, std::int64_t horizon);

}  // namespace sadiff
