#include "sadiff/green.hpp"

#include "sadiff/errors.hpp"

namespace sadiff {

void validate(const ForwardExpr& L) {
  if (L.n < 1) throw precondition_error("forward expression: span n must be >= 1");
  if (static_cast<int>(L.b.size()) != L.n + 1)
    throw precondition_error("forward expression: expected " + std::to_string(L.n + 1) +
                             " coefficients, got " + std::to_string(L.b.size()));
  for (int j = 0; j <= L.n; ++j) {
    validate(L.b[j], "B" + std::to_string(j));
    if (L.b[j].start > 0)
      throw precondition_error("forward expression: B" + std::to_string(j) +
                               " must be defined from index 0");
  }
  if (!is_nonvanishing(L.b[L.n]))
    throw precondition_error("forward expression: leading coefficient B" + std::to_string(L.n) +
                             " vanishes");
}

ComplexScalar apply_forward(const ForwardExpr& L, const CoeffSeq& y, std::int64_t t) {
  if (t < 0) throw precondition_error("apply_forward: t must be >= 0");
  ComplexScalar acc{0.0, 0.0};
  for (int j = 0; j <= L.n; ++j) acc += eval(L.b[j], t + j) * eval(y, t + j);
  return acc;
}

ComplexScalar apply_forward_adjoint(const ForwardExpr& L, const CoeffSeq& y, std::int64_t t) {
  if (t < 0) throw precondition_error("apply_forward_adjoint: t must be >= 0");
  ComplexScalar acc{0.0, 0.0};
  for (int j = 0; j <= L.n; ++j) acc += std::conj(eval(L.b[j], t)) * eval(y, t - j);
  return acc;
}

ComplexScalar sesquilinear_s(const ForwardExpr& L, const CoeffSeq& x, const CoeffSeq& y,
                             std::int64_t t) {
  ComplexScalar acc{0.0, 0.0};
  for (int k = 1; k <= L.n; ++k)
    for (int j = 0; j < k; ++j)
      acc += std::conj(eval(y, t - j - 1)) * eval(L.b[k], t + k - 1 - j) * eval(x, t + k - 1 - j);
  return acc;
}

ComplexScalar green_defect(const ForwardExpr& L, const CoeffSeq& x, const CoeffSeq& y,
                           std::int64_t k, std::int64_t r) {
  if (k < 0 || r < k) throw precondition_error("green_defect: need 0 <= k <= r");
  ComplexScalar lhs{0.0, 0.0};
  for (std::int64_t t = k; t <= r; ++t)
    lhs += std::conj(eval(y, t)) * apply_forward(L, x, t) -
           std::conj(apply_forward_adjoint(L, y, t)) * eval(x, t);
  const ComplexScalar rhs = sesquilinear_s(L, x, y, r + 1) - sesquilinear_s(L, x, y, k);
  return lhs - rhs;
}

ComplexScalar fsa_bracket(const FSAExpr& L, const CoeffSeq& x, const CoeffSeq& y, std::int64_t t) {
  validate(L);
  ForwardExpr half;
  half.n = L.n;
  half.b = L.a;
  for (auto& z : half.b[0].window) z *= 0.5;
  if (auto* ct = std::get_if<ConstantTail>(&half.b[0].tail)) ct->c *= 0.5;
  else if (auto* gt = std::get_if<GeometricTail>(&half.b[0].tail)) gt->c *= 0.5;
  else std::get<PowerTail>(half.b[0].tail).c *= 0.5;
  return sesquilinear_s(half, x, y, t) - std::conj(sesquilinear_s(half, y, x, t));
}

}  // namespace sadiff
