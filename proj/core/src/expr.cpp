#include "sadiff/expr.hpp"

#include <cmath>

#include "sadiff/errors.hpp"

namespace sadiff {

namespace {

void require_coefficient(const CoeffSeq& f, const std::string& name) {
  validate(f, name);
  if (f.start > 0)
    throw precondition_error(name + ": coefficient must be defined from index 0 (start = " +
                             std::to_string(f.start) + ")");
}

std::string fwd_name(int j) { return "A" + std::to_string(j); }
std::string bwd_name(int j) { return "A-" + std::to_string(j); }

}  // namespace

void validate(const ShiftExpr& L) {
  if (L.k < 0 || L.s < 0) throw precondition_error("shift expression: negative span");
  if (static_cast<int>(L.fwd.size()) != L.k + 1)
    throw precondition_error("shift expression: expected " + std::to_string(L.k + 1) +
                             " forward coefficients, got " + std::to_string(L.fwd.size()));
  if (static_cast<int>(L.bwd.size()) != L.s)
    throw precondition_error("shift expression: expected " + std::to_string(L.s) +
                             " backward coefficients, got " + std::to_string(L.bwd.size()));
  for (int j = 0; j <= L.k; ++j) require_coefficient(L.fwd[j], fwd_name(j));
  for (int j = 1; j <= L.s; ++j) require_coefficient(L.bwd[j - 1], bwd_name(j));
  if (L.k >= 1 && !is_nonvanishing(L.fwd[L.k]))
    throw precondition_error("shift expression: leading coefficient " + fwd_name(L.k) + " vanishes");
  if (L.s >= 1 && !is_nonvanishing(L.bwd[L.s - 1]))
    throw precondition_error("shift expression: trailing coefficient " + bwd_name(L.s) + " vanishes");
}

void validate(const FSAExpr& L) {
  if (L.n < 1) throw precondition_error("self-adjoint expression: order parameter n must be >= 1");
  if (static_cast<int>(L.a.size()) != L.n + 1)
    throw precondition_error("self-adjoint expression: expected " + std::to_string(L.n + 1) +
                             " coefficients, got " + std::to_string(L.a.size()));
  for (int j = 0; j <= L.n; ++j) require_coefficient(L.a[j], fwd_name(j));
  if (!is_real(L.a[0]))
    throw precondition_error("self-adjoint expression: A0 must be real-valued");
  if (!is_nonvanishing(L.a[L.n]))
    throw precondition_error("self-adjoint expression: leading coefficient A" +
                             std::to_string(L.n) + " vanishes");
}

void validate(const DeltaNablaExpr& d) {
  if (d.n < 1) throw precondition_error("delta/nabla expression: order parameter n must be >= 1");
  if (d.n > 12)
    throw precondition_error("delta/nabla expression: order parameter n must be <= 12");
  if (static_cast<int>(d.p.size()) != d.n + 1)
    throw precondition_error("delta/nabla expression: expected " + std::to_string(d.n + 1) +
                             " p coefficients, got " + std::to_string(d.p.size()));
  if (static_cast<int>(d.q.size()) != d.n)
    throw precondition_error("delta/nabla expression: expected " + std::to_string(d.n) +
                             " q coefficients, got " + std::to_string(d.q.size()));
  for (int j = 0; j <= d.n; ++j) {
    require_coefficient(d.p[j], "p" + std::to_string(j));
    if (!is_real(d.p[j]))
      throw precondition_error("delta/nabla expression: p" + std::to_string(j) +
                               " must be real-valued");
  }
  for (int j = 1; j <= d.n; ++j) {
    require_coefficient(d.q[j - 1], "q" + std::to_string(j));
    if (!is_real(d.q[j - 1]))
      throw precondition_error("delta/nabla expression: q" + std::to_string(j) +
                               " must be real-valued");
  }
}

std::int64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  if (n > 24)
    throw precondition_error("binomial: order " + std::to_string(n) +
                             " outside the exact-integer range (n <= 24)");
  std::int64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

ShiftExpr embed(const FSAExpr& L) {
  validate(L);
  ShiftExpr S;
  S.k = L.n;
  S.s = L.n;
  S.fwd = L.a;
  S.bwd.reserve(L.n);
  for (int j = 1; j <= L.n; ++j) S.bwd.push_back(conj(L.a[j]));
  return S;
}

ComplexScalar apply(const ShiftExpr& L, const CoeffSeq& y, std::int64_t t) {
  if (t < 0) throw precondition_error("apply: expressions act on the half-line, t must be >= 0");
  ComplexScalar acc{0.0, 0.0};
  for (int j = 0; j <= L.k; ++j) acc += eval(L.fwd[j], t + j) * eval(y, t + j);
  for (int j = 1; j <= L.s; ++j) acc += eval(L.bwd[j - 1], t) * eval(y, t - j);
  return acc;
}

ComplexScalar apply(const FSAExpr& L, const CoeffSeq& y, std::int64_t t) {
  return apply(embed(L), y, t);
}

ShiftExpr formal_adjoint(const ShiftExpr& L) {
  validate(L);
  ShiftExpr A;
  A.k = L.s;
  A.s = L.k;
  A.fwd.reserve(L.s + 1);
  A.fwd.push_back(conj(L.fwd[0]));
  for (int j = 1; j <= L.s; ++j) A.fwd.push_back(conj(L.bwd[j - 1]));
  A.bwd.reserve(L.k);
  for (int j = 1; j <= L.k; ++j) A.bwd.push_back(conj(L.fwd[j]));
  return A;
}

SelfAdjointReport is_formally_self_adjoint(const ShiftExpr& L, std::int64_t probe_horizon,
                                           double tol) {
  validate(L);
  SelfAdjointReport r;
  if (L.k != L.s) {
    r.reason = "order must be even: forward span " + std::to_string(L.k) +
               " != backward span " + std::to_string(L.s);
    return r;
  }
  for (int j = 1; j <= L.k; ++j) {
    const CoeffSeq cj = conj(L.fwd[j]);
    for (std::int64_t t = 0; t <= probe_horizon; ++t) {
      const ComplexScalar a = eval(L.bwd[j - 1], t), b = eval(cj, t);
      if (std::abs(a - b) > tol * (1.0 + std::fmax(std::abs(a), std::abs(b)))) {
        r.reason = bwd_name(j) + " != conj(" + fwd_name(j) + ") at t = " + std::to_string(t);
        r.coeff_index = j;
        r.at = t;
        return r;
      }
    }
    if (!approx_equal_on(L.bwd[j - 1], cj, probe_horizon, probe_horizon, tol)) {
      r.reason = bwd_name(j) + " != conj(" + fwd_name(j) + ") on constant tails";
      r.coeff_index = j;
      r.at = probe_horizon;
      return r;
    }
  }
  for (std::int64_t t = 0; t <= probe_horizon; ++t) {
    const ComplexScalar a0 = eval(L.fwd[0], t);
    if (std::fabs(a0.imag()) > tol * (1.0 + std::abs(a0))) {
      r.reason = "Im A0 exceeds tolerance at t = " + std::to_string(t);
      r.coeff_index = 0;
      r.at = t;
      return r;
    }
  }
  if (const auto* ct = std::get_if<ConstantTail>(&L.fwd[0].tail)) {
    if (std::fabs(ct->c.imag()) > tol * (1.0 + std::abs(ct->c))) {
      r.reason = "Im A0 exceeds tolerance on the constant tail";
      r.coeff_index = 0;
      r.at = L.fwd[0].first_tail_index();
      return r;
    }
  }
  r.pass = true;
  return r;
}

FSAExpr from_delta_nabla(const DeltaNablaExpr& d, std::int64_t horizon) {
  validate(d);
  if (horizon < 0) throw precondition_error("from_delta_nabla: horizon must be >= 0");
  const int n = d.n;
  for (std::int64_t t = 0; t <= horizon + n; ++t) {
    if (eval(d.p[n], t) == ComplexScalar{0.0, 0.0})
      throw precondition_error("from_delta_nabla: p" + std::to_string(n) +
                               " vanishes at t = " + std::to_string(t));
  }

  const bool const_tails = [&] {
    for (const auto& f : d.p)
      if (!std::holds_alternative<ConstantTail>(f.tail)) return false;
    for (const auto& f : d.q)
      if (!std::holds_alternative<ConstantTail>(f.tail)) return false;
    return true;
  }();

  const auto p_at = [&](int s, std::int64_t t) { return eval(d.p[s], t).real(); };
  const auto q_at = [&](int k, std::int64_t t) { return eval(d.q[k - 1], t).real(); };
  const auto p_tail = [&](int s) { return std::get<ConstantTail>(d.p[s].tail).c.real(); };
  const auto q_tail = [&](int k) { return std::get<ConstantTail>(d.q[k - 1].tail).c.real(); };

  FSAExpr out;
  out.n = n;
  out.a.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double psign = (j % 2 == 0) ? 1.0 : -1.0;
    const double qsign = (j % 2 == 0) ? -1.0 : 1.0;
    std::vector<ComplexScalar> window(static_cast<std::size_t>(horizon) + 1);
    for (std::int64_t t = 0; t <= horizon; ++t) {
      double pj = 0.0;
      for (int s = j; s <= n; ++s)
        for (int k = 0; k <= s - j; ++k)
          pj += static_cast<double>(binomial(s, k) * binomial(s, s - j - k)) * p_at(s, t + k);
      pj *= psign;
      double qj = 0.0;
      if (j >= 1) {
        for (int k = j; k <= n; ++k) qj += static_cast<double>(binomial(k, j)) * q_at(k, t);
        qj *= qsign;
      }
      window[static_cast<std::size_t>(t)] = {pj, j >= 1 ? qj : 0.0};
    }
    ComplexScalar tail_value = window.back();
    if (const_tails) {
      double pj = 0.0;
      for (int s = j; s <= n; ++s)
        for (int k = 0; k <= s - j; ++k)
          pj += static_cast<double>(binomial(s, k) * binomial(s, s - j - k)) * p_tail(s);
      pj *= psign;
      double qj = 0.0;
      if (j >= 1) {
        for (int k = j; k <= n; ++k) qj += static_cast<double>(binomial(k, j)) * q_tail(k);
        qj *= qsign;
      }
      tail_value = {pj, j >= 1 ? qj : 0.0};
    }
    out.a[j] = table_seq(0, std::move(window), ConstantTail{tail_value});
  }
  validate(out);
  return out;
}

}  // namespace sadiff
