#include "sadiff/factor.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "sadiff/errors.hpp"

namespace sadiff {
namespace {

bool all_constant_tails(const ForwardExpr& ln) {
  for (const auto& f : ln.b) {
    if (!std::holds_alternative<ConstantTail>(f.tail)) return false;
  }
  return true;
}

std::int64_t max_first_tail(const ForwardExpr& ln) {
  std::int64_t m = 0;
  for (const auto& f : ln.b) m = std::max(m, f.first_tail_index());
  return m;
}

}  // namespace

FSAExpr compose_with_adjoint(const ForwardExpr& ln, std::int64_t horizon) {
  validate(ln);
  if (horizon < 0) throw precondition_error("compose_with_adjoint: horizon must be >= 0");
  const int n = ln.n;
  const bool exact_tails = all_constant_tails(ln);
  // Extend the tabulation until every factor runs on its tail, so a constant
  // tail on the result is exact rather than a continuation guess.
  const std::int64_t h = exact_tails ? std::max(horizon, max_first_tail(ln)) : horizon;

  FSAExpr out;
  out.n = n;
  out.a.resize(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) {
    std::vector<ComplexScalar> w(static_cast<std::size_t>(h) + 1);
    for (std::int64_t t = 0; t <= h; ++t) {
      ComplexScalar d{0.0, 0.0};
      for (int k = j; k <= n; ++k) {
        const std::int64_t u = t + k - j;
        d += eval(ln.b[static_cast<std::size_t>(k)], u) *
             std::conj(eval(ln.b[static_cast<std::size_t>(k - j)], u));
      }
      w[static_cast<std::size_t>(t)] = d;
    }
    Tail tail = ConstantTail{w.back()};
    if (exact_tails) {
      ComplexScalar d{0.0, 0.0};
      for (int k = j; k <= n; ++k) {
        d += std::get<ConstantTail>(ln.b[static_cast<std::size_t>(k)].tail).c *
             std::conj(std::get<ConstantTail>(ln.b[static_cast<std::size_t>(k - j)].tail).c);
      }
      tail = ConstantTail{d};
    }
    out.a[static_cast<std::size_t>(j)] = table_seq(0, std::move(w), tail);
  }
  return out;
}

Factorization factorize(const FSAExpr& l, std::int64_t horizon, const InitTriangle& triangle) {
  validate(l);
  const int n = l.n;
  if (horizon < n) throw precondition_error("factorize: horizon must be >= the order parameter");
  if (triangle.size() > static_cast<std::size_t>(n > 0 ? n - 1 : 0))
    throw precondition_error("factorize: initial triangle has too many rows");
  for (std::size_t m = 0; m < triangle.size(); ++m) {
    if (triangle[m].size() > m + 1)
      throw precondition_error("factorize: initial triangle row " + std::to_string(m + 1) +
                               " has more than " + std::to_string(m + 1) + " entries");
  }

  // Relative floor for divisions by the leading coefficient.
  double scale = 0.0;
  for (int j = 0; j <= n; ++j)
    for (std::int64_t t = 0; t <= horizon + n; ++t)
      scale = std::max(scale, std::abs(eval(l.a[static_cast<std::size_t>(j)], t)));
  const double floor = 1e-12 * scale;

  // bvals[m-1] holds B_m on [0, horizon + m] for 1 <= m <= n-1.
  std::vector<std::vector<ComplexScalar>> bvals(static_cast<std::size_t>(std::max(n - 1, 0)));
  for (int m = 1; m <= n - 1; ++m) {
    auto& v = bvals[static_cast<std::size_t>(m - 1)];
    v.assign(static_cast<std::size_t>(horizon + m) + 1, ComplexScalar{0.0, 0.0});
    if (static_cast<std::size_t>(m) <= triangle.size()) {
      const auto& row = triangle[static_cast<std::size_t>(m - 1)];
      for (std::size_t i = 0; i < row.size(); ++i) v[i] = row[i];
    }
  }

  const auto b_at = [&](int m, std::int64_t u) -> ComplexScalar {
    if (m == 0) return ComplexScalar{1.0, 0.0};
    if (m == n) return eval(l.a[static_cast<std::size_t>(n)], u);
    return bvals[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(u)];
  };

  // Forward sweep: at (t, j) the only unknown in the coefficient identity for
  // A_j is the top term B_n(t+n-j) conj(B_{n-j}(t+n-j)).
  for (std::int64_t t = 0; t <= horizon; ++t) {
    for (int j = n - 1; j >= 1; --j) {
      ComplexScalar acc = eval(l.a[static_cast<std::size_t>(j)], t);
      for (int k = j; k <= n - 1; ++k) {
        const std::int64_t u = t + k - j;
        acc -= b_at(k, u) * std::conj(b_at(k - j, u));
      }
      const ComplexScalar den = eval(l.a[static_cast<std::size_t>(n)], t + n - j);
      if (std::abs(den) < floor)
        throw precondition_error(
            "factorize: |A_n(" + std::to_string(t + n - j) +
            ")| is below the relative division floor for this horizon");
      const ComplexScalar val = std::conj(acc / den);
      if (!std::isfinite(val.real()) || !std::isfinite(val.imag()))
        throw precondition_error("factorize: factor coefficient overflowed at t = " +
                                 std::to_string(t));
      bvals[static_cast<std::size_t>(n - j - 1)][static_cast<std::size_t>(t + n - j)] = val;
    }
  }

  std::vector<ComplexScalar> cvals(static_cast<std::size_t>(horizon) + 1);
  for (std::int64_t t = 0; t <= horizon; ++t) {
    const ComplexScalar a0 = eval(l.a[0], t);
    double sq = 0.0;
    for (int k = 0; k <= n; ++k) sq += std::norm(b_at(k, t + k));
    if (std::abs(a0.imag()) > 1e-10 * (1.0 + std::abs(a0)))
      throw precondition_error("factorize: zero-order coefficient has an imaginary part at t = " +
                               std::to_string(t));
    cvals[static_cast<std::size_t>(t)] = ComplexScalar{a0.real() - sq, 0.0};
  }

  Factorization out;
  out.horizon = horizon;

  // Record the free initial values before the rows are moved out below.
  out.triangle.assign(static_cast<std::size_t>(std::max(n - 1, 0)), {});
  for (int m = 1; m <= n - 1; ++m) {
    auto& row = out.triangle[static_cast<std::size_t>(m - 1)];
    row.assign(static_cast<std::size_t>(m), ComplexScalar{0.0, 0.0});
    for (std::int64_t u = 0; u < m; ++u)
      row[static_cast<std::size_t>(u)] = b_at(m, u);
  }

  out.factors.n = n;
  out.factors.b.resize(static_cast<std::size_t>(n) + 1);
  out.factors.b[0] = constant_seq(ComplexScalar{1.0, 0.0});
  for (int m = 1; m <= n - 1; ++m) {
    auto& v = bvals[static_cast<std::size_t>(m - 1)];
    const ComplexScalar last = v.back();
    out.factors.b[static_cast<std::size_t>(m)] = table_seq(0, std::move(v), ConstantTail{last});
  }
  out.factors.b[static_cast<std::size_t>(n)] = l.a[static_cast<std::size_t>(n)];
  validate(out.factors);

  const ComplexScalar clast = cvals.back();
  out.c = table_seq(0, std::move(cvals), ConstantTail{clast});

  return out;
}

Factorization factorize(const FSAExpr& l, std::int64_t horizon) {
  return factorize(l, horizon, InitTriangle{});
}

FactorizationCheck verify_factorization(const FSAExpr& l, const Factorization& f,
                                        std::int64_t window, double tol) {
  validate(l);
  if (window < 0) throw precondition_error("verify_factorization: window must be >= 0");
  if (window > f.horizon - l.n)
    throw precondition_error(
        "verify_factorization: window exceeds the tabulated factorization horizon");
  const int n = l.n;

  FactorizationCheck out;
  out.scale = 1.0;

  // The sweep can produce factors far larger than the input coefficients, and
  // the recomposition then recovers A_j by cancellation. The honest relative
  // residual is therefore measured against the local recomposition magnitude,
  // not against |A_j| alone.
  double worst_ratio = 0.0;
  for (int j = 0; j <= n; ++j) {
    for (std::int64_t t = 0; t <= window; ++t) {
      ComplexScalar d{0.0, 0.0};
      double mag = 1.0 + std::abs(eval(l.a[static_cast<std::size_t>(j)], t));
      for (int k = j; k <= n; ++k) {
        const std::int64_t u = t + k - j;
        const ComplexScalar term = eval(f.factors.b[static_cast<std::size_t>(k)], u) *
                                   std::conj(eval(f.factors.b[static_cast<std::size_t>(k - j)], u));
        d += term;
        mag += std::abs(term);
      }
      if (j == 0) {
        const ComplexScalar c = eval(f.c, t);
        d += c;
        mag += std::abs(c);
      }
      const double dev = std::abs(d - eval(l.a[static_cast<std::size_t>(j)], t));
      if (dev > worst_ratio * mag) {
        worst_ratio = dev / mag;
        out.max_deviation = dev;
        out.scale = mag;
        out.worst_j = j;
        out.worst_t = t;
      }
    }
  }
  out.pass = worst_ratio <= tol;
  return out;
}

}  // namespace sadiff
