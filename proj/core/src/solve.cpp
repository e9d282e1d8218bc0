#include "sadiff/solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>

#include "sadiff/errors.hpp"

namespace sadiff {
namespace {

constexpr std::int64_t kMaxT = 1'000'000;
// Magnitude bounds on stored mantissas; crossing either forces a
// renormalization so QR and descaling stay well inside double range.
const double kHighMark = std::ldexp(1.0, 400);
const double kLowMark = std::ldexp(1.0, -400);

void check_weight(const CoeffSeq& w) {
  validate(w, "weight");
  if (!is_real(w)) throw precondition_error("weight must be real-valued");
  for (const auto& z : w.window) {
    if (z.real() < -1e-10)
      throw precondition_error("weight must be nonnegative on its window");
  }
  const ComplexScalar* tail_scale = nullptr;
  if (const auto* c = std::get_if<ConstantTail>(&w.tail)) tail_scale = &c->c;
  if (const auto* g = std::get_if<GeometricTail>(&w.tail)) tail_scale = &g->c;
  if (const auto* p = std::get_if<PowerTail>(&w.tail)) tail_scale = &p->c;
  if (tail_scale != nullptr && tail_scale->real() < 0.0)
    throw precondition_error("weight tail must be nonnegative");
}

}  // namespace

void validate(const SpectralProblem& p) {
  validate(p.op);
  check_weight(p.weight);
  if (!std::isfinite(p.lambda.real()) || !std::isfinite(p.lambda.imag()))
    throw precondition_error("spectral parameter must be finite");
}

ComplexScalar step(const SpectralProblem& p, std::span<const ComplexScalar> window,
                   std::int64_t t) {
  const int n = p.op.n;
  if (window.size() != static_cast<std::size_t>(2 * n))
    throw precondition_error("step: window must hold 2n values");
  if (t < 0) throw precondition_error("step: t must be >= 0");

  const ComplexScalar lw = p.lambda * eval(p.weight, t);
  ComplexScalar num = lw * window[static_cast<std::size_t>(n)];
  double loc = std::abs(lw);
  for (int j = 0; j <= n - 1; ++j) {
    const ComplexScalar c = eval(p.op.a[static_cast<std::size_t>(j)], t + j);
    loc = std::max(loc, std::abs(c));
    num -= c * window[static_cast<std::size_t>(n + j)];
  }
  for (int j = 1; j <= n; ++j) {
    const ComplexScalar c = std::conj(eval(p.op.a[static_cast<std::size_t>(j)], t));
    loc = std::max(loc, std::abs(c));
    num -= c * window[static_cast<std::size_t>(n - j)];
  }
  const ComplexScalar den = eval(p.op.a[static_cast<std::size_t>(n)], t + n);
  if (std::abs(den) < 1e-12 * std::max(loc, 1e-300))
    throw precondition_error("step: leading coefficient too small at t = " + std::to_string(t));
  return num / den;
}

SolutionBasis solution_basis(const SpectralProblem& p, std::int64_t T, int renorm_every) {
  validate(p);
  const int n = p.op.n;
  const int m = 2 * n;
  if (T < n - 1) throw precondition_error("solution_basis: T must be >= n-1");
  if (T > kMaxT) throw precondition_error("solution_basis: T exceeds the supported range");
  if (renorm_every < 1 || renorm_every > 1024)
    throw precondition_error("solution_basis: renorm_every must lie in [1, 1024]");

  SolutionBasis basis;
  basis.n = n;
  basis.T = T;
  basis.renorm_every = renorm_every;
  basis.values = Eigen::MatrixXcd::Zero(T + n + 1, m);
  basis.values.topRows(m) = Eigen::MatrixXcd::Identity(m, m);

  SegmentTransform seg0;
  seg0.from = -n;
  seg0.cum = Eigen::MatrixXcd::Identity(m, m);
  seg0.exp2.assign(static_cast<std::size_t>(m), 0);
  basis.segments.push_back(std::move(seg0));

  // State rows hold the stored mantissas at lattice indices t-2n+1 .. t where
  // t is the last written index.
  Eigen::MatrixXcd state = Eigen::MatrixXcd::Identity(m, m);
  int since_renorm = 0;

  for (std::int64_t tl = n; tl <= T; ++tl) {
    const std::int64_t t = tl - n;  // recurrence site
    const ScaledComplex lw = ScaledComplex(p.lambda) * eval_scaled(p.weight, t);
    std::vector<ScaledComplex> cf(static_cast<std::size_t>(n));
    for (int j = 0; j <= n - 1; ++j)
      cf[static_cast<std::size_t>(j)] = eval_scaled(p.op.a[static_cast<std::size_t>(j)], t + j);
    std::vector<ScaledComplex> cb(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j)
      cb[static_cast<std::size_t>(j - 1)] =
          conj(eval_scaled(p.op.a[static_cast<std::size_t>(j)], t));
    const ScaledComplex den = eval_scaled(p.op.a[static_cast<std::size_t>(n)], t + n);

    ScaledReal loc = abs(lw);
    for (const auto& c : cf) loc = std::max(loc, abs(c));
    for (const auto& c : cb) loc = std::max(loc, abs(c));
    if (abs(den) < loc * ScaledReal(1e-12) || den.is_zero())
      throw precondition_error("solution_basis: leading coefficient too small at t = " +
                               std::to_string(t));

    double rowmax = 0.0;
    for (int c = 0; c < m; ++c) {
      ScaledComplex acc = lw * ScaledComplex(state(n, c));
      for (int j = 0; j <= n - 1; ++j)
        acc = acc - cf[static_cast<std::size_t>(j)] * ScaledComplex(state(n + j, c));
      for (int j = 1; j <= n; ++j)
        acc = acc - cb[static_cast<std::size_t>(j - 1)] * ScaledComplex(state(n - j, c));
      const ComplexScalar v = (acc / den).to_double();
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw precondition_error(
            "solution_basis: per-step growth left the representable envelope at t = " +
            std::to_string(t) + "; lower renorm_every or reduce the horizon");
      basis.values(tl + n, c) = v;
      rowmax = std::max(rowmax, std::max(std::abs(v.real()), std::abs(v.imag())));
    }

    // Shift the state window down one lattice index.
    state.topRows(m - 1) = state.bottomRows(m - 1).eval();
    state.row(m - 1) = basis.values.row(tl + n);
    ++since_renorm;

    bool due = since_renorm >= renorm_every || rowmax >= kHighMark;
    for (int c = 0; c < m && !due; ++c) {
      if (state.col(c).cwiseAbs().maxCoeff() < kLowMark) due = true;
    }
    if (!due || tl == T) continue;

    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(state);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(m, m);
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    RenormRecord rec;
    rec.t = tl;
    rec.diag_log10.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const double a = std::abs(r(i, i));
      if (a == 0.0 || !std::isfinite(a))
        throw precondition_error("solution_basis: renormalization transform is singular at t = " +
                                 std::to_string(tl));
      const ComplexScalar phase = r(i, i) / a;
      q.col(i) *= phase;
      r.row(i) *= std::conj(phase);
      rec.diag_log10[static_cast<std::size_t>(i)] = std::log10(a);
    }
    const auto [lo, hi] =
        std::minmax_element(rec.diag_log10.begin(), rec.diag_log10.end());
    rec.cond_log10 = *hi - *lo;
    rec.mix = r;
    basis.renorm_log.push_back(rec);

    const SegmentTransform& prev = basis.segments.back();
    SegmentTransform next;
    next.from = tl + 1;
    next.cum = r * prev.cum;
    next.exp2 = prev.exp2;
    for (int c = 0; c < m; ++c) {
      const double peak = next.cum.col(c).cwiseAbs().maxCoeff();
      if (peak == 0.0 || !std::isfinite(peak))
        throw precondition_error("solution_basis: frame transform degenerated at t = " +
                                 std::to_string(tl));
      int e = 0;
      std::frexp(peak, &e);
      next.cum.col(c) *= std::ldexp(1.0, -e);
      next.exp2[static_cast<std::size_t>(c)] += e;
    }
    basis.segments.push_back(std::move(next));

    state = q;
    since_renorm = 0;
  }

  return basis;
}

std::size_t segment_of(const SolutionBasis& basis, std::int64_t t) {
  if (t < -basis.n || t > basis.T)
    throw precondition_error("segment_of: lattice index out of range");
  std::size_t lo = 0, hi = basis.segments.size();
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (basis.segments[mid].from <= t)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

ScaledComplex value(const SolutionBasis& basis, std::int64_t t, int col) {
  const int m = 2 * basis.n;
  if (col < 0 || col >= m) throw precondition_error("value: column index out of range");
  const SegmentTransform& seg = basis.segments[segment_of(basis, t)];
  ComplexScalar acc{0.0, 0.0};
  for (int b = 0; b < m; ++b) acc += basis.values(t + basis.n, b) * seg.cum(b, col);
  ScaledComplex out{acc};
  if (!out.is_zero()) out.e += seg.exp2[static_cast<std::size_t>(col)];
  return out;
}

ResidualReport residual_check(const SpectralProblem& p, const SolutionBasis& basis,
                              std::span<const std::int64_t> ts, double tol) {
  const int n = p.op.n;
  ResidualReport out;
  if (ts.empty()) {
    out.pass = true;
    out.vacuous = true;
    return out;
  }
  for (const std::int64_t t : ts) {
    if (t < 0 || t > basis.T - n)
      throw precondition_error("residual_check: sample index out of range");
    const ScaledComplex lw = ScaledComplex(p.lambda) * eval_scaled(p.weight, t);
    for (int c = 0; c < 2 * n; ++c) {
      ScaledComplex r{};
      ScaledReal scale{};
      for (int j = 0; j <= n; ++j) {
        const ScaledComplex term =
            eval_scaled(p.op.a[static_cast<std::size_t>(j)], t + j) * value(basis, t + j, c);
        r = r + term;
        scale = scale + abs(term);
      }
      for (int j = 1; j <= n; ++j) {
        const ScaledComplex term =
            conj(eval_scaled(p.op.a[static_cast<std::size_t>(j)], t)) * value(basis, t - j, c);
        r = r + term;
        scale = scale + abs(term);
      }
      const ScaledComplex wterm = lw * value(basis, t, c);
      r = r - wterm;
      scale = scale + abs(wterm);
      if (scale.is_zero()) continue;
      const double rel = (abs(r) / scale).to_double();
      if (rel > out.max_rel_residual) {
        out.max_rel_residual = rel;
        out.worst_t = t;
        out.worst_col = c;
      }
    }
  }
  out.pass = out.max_rel_residual <= tol;
  return out;
}

void write_solution_csv(std::ostream& os, const SolutionBasis& basis) {
  static const double log10_2 = std::log10(2.0);
  os << "t,col_index,re,im,log10_scale\n";
  char buf[160];
  for (std::int64_t t = -basis.n; t <= basis.T; ++t) {
    for (int c = 0; c < 2 * basis.n; ++c) {
      const ScaledComplex v = value(basis, t, c);
      std::snprintf(buf, sizeof buf, "%lld,%d,%.17g,%.17g,%.17g\n",
                    static_cast<long long>(t), c, v.m.real(), v.m.imag(),
                    static_cast<double>(v.e) * log10_2);
      os << buf;
    }
  }
}

}  // namespace sadiff
