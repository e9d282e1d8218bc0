#include "sadiff/deficiency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <initializer_list>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "sadiff/errors.hpp"

namespace sadiff {
namespace {

ComplexScalar tail_scale_of(const Tail& tail) {
  if (const auto* c = std::get_if<ConstantTail>(&tail)) return c->c;
  if (const auto* g = std::get_if<GeometricTail>(&tail)) return g->c;
  return std::get<PowerTail>(tail).c;
}

bool weight_is_zero(const CoeffSeq& w) {
  for (const auto& z : w.window) {
    if (z != ComplexScalar{0.0, 0.0}) return false;
  }
  return tail_scale_of(w.tail) == ComplexScalar{0.0, 0.0};
}

bool weight_has_finite_support(const CoeffSeq& w) {
  return tail_scale_of(w.tail) == ComplexScalar{0.0, 0.0};
}

// log10 growth per step of the weight tail; power tails are subexponential.
double weight_growth_log10(const CoeffSeq& w) {
  if (const auto* g = std::get_if<GeometricTail>(&w.tail)) return std::log10(g->rho);
  return 0.0;
}

const char* class_label(DirectionClass c) {
  switch (c) {
    case DirectionClass::Bounded: return "bounded";
    case DirectionClass::Unbounded: return "unbounded";
    case DirectionClass::Borderline: return "borderline";
  }
  return "unclassified";
}

}  // namespace

GramTrace gram_trace(const SpectralProblem& p, const SolutionBasis& basis,
                     std::span<const std::int64_t> checkpoints) {
  validate(p);
  if (p.op.n != basis.n)
    throw precondition_error("gram_trace: problem and basis order mismatch");
  if (checkpoints.empty()) throw precondition_error("gram_trace: empty checkpoint list");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 0 || checkpoints[i] > basis.T)
      throw precondition_error("gram_trace: checkpoint beyond the propagated horizon");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw precondition_error("gram_trace: checkpoints must be strictly increasing");
  }
  const int m = 2 * basis.n;

  GramTrace out;
  out.checkpoints.assign(checkpoints.begin(), checkpoints.end());

  // Per-entry scaled accumulator of folded (original-coordinate) segment
  // contributions, plus a plain accumulator for the currently open segment in
  // its own frame: value = segM * 2^segE.
  std::vector<ScaledComplex> global(static_cast<std::size_t>(m) * m);
  Eigen::MatrixXcd segM = Eigen::MatrixXcd::Zero(m, m);
  std::int64_t segE = 0;
  bool seg_live = false;
  std::size_t seg_idx = 0;

  const auto fold_segment = [&](std::vector<ScaledComplex>& target) {
    if (!seg_live) return;
    const SegmentTransform& seg = basis.segments[seg_idx];
    const Eigen::MatrixXcd h = seg.cum.adjoint() * segM * seg.cum;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        const std::int64_t e = segE + seg.exp2[static_cast<std::size_t>(a)] +
                               seg.exp2[static_cast<std::size_t>(b)];
        auto& slot = target[static_cast<std::size_t>(a) * m + b];
        slot = slot + ScaledComplex(h(a, b), e);
      }
  };

  std::size_t ck = 0;
  for (std::int64_t t = 0; t <= out.checkpoints.back(); ++t) {
    const std::size_t s = segment_of(basis, t);
    if (s != seg_idx || !seg_live) {
      if (seg_live && s != seg_idx) {
        fold_segment(global);
        segM.setZero();
        segE = 0;
        seg_live = false;
      }
      seg_idx = s;
    }

    const ScaledComplex ws = eval_scaled(p.weight, t);
    const double wm = ws.m.real();
    if (wm > 0.0) {
      const Eigen::RowVectorXcd row = basis.values.row(t + basis.n);
      const double peak = row.cwiseAbs().maxCoeff();
      int k = 0;
      if (peak > 0.0) std::frexp(peak, &k);
      const Eigen::RowVectorXcd nrow = row * std::ldexp(1.0, -k);
      const Eigen::MatrixXcd contrib = wm * (nrow.adjoint() * nrow);
      const std::int64_t ce = ws.e + 2 * static_cast<std::int64_t>(k);
      if (!seg_live) {
        segM = contrib;
        segE = ce;
        seg_live = true;
      } else {
        const std::int64_t diff = ce - segE;
        if (diff > 0) {
          if (diff > 1070)
            segM = contrib;
          else
            segM = segM * std::ldexp(1.0, static_cast<int>(-diff)) + contrib;
          segE = ce;
        } else if (diff >= -1070) {
          segM += contrib * std::ldexp(1.0, static_cast<int>(diff));
        }
      }
    }

    if (t == out.checkpoints[ck]) {
      std::vector<ScaledComplex> snap = global;
      fold_segment(snap);
      std::int64_t emax = 0;
      bool any = false;
      for (const auto& z : snap) {
        if (z.is_zero()) continue;
        emax = any ? std::max(emax, z.e) : z.e;
        any = true;
      }
      ScaledGram g;
      g.exp2 = any ? emax : 0;
      g.mantissa = Eigen::MatrixXcd::Zero(m, m);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          const auto& z = snap[static_cast<std::size_t>(a) * m + b];
          if (z.is_zero()) continue;
          const std::int64_t gap = z.e - g.exp2;
          if (gap < -1070) continue;
          g.mantissa(a, b) = ComplexScalar(std::ldexp(z.m.real(), static_cast<int>(gap)),
                                           std::ldexp(z.m.imag(), static_cast<int>(gap)));
        }
      g.mantissa = ((g.mantissa + g.mantissa.adjoint()) * 0.5).eval();

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.mantissa);
      if (es.info() != Eigen::Success)
        throw std::runtime_error("gram_trace: eigenvalue decomposition failed");
      std::vector<ScaledReal> eigs(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) {
        const double ev = es.eigenvalues()(i);
        eigs[static_cast<std::size_t>(i)] =
            ev > 0.0 ? ScaledReal(ev, g.exp2) : ScaledReal{};
      }
      out.grams.push_back(std::move(g));
      out.eigs.push_back(std::move(eigs));
      ++ck;
      if (ck == out.checkpoints.size()) break;
    }
  }
  return out;
}

namespace {

struct TailSums {
  ScaledReal half;
  ScaledReal full;
};

// Fresh single-solution propagation from initial window v0 (lattice -n..n-1)
// to Tc, accumulating S(t) = sum_{0..t} w |y|^2 with scalar window
// renormalization. Returns S at floor(Tc/2) and at Tc.
TailSums propagate_tail(const SpectralProblem& p, const Eigen::VectorXcd& v0, std::int64_t Tc) {
  const int n = p.op.n;
  const int m = 2 * n;
  TailSums sums;
  std::vector<ComplexScalar> win(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) win[static_cast<std::size_t>(i)] = v0(i);
  std::int64_t E = 0;

  bool half_taken = false;

  const auto add_point = [&](std::int64_t t, ComplexScalar y) {
    const ScaledComplex ws = eval_scaled(p.weight, t);
    const double wm = ws.m.real();
    if (wm <= 0.0) return;
    sums.full = sums.full + ScaledReal(wm * std::norm(y), ws.e + 2 * E);
  };

  for (std::int64_t t = 0; t < n; ++t) add_point(t, win[static_cast<std::size_t>(n + t)]);

  for (std::int64_t tl = n; tl <= Tc; ++tl) {
    const std::int64_t t = tl - n;
    const ScaledComplex lw = ScaledComplex(p.lambda) * eval_scaled(p.weight, t);
    ScaledComplex acc = lw * ScaledComplex(win[static_cast<std::size_t>(n)]);
    for (int j = 0; j <= n - 1; ++j)
      acc = acc - eval_scaled(p.op.a[static_cast<std::size_t>(j)], t + j) *
                      ScaledComplex(win[static_cast<std::size_t>(n + j)]);
    for (int j = 1; j <= n; ++j)
      acc = acc - conj(eval_scaled(p.op.a[static_cast<std::size_t>(j)], t)) *
                      ScaledComplex(win[static_cast<std::size_t>(n - j)]);
    const ScaledComplex den = eval_scaled(p.op.a[static_cast<std::size_t>(n)], t + n);
    if (den.is_zero())
      throw precondition_error("tail propagation: leading coefficient vanished at t = " +
                               std::to_string(t));
    const ComplexScalar y = (acc / den).to_double();
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag()))
      throw precondition_error("tail propagation: per-step growth left the envelope at t = " +
                               std::to_string(t));
    for (int i = 0; i + 1 < m; ++i)
      win[static_cast<std::size_t>(i)] = win[static_cast<std::size_t>(i + 1)];
    win[static_cast<std::size_t>(m - 1)] = y;

    double peak = 0.0;
    for (const auto& z : win) peak = std::max(peak, std::abs(z));
    if (peak == 0.0) break;  // identically zero from here on
    if (peak > std::ldexp(1.0, 200) || peak < std::ldexp(1.0, -200)) {
      int k = 0;
      std::frexp(peak, &k);
      const double f = std::ldexp(1.0, -k);
      for (auto& z : win) z *= f;
      E += k;
    }
    add_point(tl, win[static_cast<std::size_t>(m - 1)]);
    if (tl == Tc / 2) {
      sums.half = sums.full;
      half_taken = true;
    }
  }
  if (!half_taken) sums.half = sums.full;  // sum constant after an early zero window
  return sums;
}

}  // namespace

EstimateResult estimate_n_lambda(const SpectralProblem& p, const EstimateParams& params) {
  validate(p);
  if (p.lambda.imag() == 0.0)
    throw precondition_error("estimate_n_lambda: Im lambda must be nonzero");
  if (params.T_max < 128) throw precondition_error("estimate_n_lambda: T_max must be >= 128");
  if (!(params.checkpoint_ratio > 1.0))
    throw precondition_error("estimate_n_lambda: checkpoint ratio must exceed 1");
  if (!(params.eps > 0.0) || !(params.gap_factor > 1.0 + params.eps))
    throw precondition_error("estimate_n_lambda: need 0 < eps and gap_factor > 1 + eps");

  const int n = p.op.n;
  const int m = 2 * n;
  EstimateResult res;
  EstimateDiagnostics& d = res.diag;

  if (weight_is_zero(p.weight)) {
    res.determinate = true;
    res.count = m;
    d.reason = "weight is identically zero: every solution is trivially square-summable";
    return res;
  }
  if (weight_has_finite_support(p.weight)) {
    res.determinate = true;
    res.count = m;
    d.reason = "weight has finite support: every solution is trivially square-summable";
    return res;
  }

  const std::int64_t T = params.T_max;
  // A stiff root spread can exhaust double precision inside one segment and
  // degenerate the renormalization transform; retry with a finer cadence
  // before giving up.
  SolutionBasis basis;
  for (int cadence = params.renorm_every;;) {
    try {
      basis = solution_basis(p, T, cadence);
      break;
    } catch (const precondition_error&) {
      if (cadence <= 4) throw;
      cadence /= 2;
    }
  }

  std::vector<std::int64_t> cps;
  for (double c = 64.0; c < static_cast<double>(T); c *= params.checkpoint_ratio)
    cps.push_back(std::llround(c));
  cps.push_back(T / 2);
  cps.push_back(T);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  while (!cps.empty() && cps.back() > T) cps.pop_back();
  d.checkpoints = cps;
  d.trace = gram_trace(p, basis, cps);

  // Per-direction growth exponents from the renormalization cascade, averaged
  // over the trailing half of the horizon.
  const auto& log = basis.renorm_log;
  std::vector<double> gsum(static_cast<std::size_t>(m), 0.0);
  std::int64_t gsteps = 0;
  for (int pass = 0; pass < 2 && gsteps == 0; ++pass) {
    const std::int64_t cut = pass == 0 ? T / 2 : -1;
    std::fill(gsum.begin(), gsum.end(), 0.0);
    for (std::size_t j = 1; j < log.size(); ++j) {
      if (log[j].t <= cut) continue;
      gsteps += log[j].t - log[j - 1].t;
      for (int i = 0; i < m; ++i)
        gsum[static_cast<std::size_t>(i)] += log[j].diag_log10[static_cast<std::size_t>(i)];
    }
    if (pass == 0 && gsteps > 0 && log.size() >= 4 && gsteps < T / 8) gsteps = 0;
  }
  if (gsteps == 0) {
    d.reason = "not enough renormalization intervals to measure direction growth";
    return res;
  }
  d.growth_log10.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    d.growth_log10[static_cast<std::size_t>(i)] = gsum[static_cast<std::size_t>(i)] /
                                                  static_cast<double>(gsteps);
  std::sort(d.growth_log10.rbegin(), d.growth_log10.rend());
  d.weight_growth_log10 = weight_growth_log10(p.weight);

  const std::int64_t half_steps = T - T / 2;
  const double lo_gate = std::log10(1.0 + params.eps);
  const double hi_gate = std::log10(params.gap_factor);
  d.predicted_log10.resize(static_cast<std::size_t>(m));
  d.cls.resize(static_cast<std::size_t>(m));
  int bounded = 0, borderline = 0;
  for (int i = 0; i < m; ++i) {
    const double lam = (2.0 * d.growth_log10[static_cast<std::size_t>(i)] +
                        d.weight_growth_log10) *
                       static_cast<double>(half_steps);
    d.predicted_log10[static_cast<std::size_t>(i)] = lam;
    if (lam <= lo_gate) {
      d.cls[static_cast<std::size_t>(i)] = DirectionClass::Bounded;
      ++bounded;
    } else if (lam >= hi_gate) {
      d.cls[static_cast<std::size_t>(i)] = DirectionClass::Unbounded;
    } else {
      d.cls[static_cast<std::size_t>(i)] = DirectionClass::Borderline;
      ++borderline;
    }
  }

  // Cross-check the cascade against the Gram trace on the top eigenvalue.
  // The Gram is monotone, so a nonpositive predicted increment means the top
  // eigenvalue saturates: the predicted ratio clamps at zero.
  d.consistency_predicted = std::max(d.predicted_log10.front(), 0.0);
  {
    const auto it = std::find(d.checkpoints.begin(), d.checkpoints.end(), T / 2);
    const std::size_t ihalf = static_cast<std::size_t>(it - d.checkpoints.begin());
    const ScaledReal top_full = d.trace.eigs.back().back();
    const ScaledReal top_half = d.trace.eigs[ihalf].back();
    if (!top_full.is_zero() && !top_half.is_zero()) {
      d.consistency_measured = top_full.log10_abs() - top_half.log10_abs();
      if (std::fabs(d.consistency_measured - d.consistency_predicted) >
          0.35 * std::fabs(d.consistency_predicted) + 3.0) {
        d.reason = "measured Gram growth disagrees with the cascade prediction";
        return res;
      }
    }
  }

  if (borderline > 0) {
    d.reason = "direction growth in the borderline band between the two gates";
    return res;
  }

  if (bounded == 0) {
    res.determinate = true;
    res.count = 0;
    d.reason = "no bounded directions";
    return res;
  }

  // Stage 2 anchor: deep enough to separate, shallow enough that the Gram
  // spread stays within double-precision trust.
  const double span = std::max(
      2.0 * d.growth_log10.front() + d.weight_growth_log10, 0.0);
  std::int64_t T1 = span > 2.5e-3
                        ? static_cast<std::int64_t>(std::ceil(11.0 / span))
                        : T / 4;
  const std::int64_t t1_lo = std::max<std::int64_t>(2 * n + 2, 16);
  const std::int64_t t1_hi = std::max<std::int64_t>(32, T / 4);
  T1 = std::clamp(T1, t1_lo, t1_hi);

  GramTrace anchor;
  // The retry floor sits below the initial clamp: a stiff spread can need an
  // anchor shallower than the preferred minimum depth.
  const std::int64_t t1_floor = std::max<std::int64_t>(2 * n + 4, 8);
  for (int tries = 0;; ++tries) {
    const std::int64_t one[] = {T1};
    anchor = gram_trace(p, basis, one);
    const ScaledReal& lo = anchor.eigs.front().front();
    const ScaledReal& hi = anchor.eigs.front().back();
    const bool ok = !lo.is_zero() && !hi.is_zero() &&
                    hi.log10_abs() - lo.log10_abs() <= 12.5;
    if (ok) break;
    if (T1 <= t1_floor || tries >= 8) {
      d.anchor_T = T1;
      d.reason = "anchor Gram ill-conditioned at every usable depth";
      return res;
    }
    T1 = std::max(t1_floor, T1 - std::max<std::int64_t>(2, T1 / 8));
  }
  d.anchor_T = T1;

  std::int64_t Tc = T;
  if (bounded < m) {
    double r_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i)
      if (d.cls[static_cast<std::size_t>(i)] == DirectionClass::Unbounded)
        r_min = std::min(r_min, 2.0 * d.growth_log10[static_cast<std::size_t>(i)] +
                                    d.weight_growth_log10);
    const double margin =
        std::ceil((2.0 * std::log10(std::max(static_cast<double>(T1), 10.0)) + 4.0) / r_min);
    Tc = std::min<std::int64_t>(T, 2 * T1 - static_cast<std::int64_t>(margin));
  }
  if (Tc < T1 + 4 || Tc < 4 * n + 16) {
    d.confirm_T = Tc;
    d.reason = "confirmation horizon collapsed under the contamination margin";
    return res;
  }
  d.confirm_T = Tc;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(anchor.grams.front().mantissa);
  if (es.info() != Eigen::Success) {
    d.reason = "anchor Gram eigenvalue decomposition failed";
    return res;
  }
  for (int c = 0; c < bounded; ++c) {
    const TailSums s = propagate_tail(p, es.eigenvectors().col(c), Tc);
    const double ratio =
        s.full.is_zero() ? 0.0 : ((s.full - s.half) / s.full).to_double();
    d.tail_ratios.push_back(ratio);
    if (!(ratio <= params.eps)) {
      d.reason = "candidate tail mass keeps growing: stage 2 contradicts stage 1";
      return res;
    }
  }

  res.determinate = true;
  res.count = bounded;
  d.reason = "bounded cluster confirmed by tail stabilization";
  return res;
}

namespace {

struct TailForm {
  ComplexScalar chat{0.0, 0.0};  // value ~ chat * rho^t for large t
  double rho = 1.0;
  bool ok = false;
};

TailForm tail_form(const CoeffSeq& f) {
  TailForm out;
  if (const auto* c = std::get_if<ConstantTail>(&f.tail)) {
    out.chat = c->c;
    out.rho = 1.0;
    out.ok = true;
  } else if (const auto* g = std::get_if<GeometricTail>(&f.tail)) {
    const double norm = std::pow(g->rho, static_cast<double>(-f.first_tail_index()));
    out.chat = g->c * norm;
    out.rho = g->rho;
    out.ok = std::isfinite(norm) && std::isfinite(std::abs(out.chat));
  }
  return out;
}

}  // namespace

OracleResult root_count_oracle(const SpectralProblem& p, double delta) {
  validate(p);
  if (!(delta > 0.0) || !(delta < 0.5))
    throw precondition_error("root_count_oracle: delta must lie in (0, 0.5)");
  const int n = p.op.n;
  const int m = 2 * n;
  OracleResult out;

  if (!std::holds_alternative<ConstantTail>(p.weight.tail)) {
    out.detail = "weight tail is not constant";
    return out;
  }
  const ComplexScalar wc = std::get<ConstantTail>(p.weight.tail).c;

  std::vector<TailForm> tf(static_cast<std::size_t>(n) + 1);
  bool all_const = true;
  for (int j = 0; j <= n; ++j) {
    tf[static_cast<std::size_t>(j)] = tail_form(p.op.a[static_cast<std::size_t>(j)]);
    if (!tf[static_cast<std::size_t>(j)].ok) {
      out.detail = "coefficient tail admits no asymptotic form";
      return out;
    }
    if (tf[static_cast<std::size_t>(j)].rho != 1.0) all_const = false;
  }

  Eigen::MatrixXcd M;
  if (all_const) {
    // Characteristic polynomial: sum A_j r^{n+j} + sum conj(A_j) r^{n-j}
    // - lambda w r^n, degree 2n, leading coefficient A_n != 0.
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(m + 1);
    for (int j = 0; j <= n; ++j) c(n + j) += tf[static_cast<std::size_t>(j)].chat;
    for (int j = 1; j <= n; ++j) c(n - j) += std::conj(tf[static_cast<std::size_t>(j)].chat);
    c(n) -= p.lambda * wc;
    M = Eigen::MatrixXcd::Zero(m, m);
    for (int i = 1; i < m; ++i) M(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) M(i, m - 1) = -c(i) / c(m);
  } else {
    // Limiting normalized transfer matrix for state (y(t-n), ..., y(t+n-1)).
    const double rho_n = tf[static_cast<std::size_t>(n)].rho;
    const ComplexScalar kd =
        tf[static_cast<std::size_t>(n)].chat * std::pow(rho_n, static_cast<double>(n));
    const auto lim = [&](std::initializer_list<std::pair<ComplexScalar, double>> terms)
        -> std::optional<ComplexScalar> {
      ComplexScalar acc{0.0, 0.0};
      for (const auto& [k, rho] : terms) {
        if (k == ComplexScalar{0.0, 0.0}) continue;
        if (rho > rho_n * (1.0 + 1e-12)) return std::nullopt;
        if (std::fabs(rho - rho_n) <= 1e-12 * rho_n) acc += k;
      }
      return acc / kd;
    };
    M = Eigen::MatrixXcd::Zero(m, m);
    for (int i = 0; i + 1 < m; ++i) M(i, i + 1) = 1.0;
    for (int j = 0; j <= n - 1; ++j) {
      const auto& f = tf[static_cast<std::size_t>(j)];
      std::optional<ComplexScalar> e;
      if (j == 0) {
        e = lim({{-f.chat, f.rho}, {p.lambda * wc, 1.0}});
      } else {
        e = lim({{-f.chat * std::pow(f.rho, static_cast<double>(j)), f.rho}});
      }
      if (!e) {
        out.detail = "coefficient ratio diverges: no limiting transfer matrix";
        return out;
      }
      M(m - 1, n + j) += *e;
    }
    for (int j = 1; j <= n; ++j) {
      const auto& f = tf[static_cast<std::size_t>(j)];
      const auto e = lim({{-std::conj(f.chat), f.rho}});
      if (!e) {
        out.detail = "coefficient ratio diverges: no limiting transfer matrix";
        return out;
      }
      M(m - 1, n - j) += *e;
    }
  }

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M);
  if (es.info() != Eigen::Success) {
    out.status = OracleStatus::RootFindingFailure;
    out.detail = "eigenvalue iteration did not converge";
    return out;
  }
  int count = 0;
  for (int i = 0; i < m; ++i) {
    const double mod = std::abs(es.eigenvalues()(i));
    if (std::fabs(mod - 1.0) <= delta) {
      out.detail = "root modulus within delta of 1";
      return out;
    }
    if (mod < 1.0 - delta) ++count;
  }
  out.status = OracleStatus::Count;
  out.count = count;
  out.detail = all_const ? "characteristic-polynomial roots" : "limiting transfer matrix";
  return out;
}

DefinitenessReport check_definiteness(const FSAExpr& l, const CoeffSeq& w,
                                      std::int64_t window_end,
                                      std::span<const ComplexScalar> lambda_samples) {
  validate(l);
  const int n = l.n;
  if (window_end < 2 * n)
    throw precondition_error("check_definiteness: window_end must be >= 2n");

  DefinitenessReport out;
  int run = 0;
  for (std::int64_t t = 0; t <= window_end; ++t) {
    if (eval(w, t).real() > 0.0) {
      if (++run == 2 * n) {
        out.definite = true;
        out.via_positive_weight_window = true;
        out.window_start = t - 2 * n + 1;
        out.detail = "weight strictly positive on 2n consecutive points starting at t = " +
                     std::to_string(out.window_start);
        return out;
      }
    } else {
      run = 0;
    }
  }

  if (lambda_samples.empty()) {
    out.detail = "no positive 2n-point weight window and no spectral samples given";
    return out;
  }
  for (const ComplexScalar lambda : lambda_samples) {
    SpectralProblem p{l, w, lambda};
    const SolutionBasis basis = solution_basis(p, window_end, 32);
    const std::int64_t one[] = {window_end};
    const GramTrace g = gram_trace(p, basis, one);
    const ScaledReal& lo = g.eigs.front().front();
    const ScaledReal& hi = g.eigs.front().back();
    if (hi.is_zero() || !(lo > ScaledReal(1e-12) * hi)) {
      out.detail = "solution Gram over the window is numerically singular at lambda = (" +
                   std::to_string(lambda.real()) + ", " + std::to_string(lambda.imag()) +
                   "): the definiteness condition could not be verified";
      return out;
    }
  }
  out.definite = true;
  out.detail = "solution Gram positive definite over the window at every sampled lambda";
  return out;
}

namespace {

LambdaOutcome run_lambda_branch(const FSAExpr& l, const CoeffSeq& w, ComplexScalar lambda,
                                const ReportParams& params) {
  LambdaOutcome o;
  o.lambda = lambda;
  const SpectralProblem p{l, w, lambda};
  try {
    o.estimate = estimate_n_lambda(p, params.est);
  } catch (const std::exception& e) {
    o.estimate = EstimateResult{};
    o.estimate.diag.reason = std::string("estimator failed: ") + e.what();
  }
  try {
    o.oracle = root_count_oracle(p, params.root_margin);
  } catch (const std::exception& e) {
    o.oracle = OracleResult{};
    o.oracle.detail = std::string("oracle failed: ") + e.what();
  }

  const bool est_det = o.estimate.determinate;
  const bool ora_det = o.oracle.status == OracleStatus::Count;
  if (est_det && ora_det) {
    if (o.estimate.count == o.oracle.count) {
      o.determinate = true;
      o.count = o.estimate.count;
      o.method = CountMethod::BothAgree;
    } else {
      o.method = CountMethod::None;
      o.note = "estimator (" + std::to_string(o.estimate.count) + ") and oracle (" +
               std::to_string(o.oracle.count) + ") disagree";
    }
  } else if (est_det) {
    o.determinate = true;
    o.count = o.estimate.count;
    o.method = CountMethod::Gram;
    o.note = "oracle not applicable: " + o.oracle.detail;
  } else if (ora_det) {
    o.determinate = true;
    o.count = o.oracle.count;
    o.method = CountMethod::Oracle;
    o.note = "estimator indeterminate: " + o.estimate.diag.reason;
  } else {
    o.method = CountMethod::None;
    o.note = "estimator: " + o.estimate.diag.reason + "; oracle: " + o.oracle.detail;
  }
  return o;
}

}  // namespace

DeficiencyReport deficiency_report(const FSAExpr& l, const CoeffSeq& w,
                                   const ReportParams& params) {
  validate(l);
  DeficiencyReport rep;
  rep.n = l.n;
  rep.params = params;

  const ComplexScalar ip{0.0, 1.0};
  const ComplexScalar im{0.0, -1.0};
  if (params.concurrent) {
    auto fut = std::async(std::launch::async,
                          [&] { return run_lambda_branch(l, w, ip, params); });
    rep.minus = run_lambda_branch(l, w, im, params);
    rep.plus = fut.get();
  } else {
    rep.plus = run_lambda_branch(l, w, ip, params);
    rep.minus = run_lambda_branch(l, w, im, params);
  }

  try {
    const ComplexScalar samples[] = {ip, im};
    rep.definiteness = check_definiteness(
        l, w, std::max<std::int64_t>(params.definiteness_window, 2 * l.n), samples);
  } catch (const std::exception& e) {
    rep.definiteness = DefinitenessReport{};
    rep.definiteness.detail = std::string("definiteness check failed: ") + e.what();
  }
  if (!rep.definiteness.definite) {
    const char* tag = "definiteness unverified: counts are square-summable solution counts only";
    rep.plus.note = rep.plus.note.empty() ? tag : rep.plus.note + "; " + tag;
    rep.minus.note = rep.minus.note.empty() ? tag : rep.minus.note + "; " + tag;
  }

  rep.equal = rep.plus.determinate && rep.minus.determinate &&
              rep.plus.count == rep.minus.count;
  const auto in_range = [&](const LambdaOutcome& o) {
    return o.count >= rep.n && o.count <= 2 * rep.n;
  };
  rep.bounds_ok = rep.plus.determinate && rep.minus.determinate && in_range(rep.plus) &&
                  in_range(rep.minus);
  return rep;
}

void write_deficiency_csv(std::ostream& os, const EstimateDiagnostics& d) {
  os << "checkpoint,eig_index,log10_eigenvalue,growth_ratio,classification\n";
  char buf[200];
  const auto& tr = d.trace;
  for (std::size_t c = 0; c < tr.checkpoints.size(); ++c) {
    const std::size_t m = tr.eigs[c].size();
    for (std::size_t i = 0; i < m; ++i) {
      const ScaledReal& ev = tr.eigs[c][i];
      double ratio = 1.0;
      if (c > 0) {
        const ScaledReal& prev = tr.eigs[c - 1][i];
        if (prev.is_zero())
          ratio = ev.is_zero() ? 1.0 : std::numeric_limits<double>::infinity();
        else
          ratio = (ev / prev).to_double();
      }
      const char* label = "unclassified";
      if (d.cls.size() == m) label = class_label(d.cls[m - 1 - i]);
      std::snprintf(buf, sizeof buf, "%lld,%d,%.17g,%.17g,%s\n",
                    static_cast<long long>(tr.checkpoints[c]), static_cast<int>(i),
                    ev.log10_abs(), ratio, label);
      os << buf;
    }
  }
}

}  // namespace sadiff
