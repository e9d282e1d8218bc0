#pragma once

// Estimation of n_lambda: the number of linearly independent solutions of
// (Ly)(t) = lambda w(t) y(t) with finite weighted square sum. Two independent
// signals are combined: growth exponents measured from the renormalization
// cascade classify directions as bounded or unbounded, and a tail-stabilization
// check on explicitly re-propagated candidate vectors confirms the bounded
// cluster. An asymptotic root-count oracle cross-checks both whenever the
// coefficient tails admit one. Indeterminate is a first-class outcome: a count
// is only claimed when the signals agree.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sadiff/coeff_seq.hpp"
#include "sadiff/expr.hpp"
#include "sadiff/scaled.hpp"
#include "sadiff/solve.hpp"

namespace sadiff {

/// Hermitian matrix stored as mantissa * 2^exp2 (one common exponent).
struct ScaledGram {
  Eigen::MatrixXcd mantissa;
  std::int64_t exp2 = 0;
};

/// Weighted partial-sum Gram matrices G(T)_{ab} = sum_{t=0..T} w(t)
/// conj(Y_a(t)) Y_b(t) of a solution basis in its original coordinates, at an
/// increasing sequence of checkpoints, with per-checkpoint eigenvalues sorted
/// ascending (clamped at zero: G is positive semidefinite by construction).
struct GramTrace {
  std::vector<std::int64_t> checkpoints;
  std::vector<ScaledGram> grams;
  std::vector<std::vector<ScaledReal>> eigs;
};

GramTrace gram_trace(const SpectralProblem& p, const SolutionBasis& basis,
                     std::span<const std::int64_t> checkpoints);

struct EstimateParams {
  std::int64_t T_max = 8192;
  double checkpoint_ratio = 2.0;
  double eps = 0.05;        // stabilization ratio for bounded classification
  double gap_factor = 1e3;  // growth factor for unbounded classification
  int renorm_every = 32;
};

enum class DirectionClass { Bounded, Unbounded, Borderline };

struct EstimateDiagnostics {
  std::vector<std::int64_t> checkpoints;
  GramTrace trace;
  std::vector<double> growth_log10;     // per-direction solution growth, sorted descending
  double weight_growth_log10 = 0.0;     // tail growth of the weight
  std::vector<double> predicted_log10;  // predicted Gram eigenvalue growth over [T/2, T]
  std::vector<DirectionClass> cls;      // aligned with growth_log10
  std::int64_t anchor_T = 0;
  std::int64_t confirm_T = 0;
  std::vector<double> tail_ratios;      // stage-2 tail mass ratios per candidate
  double consistency_predicted = 0.0;   // top-eigenvalue growth, cascade prediction
  double consistency_measured = 0.0;    // same, measured from the Gram trace
  std::string reason;                   // outcome trail, human-readable
};

struct EstimateResult {
  bool determinate = false;
  int count = 0;
  EstimateDiagnostics diag;
};

/// Two-stage estimate of n_lambda. Stage 1 classifies the 2n growth directions
/// from the renormalization cascade and predicts the Gram eigenvalue ratios
/// mu(T_max)/mu(T_max/2): bounded if <= 1+eps, unbounded if >= gap_factor,
/// anything between is Borderline and makes the outcome Indeterminate. Stage 2
/// extracts the bounded cluster's eigenvectors from a well-conditioned anchor
/// Gram, re-propagates each candidate from its initial vector, and confirms
/// tail stabilization S(Tc) - S(Tc/2) <= eps * S(Tc); a contradiction or an
/// unreachable confirmation horizon again yields Indeterminate. The measured
/// top-eigenvalue growth must match the cascade prediction.
/// Requires Im lambda != 0 and T_max >= 128.
EstimateResult estimate_n_lambda(const SpectralProblem& p, const EstimateParams& params = {});

enum class OracleStatus { Count, Inapplicable, RootFindingFailure };

struct OracleResult {
  OracleStatus status = OracleStatus::Inapplicable;
  int count = 0;
  std::string detail;
};

/// Asymptotic count of decaying solution directions. Constant tails: roots of
/// the characteristic polynomial sum_j A_j r^{n+j} + sum_j conj(A_j) r^{n-j}
/// - lambda w r^n with modulus < 1 - delta (companion-matrix eigenvalues).
/// Geometric tails: eigenvalue moduli of the limiting normalized transfer
/// matrix, entries lim A_j(t+j)/A_n(t+n). Inapplicable when any modulus lies
/// within delta of 1, a limit fails to exist, a tail is a power tail, or the
/// weight tail is not constant.
OracleResult root_count_oracle(const SpectralProblem& p, double delta = 1e-6);

struct DefinitenessReport {
  bool definite = false;
  bool via_positive_weight_window = false;
  std::int64_t window_start = -1;  // start of the positive 2n-point window, if any
  std::string detail;
};

/// Sufficient checks for the definiteness condition: (1) the weight is
/// strictly positive on 2n consecutive points of [0, window_end]; (2) for
/// every sampled lambda, the Gram matrix of the full solution basis over
/// [0, window_end] is (relatively) positive definite. Definite iff either
/// check passes; without it the reported counts are solution counts only, not
/// deficiency indices.
DefinitenessReport check_definiteness(const FSAExpr& l, const CoeffSeq& w,
                                      std::int64_t window_end,
                                      std::span<const ComplexScalar> lambda_samples);

enum class CountMethod { None, Gram, Oracle, BothAgree };

struct LambdaOutcome {
  ComplexScalar lambda{0.0, 0.0};
  bool determinate = false;
  int count = 0;
  CountMethod method = CountMethod::None;
  OracleResult oracle;
  EstimateResult estimate;
  std::string note;
};

struct ReportParams {
  EstimateParams est;
  double root_margin = 1e-6;  // delta for the oracle
  bool concurrent = true;
  std::int64_t definiteness_window = 64;
};

struct DeficiencyReport {
  int n = 0;
  LambdaOutcome plus;   // lambda = +i
  LambdaOutcome minus;  // lambda = -i
  bool equal = false;     // both determinate with the same count
  bool bounds_ok = false; // both determinate with counts in [n, 2n]
  DefinitenessReport definiteness;
  ReportParams params;
};

/// Run the estimator at lambda = +i and -i (concurrently when requested), run
/// the oracle where applicable, and combine: agreement upgrades the method to
/// BothAgree, an estimator-oracle contradiction demotes the outcome to
/// indeterminate, and the oracle carries the count when the estimator alone is
/// indeterminate. Failures never throw; they become indeterminate entries.
DeficiencyReport deficiency_report(const FSAExpr& l, const CoeffSeq& w,
                                   const ReportParams& params = {});

/// CSV rows "checkpoint,eig_index,log10_eigenvalue,growth_ratio,classification"
/// from an estimator run: one row per checkpoint and eigenvalue index
/// (ascending eigenvalues), growth_ratio relative to the previous checkpoint
/// (1 for the first; may saturate to inf). 17 significant digits.
void write_deficiency_csv(std::ostream& os, const EstimateDiagnostics& diag);

}  // namespace sadiff
