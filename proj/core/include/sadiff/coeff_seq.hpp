#pragma once

// Coefficient sequences on the integer half-line: an explicitly tabulated
// window followed by a closed-form tail rule. All expression coefficients,
// weights, and test sequences share this representation.

#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sadiff/scaled.hpp"

namespace sadiff {

using ComplexScalar = std::complex<double>;

/// Tail value c for every index at or beyond the first tail index.
struct ConstantTail {
  ComplexScalar c{0.0, 0.0};
};

/// Tail value c * rho^(t - t0), anchored at the first tail index t0; rho > 0.
struct GeometricTail {
  ComplexScalar c{0.0, 0.0};
  double rho = 1.0;
};

/// Tail value c * (1 + t)^alpha; requires the first tail index to be >= 0.
struct PowerTail {
  ComplexScalar c{0.0, 0.0};
  double alpha = 0.0;
};

using Tail = std::variant<ConstantTail, GeometricTail, PowerTail>;

/// Sequence defined for every integer t >= start: tabulated values on
/// [start, start + window.size()), then the tail rule.
struct CoeffSeq {
  std::int64_t start = 0;
  std::vector<ComplexScalar> window;
  Tail tail = ConstantTail{};

  std::int64_t first_tail_index() const {
    return start + static_cast<std::int64_t>(window.size());
  }
};

/// Throws precondition_error if any component is non-finite, a geometric ratio
/// is not a positive real, or a power tail starts below index 0.
void validate(const CoeffSeq& f, const std::string& name = "sequence");

/// Scale-tracked evaluation; the propagation and Gram paths use this form.
/// Throws precondition_error for t < f.start.
ScaledComplex eval_scaled(const CoeffSeq& f, std::int64_t t);

/// Plain evaluation: eval_scaled folded to a double (saturates to infinity
/// outside the double range). Throws precondition_error for t < f.start.
ComplexScalar eval(const CoeffSeq& f, std::int64_t t);

/// Entrywise complex conjugate (window and tail scale).
CoeffSeq conj(const CoeffSeq& f);

/// True if Im f(t) <= tol * (1 + |f(t)|) for every t: exact on the window,
/// symbolic on the tail scale.
bool is_real(const CoeffSeq& f, double tol = 1e-10);

/// True if no window value and no tail scale vanishes.
bool is_nonvanishing(const CoeffSeq& f);

/// True if f and g agree to |f - g| <= tol * (1 + max(|f|, |g|)) on
/// [lo, hi] and their tails match symbolically when both are constant.
bool approx_equal_on(const CoeffSeq& f, const CoeffSeq& g, std::int64_t lo, std::int64_t hi,
                     double tol = 1e-10);

// Construction helpers (each validates).
CoeffSeq constant_seq(ComplexScalar c);
CoeffSeq geometric_seq(ComplexScalar c, double rho);
CoeffSeq power_seq(ComplexScalar c, double alpha);
CoeffSeq table_seq(std::int64_t start, std::vector<ComplexScalar> values, Tail tail);
/// Tabulated values with an identically-zero tail (compactly supported data).
CoeffSeq compact_seq(std::int64_t start, std::vector<ComplexScalar> values);

}  // namespace sadiff
