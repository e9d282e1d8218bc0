#pragma once

// Scale-tracked floating point: value = mantissa * 2^exp2.
// Solution norms of the half-line recurrences grow like r^t and leave the
// double range near t ~ 1500; every quantity that can reach such magnitudes
// is carried in this representation instead of a raw double.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>

namespace sadiff {

/// Real value m * 2^e, normalized so |m| is in [0.5, 1) (zero is m=0, e=0).
struct ScaledReal {
  double m = 0.0;
  std::int64_t e = 0;

  ScaledReal() = default;
  explicit ScaledReal(double v) { assign(v, 0); }
  ScaledReal(double mantissa, std::int64_t exp2) { assign(mantissa, exp2); }

  static ScaledReal from(double v) { return ScaledReal(v, 0); }

  void assign(double mantissa, std::int64_t exp2) {
    if (mantissa == 0.0 || !std::isfinite(mantissa)) {
      m = mantissa == 0.0 ? 0.0 : mantissa;
      e = 0;
      return;
    }
    int k = 0;
    m = std::frexp(mantissa, &k);
    e = exp2 + k;
  }

  bool is_zero() const { return m == 0.0; }
  bool is_finite() const { return std::isfinite(m); }
  int sign() const { return m > 0.0 ? 1 : (m < 0.0 ? -1 : 0); }

  /// Nearest double, saturating to +-infinity / 0 outside the double range.
  double to_double() const {
    if (m == 0.0) return 0.0;
    if (e > 1024) return m > 0 ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
    if (e < -1080) return 0.0;
    return std::ldexp(m, static_cast<int>(e));
  }

  double log10_abs() const {
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log10(std::fabs(m)) + static_cast<double>(e) * 0.30102999566398119521;
  }

  double log2_abs() const {
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log2(std::fabs(m)) + static_cast<double>(e);
  }

  ScaledReal abs() const { return ScaledReal(std::fabs(m), e); }

  friend ScaledReal operator*(const ScaledReal& a, const ScaledReal& b) {
    return ScaledReal(a.m * b.m, a.e + b.e);
  }
  friend ScaledReal operator/(const ScaledReal& a, const ScaledReal& b) {
    return ScaledReal(a.m / b.m, a.e - b.e);
  }
  friend ScaledReal operator+(const ScaledReal& a, const ScaledReal& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const ScaledReal *hi = &a, *lo = &b;
    if (b.e > a.e) std::swap(hi, lo);
    const std::int64_t gap = hi->e - lo->e;
    if (gap > 1100) return *hi;
    return ScaledReal(hi->m + std::ldexp(lo->m, static_cast<int>(-gap)), hi->e);
  }
  friend ScaledReal operator-(const ScaledReal& a, const ScaledReal& b) {
    return a + ScaledReal(-b.m, b.e);
  }

  // Value comparison (valid for finite values).
  friend bool operator<(const ScaledReal& a, const ScaledReal& b) {
    const int sa = a.sign(), sb = b.sign();
    if (sa != sb) return sa < sb;
    if (sa == 0) return false;
    if (a.e != b.e) return sa > 0 ? a.e < b.e : a.e > b.e;
    return a.m < b.m;
  }
  friend bool operator>(const ScaledReal& a, const ScaledReal& b) { return b < a; }
  friend bool operator<=(const ScaledReal& a, const ScaledReal& b) { return !(b < a); }
  friend bool operator>=(const ScaledReal& a, const ScaledReal& b) { return !(a < b); }
};

/// Complex value m * 2^e, normalized so max(|re m|, |im m|) is in [0.5, 1).
struct ScaledComplex {
  std::complex<double> m{0.0, 0.0};
  std::int64_t e = 0;

  ScaledComplex() = default;
  explicit ScaledComplex(std::complex<double> v) { assign(v, 0); }
  ScaledComplex(std::complex<double> mantissa, std::int64_t exp2) { assign(mantissa, exp2); }

  static ScaledComplex from(std::complex<double> v) { return ScaledComplex(v, 0); }

  void assign(std::complex<double> mantissa, std::int64_t exp2) {
    const double peak = std::fmax(std::fabs(mantissa.real()), std::fabs(mantissa.imag()));
    if (peak == 0.0 || !std::isfinite(peak)) {
      m = mantissa;
      e = 0;
      return;
    }
    int k = 0;
    std::frexp(peak, &k);
    m = {std::ldexp(mantissa.real(), -k), std::ldexp(mantissa.imag(), -k)};
    e = exp2 + k;
  }

  bool is_zero() const { return m.real() == 0.0 && m.imag() == 0.0; }
  bool is_finite() const { return std::isfinite(m.real()) && std::isfinite(m.imag()); }

  std::complex<double> to_double() const {
    if (is_zero()) return {0.0, 0.0};
    if (e > 1024) {
      const double s = std::numeric_limits<double>::infinity();
      return {m.real() == 0.0 ? 0.0 : s * (m.real() > 0 ? 1 : -1),
              m.imag() == 0.0 ? 0.0 : s * (m.imag() > 0 ? 1 : -1)};
    }
    if (e < -1080) return {0.0, 0.0};
    return {std::ldexp(m.real(), static_cast<int>(e)), std::ldexp(m.imag(), static_cast<int>(e))};
  }

  ScaledReal abs() const { return ScaledReal(std::abs(m), e); }
  ScaledComplex conj() const { return ScaledComplex(std::conj(m), e); }

  friend ScaledComplex operator*(const ScaledComplex& a, const ScaledComplex& b) {
    return ScaledComplex(a.m * b.m, a.e + b.e);
  }
  friend ScaledComplex operator*(const ScaledComplex& a, const ScaledReal& b) {
    return ScaledComplex(a.m * b.m, a.e + b.e);
  }
  friend ScaledComplex operator*(const ScaledComplex& a, std::complex<double> b) {
    return ScaledComplex(a.m * b, a.e);
  }
  friend ScaledComplex operator/(const ScaledComplex& a, const ScaledComplex& b) {
    return ScaledComplex(a.m / b.m, a.e - b.e);
  }
  friend ScaledComplex operator+(const ScaledComplex& a, const ScaledComplex& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const ScaledComplex *hi = &a, *lo = &b;
    if (b.e > a.e) std::swap(hi, lo);
    const std::int64_t gap = hi->e - lo->e;
    if (gap > 1100) return *hi;
    const int g = static_cast<int>(-gap);
    return ScaledComplex(hi->m + std::complex<double>(std::ldexp(lo->m.real(), g),
                                                      std::ldexp(lo->m.imag(), g)),
                         hi->e);
  }
  friend ScaledComplex operator-(const ScaledComplex& a, const ScaledComplex& b) {
    return a + ScaledComplex(-b.m, b.e);
  }
};

inline ScaledReal abs(const ScaledReal& a) { return a.abs(); }
inline ScaledReal abs(const ScaledComplex& a) { return a.abs(); }
inline ScaledComplex conj(const ScaledComplex& a) { return a.conj(); }

/// |a|^2 as a scaled real (exact mantissa product, no overflow).
inline ScaledReal norm_sq(const ScaledComplex& a) {
  return ScaledReal(a.m.real() * a.m.real() + a.m.imag() * a.m.imag(), 2 * a.e);
}

/// conj(a) * b as a scaled complex.
inline ScaledComplex conj_mul(const ScaledComplex& a, const ScaledComplex& b) {
  return ScaledComplex(std::conj(a.m) * b.m, a.e + b.e);
}

}  // namespace sadiff
