#include "sadiff/coeff_seq.hpp"

#include <cmath>

#include "sadiff/errors.hpp"

namespace sadiff {

namespace {

bool finite(ComplexScalar z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// c * base^k as a scaled complex, with base > 0 and integer k of any size.
ScaledComplex scaled_pow(ComplexScalar c, double base, double k) {
  const double x = k * std::log2(base);
  const double xi = std::floor(x);
  const double mant = std::exp2(x - xi);
  return ScaledComplex(c * mant, static_cast<std::int64_t>(xi));
}

}  // namespace

void validate(const CoeffSeq& f, const std::string& name) {
  for (std::size_t i = 0; i < f.window.size(); ++i) {
    if (!finite(f.window[i]))
      throw precondition_error(name + ": non-finite window value at offset " + std::to_string(i));
  }
  if (const auto* ct = std::get_if<ConstantTail>(&f.tail)) {
    if (!finite(ct->c)) throw precondition_error(name + ": non-finite constant tail");
  } else if (const auto* gt = std::get_if<GeometricTail>(&f.tail)) {
    if (!finite(gt->c)) throw precondition_error(name + ": non-finite geometric tail scale");
    if (!std::isfinite(gt->rho) || gt->rho <= 0.0)
      throw precondition_error(name + ": geometric tail ratio must be a positive real");
  } else if (const auto* pt = std::get_if<PowerTail>(&f.tail)) {
    if (!finite(pt->c) || !std::isfinite(pt->alpha))
      throw precondition_error(name + ": non-finite power tail");
    if (f.first_tail_index() < 0)
      throw precondition_error(name + ": power tail must not start below index 0");
  }
}

ScaledComplex eval_scaled(const CoeffSeq& f, std::int64_t t) {
  if (t < f.start)
    throw precondition_error("sequence evaluated at index " + std::to_string(t) +
                             " below start " + std::to_string(f.start));
  const std::int64_t t0 = f.first_tail_index();
  if (t < t0) return ScaledComplex::from(f.window[static_cast<std::size_t>(t - f.start)]);
  if (const auto* ct = std::get_if<ConstantTail>(&f.tail)) return ScaledComplex::from(ct->c);
  if (const auto* gt = std::get_if<GeometricTail>(&f.tail))
    return scaled_pow(gt->c, gt->rho, static_cast<double>(t - t0));
  const auto& pt = std::get<PowerTail>(f.tail);
  return scaled_pow(pt.c, static_cast<double>(1 + t), pt.alpha);
}

ComplexScalar eval(const CoeffSeq& f, std::int64_t t) { return eval_scaled(f, t).to_double(); }

CoeffSeq conj(const CoeffSeq& f) {
  CoeffSeq g = f;
  for (auto& z : g.window) z = std::conj(z);
  if (auto* ct = std::get_if<ConstantTail>(&g.tail)) ct->c = std::conj(ct->c);
  else if (auto* gt = std::get_if<GeometricTail>(&g.tail)) gt->c = std::conj(gt->c);
  else std::get<PowerTail>(g.tail).c = std::conj(std::get<PowerTail>(g.tail).c);
  return g;
}

bool is_real(const CoeffSeq& f, double tol) {
  for (const auto& z : f.window)
    if (std::fabs(z.imag()) > tol * (1.0 + std::abs(z))) return false;
  ComplexScalar scale;
  if (const auto* ct = std::get_if<ConstantTail>(&f.tail)) scale = ct->c;
  else if (const auto* gt = std::get_if<GeometricTail>(&f.tail)) scale = gt->c;
  else scale = std::get<PowerTail>(f.tail).c;
  return std::fabs(scale.imag()) <= tol * (1.0 + std::abs(scale));
}

bool is_nonvanishing(const CoeffSeq& f) {
  for (const auto& z : f.window)
    if (z == ComplexScalar{0.0, 0.0}) return false;
  ComplexScalar scale;
  if (const auto* ct = std::get_if<ConstantTail>(&f.tail)) scale = ct->c;
  else if (const auto* gt = std::get_if<GeometricTail>(&f.tail)) scale = gt->c;
  else scale = std::get<PowerTail>(f.tail).c;
  return scale != ComplexScalar{0.0, 0.0};
}

bool approx_equal_on(const CoeffSeq& f, const CoeffSeq& g, std::int64_t lo, std::int64_t hi,
                     double tol) {
  for (std::int64_t t = lo; t <= hi; ++t) {
    const ComplexScalar a = eval(f, t), b = eval(g, t);
    if (std::abs(a - b) > tol * (1.0 + std::fmax(std::abs(a), std::abs(b)))) return false;
  }
  const auto* cf = std::get_if<ConstantTail>(&f.tail);
  const auto* cg = std::get_if<ConstantTail>(&g.tail);
  if (cf && cg) {
    if (std::abs(cf->c - cg->c) > tol * (1.0 + std::fmax(std::abs(cf->c), std::abs(cg->c))))
      return false;
  }
  return true;
}

CoeffSeq constant_seq(ComplexScalar c) {
  CoeffSeq f{0, {}, ConstantTail{c}};
  validate(f);
  return f;
}

CoeffSeq geometric_seq(ComplexScalar c, double rho) {
  CoeffSeq f{0, {}, GeometricTail{c, rho}};
  validate(f);
  return f;
}

CoeffSeq power_seq(ComplexScalar c, double alpha) {
  CoeffSeq f{0, {}, PowerTail{c, alpha}};
  validate(f);
  return f;
}

CoeffSeq table_seq(std::int64_t start, std::vector<ComplexScalar> values, Tail tail) {
  CoeffSeq f{start, std::move(values), std::move(tail)};
  validate(f);
  return f;
}

CoeffSeq compact_seq(std::int64_t start, std::vector<ComplexScalar> values) {
  return table_seq(start, std::move(values), ConstantTail{{0.0, 0.0}});
}

}  // namespace sadiff
