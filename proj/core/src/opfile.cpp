#include "sadiff/opfile.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sadiff/errors.hpp"

namespace sadiff {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& ctx, const std::string& what) {
  throw schema_error(ctx + ": " + what);
}

const json& need(const json& o, const char* key, const std::string& ctx) {
  if (!o.is_object()) bad(ctx, "must be an object");
  const auto it = o.find(key);
  if (it == o.end()) bad(ctx, std::string("missing field \"") + key + "\"");
  return *it;
}

double need_number(const json& v, const std::string& ctx) {
  if (!v.is_number()) bad(ctx, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(ctx, "must be finite");
  return x;
}

std::int64_t need_integer(const json& v, const std::string& ctx) {
  if (!v.is_number_integer()) bad(ctx, "must be an integer");
  return v.get<std::int64_t>();
}

ComplexScalar need_complex(const json& v, const std::string& ctx) {
  if (!v.is_array() || v.size() != 2) bad(ctx, "must be an [re, im] pair");
  return {need_number(v[0], ctx + "[0]"), need_number(v[1], ctx + "[1]")};
}

CoeffSeq parse_spec(const json& v, const std::string& ctx, bool allow_table) {
  const json& kindv = need(v, "kind", ctx);
  if (!kindv.is_string()) bad(ctx + ".kind", "must be a string");
  const std::string kind = kindv.get<std::string>();
  try {
    if (kind == "constant") {
      return constant_seq(need_complex(need(v, "value", ctx), ctx + ".value"));
    }
    if (kind == "geometric") {
      const ComplexScalar c = need_complex(need(v, "scale", ctx), ctx + ".scale");
      const double rho = need_number(need(v, "ratio", ctx), ctx + ".ratio");
      return geometric_seq(c, rho);
    }
    if (kind == "power") {
      const ComplexScalar c = need_complex(need(v, "scale", ctx), ctx + ".scale");
      const double alpha = need_number(need(v, "exponent", ctx), ctx + ".exponent");
      return power_seq(c, alpha);
    }
    if (kind == "table") {
      if (!allow_table) bad(ctx, "a table tail must itself be constant, geometric, or power");
      const std::int64_t start = need_integer(need(v, "start", ctx), ctx + ".start");
      const json& vals = need(v, "values", ctx);
      if (!vals.is_array() || vals.empty()) bad(ctx + ".values", "must be a nonempty array");
      std::vector<ComplexScalar> window;
      window.reserve(vals.size());
      for (std::size_t i = 0; i < vals.size(); ++i)
        window.push_back(
            need_complex(vals[i], ctx + ".values[" + std::to_string(i) + "]"));
      const CoeffSeq tail = parse_spec(need(v, "tail", ctx), ctx + ".tail", false);
      return table_seq(start, std::move(window), tail.tail);
    }
  } catch (const precondition_error& e) {
    bad(ctx, e.what());
  }
  bad(ctx + ".kind", "unknown kind \"" + kind + "\"");
}

// Real-valuedness plus nonnegative samples on [0, 64] and a nonnegative tail
// scale; diagnostic messages name the first offending index.
void check_weight_spec(const CoeffSeq& w, const std::string& ctx) {
  if (w.start > 0) bad(ctx, "must be defined from index 0 (start <= 0)");
  if (!is_real(w)) bad(ctx, "weight must be real");
  for (std::int64_t t = 0; t <= 64; ++t) {
    if (eval(w, t).real() < 0.0)
      bad(ctx, "weight must be nonnegative (negative value at t = " + std::to_string(t) + ")");
  }
  const ComplexScalar scale = std::visit(
      [](const auto& tail) { return tail.c; }, w.tail);
  if (scale.real() < 0.0) bad(ctx, "weight must be nonnegative (negative tail scale)");
}

void check_coeff_keys(const json& coeffs, const std::vector<std::string>& allowed,
                      const std::string& ctx) {
  for (const auto& [key, value] : coeffs.items()) {
    bool known = false;
    for (const auto& a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) bad(ctx, "unknown coefficient \"" + key + "\"");
  }
}

OperatorFile parse_shift(const json& doc) {
  OperatorFile out;
  const std::int64_t n = need_integer(need(doc, "n", "document"), "n");
  if (n < 0 || n > 32) bad("n", "must lie in [0, 32]");
  const int k = static_cast<int>(n);

  const json& coeffs = need(doc, "coefficients", "document");
  if (!coeffs.is_object()) bad("coefficients", "must be an object");
  std::vector<std::string> allowed;
  for (int j = 0; j <= k; ++j) allowed.push_back("A" + std::to_string(j));
  check_coeff_keys(coeffs, allowed, "coefficients");

  ShiftExpr L;
  L.k = k;
  for (int j = 0; j <= k; ++j) {
    const std::string key = "A" + std::to_string(j);
    L.fwd.push_back(
        parse_spec(need(coeffs, key.c_str(), "coefficients"), "coefficients." + key, true));
  }

  // Backward part: "conjugate" (default), "none", or explicit {"B1": ...}.
  std::string mode = "conjugate";
  const json* explicit_bwd = nullptr;
  if (const auto it = doc.find("backward"); it != doc.end()) {
    if (it->is_string()) {
      mode = it->get<std::string>();
      if (mode != "conjugate" && mode != "none")
        bad("backward", "must be \"conjugate\", \"none\", or an object of B specs");
    } else if (it->is_object()) {
      mode = "explicit";
      explicit_bwd = &*it;
    } else {
      bad("backward", "must be \"conjugate\", \"none\", or an object of B specs");
    }
  }
  if (mode == "conjugate") {
    if (k < 1) bad("backward", "conjugate layout requires n >= 1");
    L.s = k;
    for (int j = 1; j <= k; ++j) L.bwd.push_back(conj(L.fwd[static_cast<std::size_t>(j)]));
  } else if (mode == "explicit") {
    int s = 0;
    for (const auto& [key, value] : explicit_bwd->items()) {
      if (key.size() < 2 || key[0] != 'B') bad("backward", "unknown coefficient \"" + key + "\"");
      int idx = 0;
      try {
        idx = std::stoi(key.substr(1));
      } catch (const std::exception&) {
        bad("backward", "unknown coefficient \"" + key + "\"");
      }
      if (idx < 1 || idx > 32) bad("backward", "index of \"" + key + "\" out of range");
      s = std::max(s, idx);
    }
    if (s == 0) bad("backward", "explicit backward part must name B1..Bs");
    L.s = s;
    for (int j = 1; j <= s; ++j) {
      const std::string key = "B" + std::to_string(j);
      L.bwd.push_back(
          parse_spec(need(*explicit_bwd, key.c_str(), "backward"), "backward." + key, true));
    }
  } else {
    L.s = 0;
  }

  try {
    validate(L);
  } catch (const precondition_error& e) {
    bad("document", e.what());
  }
  out.shift = L;

  if (L.k == L.s && L.k >= 1 && is_formally_self_adjoint(L).pass) {
    FSAExpr f;
    f.n = L.k;
    f.a = L.fwd;
    try {
      validate(f);
      out.fsa = std::move(f);
    } catch (const precondition_error&) {
      // stays a general shift expression
    }
  }
  return out;
}

OperatorFile parse_delta_nabla(const json& doc) {
  OperatorFile out;
  const std::int64_t n = need_integer(need(doc, "n", "document"), "n");
  if (n < 1 || n > 12) bad("n", "must lie in [1, 12] for delta_nabla documents");
  const int nn = static_cast<int>(n);

  const json& coeffs = need(doc, "coefficients", "document");
  if (!coeffs.is_object()) bad("coefficients", "must be an object");
  std::vector<std::string> allowed;
  for (int j = 0; j <= nn; ++j) allowed.push_back("p" + std::to_string(j));
  for (int j = 1; j <= nn; ++j) allowed.push_back("q" + std::to_string(j));
  check_coeff_keys(coeffs, allowed, "coefficients");

  DeltaNablaExpr d;
  d.n = nn;
  for (int j = 0; j <= nn; ++j) {
    const std::string key = "p" + std::to_string(j);
    CoeffSeq c =
        parse_spec(need(coeffs, key.c_str(), "coefficients"), "coefficients." + key, true);
    if (!is_real(c)) bad("coefficients." + key, "delta_nabla coefficients must be real");
    d.p.push_back(std::move(c));
  }
  for (int j = 1; j <= nn; ++j) {
    const std::string key = "q" + std::to_string(j);
    CoeffSeq c = constant_seq({0.0, 0.0});
    if (const auto it = coeffs.find(key); it != coeffs.end()) {
      c = parse_spec(*it, "coefficients." + key, true);
      if (!is_real(c)) bad("coefficients." + key, "delta_nabla coefficients must be real");
    }
    d.q.push_back(std::move(c));
  }
  try {
    validate(d);
  } catch (const precondition_error& e) {
    bad("document", e.what());
  }
  out.dn = std::move(d);
  return out;
}

}  // namespace

OperatorFile parse_operator_file(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw schema_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("document", "must be a JSON object");
  const json& formv = need(doc, "form", "document");
  if (!formv.is_string()) bad("form", "must be a string");
  const std::string form = formv.get<std::string>();

  OperatorFile out;
  if (form == "shift") {
    out = parse_shift(doc);
  } else if (form == "delta_nabla") {
    out = parse_delta_nabla(doc);
  } else {
    bad("form", "must be \"shift\" or \"delta_nabla\"");
  }
  CoeffSeq w = parse_spec(need(doc, "weight", "document"), "weight", true);
  check_weight_spec(w, "weight");
  out.weight = std::move(w);
  return out;
}

ForwardExpr forward_view(const OperatorFile& f) {
  if (!f.shift)
    throw precondition_error("forward view requires a shift-form document");
  if (f.shift->s != 0)
    throw precondition_error("forward view requires a document without a backward part");
  ForwardExpr out;
  out.n = f.shift->k;
  out.b = f.shift->fwd;
  validate(out);
  return out;
}

namespace {

void put_number(std::string& out, double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void put_complex(std::string& out, ComplexScalar z) {
  out += '[';
  put_number(out, z.real());
  out += ',';
  put_number(out, z.imag());
  out += ']';
}

void put_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void put_tail(std::string& out, const Tail& tail) {
  if (const auto* c = std::get_if<ConstantTail>(&tail)) {
    out += "{\"kind\":\"constant\",\"value\":";
    put_complex(out, c->c);
    out += '}';
  } else if (const auto* g = std::get_if<GeometricTail>(&tail)) {
    out += "{\"kind\":\"geometric\",\"scale\":";
    put_complex(out, g->c);
    out += ",\"ratio\":";
    put_number(out, g->rho);
    out += '}';
  } else {
    const auto& p = std::get<PowerTail>(tail);
    out += "{\"kind\":\"power\",\"scale\":";
    put_complex(out, p.c);
    out += ",\"exponent\":";
    put_number(out, p.alpha);
    out += '}';
  }
}

void put_spec(std::string& out, const CoeffSeq& f) {
  CoeffSeq g = f;
  if (const auto* c = std::get_if<ConstantTail>(&g.tail)) {
    while (!g.window.empty() && g.window.back() == c->c) g.window.pop_back();
    if (g.window.empty()) {
      put_tail(out, g.tail);
      return;
    }
  }
  if (g.window.empty() && g.start == 0) {
    put_tail(out, g.tail);
    return;
  }
  if (g.window.empty()) {
    // keep the document anchor-free: materialize one value at the start index
    g.window.push_back(eval(f, f.start));
    if (auto* geo = std::get_if<GeometricTail>(&g.tail)) geo->c *= geo->rho;
  }
  out += "{\"kind\":\"table\",\"start\":";
  out += std::to_string(g.start);
  out += ",\"values\":[";
  for (std::size_t i = 0; i < g.window.size(); ++i) {
    if (i) out += ',';
    put_complex(out, g.window[i]);
  }
  out += "],\"tail\":";
  put_tail(out, g.tail);
  out += '}';
}

}  // namespace

std::string coeff_spec_json(const CoeffSeq& f) {
  std::string out;
  put_spec(out, f);
  return out;
}

namespace {

bool same_tail(const Tail& a, const Tail& b) {
  if (a.index() != b.index()) return false;
  if (const auto* c = std::get_if<ConstantTail>(&a)) return c->c == std::get<ConstantTail>(b).c;
  if (const auto* g = std::get_if<GeometricTail>(&a)) {
    const auto& h = std::get<GeometricTail>(b);
    return g->c == h.c && g->rho == h.rho;
  }
  const auto& pa = std::get<PowerTail>(a);
  const auto& pb = std::get<PowerTail>(b);
  return pa.c == pb.c && pa.alpha == pb.alpha;
}

bool same_seq(const CoeffSeq& a, const CoeffSeq& b) {
  return a.start == b.start && a.window == b.window && same_tail(a.tail, b.tail);
}

// Exact structural test for the canonical self-adjoint layout: the backward
// panel is the conjugated forward panel. Value-equal layouts with a different
// representation stay explicit.
bool conjugate_layout(const ShiftExpr& L) {
  if (L.k != L.s || L.k < 1) return false;
  for (int j = 1; j <= L.k; ++j) {
    if (!same_seq(L.bwd[static_cast<std::size_t>(j - 1)],
                  conj(L.fwd[static_cast<std::size_t>(j)])))
      return false;
  }
  return true;
}

}  // namespace

std::string write_operator_file(const ShiftExpr& L, const CoeffSeq& weight) {
  std::string out = "{\"form\":\"shift\",\"n\":";
  out += std::to_string(L.k);
  out += ",\"coefficients\":{";
  for (int j = 0; j <= L.k; ++j) {
    if (j) out += ',';
    out += "\"A" + std::to_string(j) + "\":";
    put_spec(out, L.fwd[static_cast<std::size_t>(j)]);
  }
  out += "},\"backward\":";
  if (L.s == 0) {
    out += "\"none\"";
  } else if (conjugate_layout(L)) {
    out += "\"conjugate\"";
  } else {
    out += '{';
    for (int j = 1; j <= L.s; ++j) {
      if (j > 1) out += ',';
      out += "\"B" + std::to_string(j) + "\":";
      put_spec(out, L.bwd[static_cast<std::size_t>(j - 1)]);
    }
    out += '}';
  }
  out += ",\"weight\":";
  put_spec(out, weight);
  out += "}\n";
  return out;
}

std::string write_operator_file(const FSAExpr& L, const CoeffSeq& weight) {
  std::string out = "{\"form\":\"shift\",\"n\":";
  out += std::to_string(L.n);
  out += ",\"coefficients\":{";
  for (int j = 0; j <= L.n; ++j) {
    if (j) out += ',';
    out += "\"A" + std::to_string(j) + "\":";
    put_spec(out, L.a[static_cast<std::size_t>(j)]);
  }
  out += "},\"backward\":\"conjugate\",\"weight\":";
  put_spec(out, weight);
  out += "}\n";
  return out;
}

namespace {

const char* method_name(CountMethod m) {
  switch (m) {
    case CountMethod::None: return "none";
    case CountMethod::Gram: return "gram";
    case CountMethod::Oracle: return "oracle";
    case CountMethod::BothAgree: return "both_agree";
  }
  return "none";
}

const char* oracle_status_name(OracleStatus s) {
  switch (s) {
    case OracleStatus::Count: return "count";
    case OracleStatus::Inapplicable: return "inapplicable";
    case OracleStatus::RootFindingFailure: return "root_finding_failure";
  }
  return "inapplicable";
}

const char* direction_name(DirectionClass c) {
  switch (c) {
    case DirectionClass::Bounded: return "bounded";
    case DirectionClass::Unbounded: return "unbounded";
    case DirectionClass::Borderline: return "borderline";
  }
  return "borderline";
}

void put_double_array(std::string& out, const std::vector<double>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    put_number(out, v[i]);
  }
  out += ']';
}

void put_outcome(std::string& out, const LambdaOutcome& o) {
  out += "{\"lambda\":";
  put_complex(out, o.lambda);
  out += ",\"determinate\":";
  out += o.determinate ? "true" : "false";
  out += ",\"count\":";
  out += std::to_string(o.count);
  out += ",\"method\":\"";
  out += method_name(o.method);
  out += "\",\"note\":";
  put_escaped(out, o.note);
  out += ",\"oracle\":{\"status\":\"";
  out += oracle_status_name(o.oracle.status);
  out += "\",\"count\":";
  out += std::to_string(o.oracle.count);
  out += ",\"detail\":";
  put_escaped(out, o.oracle.detail);
  out += "},\"estimate\":{\"determinate\":";
  out += o.estimate.determinate ? "true" : "false";
  out += ",\"count\":";
  out += std::to_string(o.estimate.count);
  out += ",\"reason\":";
  put_escaped(out, o.estimate.diag.reason);
  const EstimateDiagnostics& d = o.estimate.diag;
  out += ",\"growth_log10\":";
  put_double_array(out, d.growth_log10);
  out += ",\"weight_growth_log10\":";
  put_number(out, d.weight_growth_log10);
  out += ",\"predicted_log10\":";
  put_double_array(out, d.predicted_log10);
  out += ",\"classes\":[";
  for (std::size_t i = 0; i < d.cls.size(); ++i) {
    if (i) out += ',';
    out += '"';
    out += direction_name(d.cls[i]);
    out += '"';
  }
  out += "],\"anchor_t\":";
  out += std::to_string(d.anchor_T);
  out += ",\"confirm_t\":";
  out += std::to_string(d.confirm_T);
  out += ",\"tail_ratios\":";
  put_double_array(out, d.tail_ratios);
  out += ",\"consistency_predicted\":";
  put_number(out, d.consistency_predicted);
  out += ",\"consistency_measured\":";
  put_number(out, d.consistency_measured);
  out += ",\"checkpoints\":[";
  for (std::size_t i = 0; i < d.checkpoints.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(d.checkpoints[i]);
  }
  out += "]}}";
}

}  // namespace

std::string write_deficiency_json(const DeficiencyReport& rep) {
  std::string out = "{\"n\":";
  out += std::to_string(rep.n);
  out += ",\"n_plus\":";
  out += rep.plus.determinate ? std::to_string(rep.plus.count) : "null";
  out += ",\"n_minus\":";
  out += rep.minus.determinate ? std::to_string(rep.minus.count) : "null";
  out += ",\"equal\":";
  out += rep.equal ? "true" : "false";
  out += ",\"bounds_ok\":";
  out += rep.bounds_ok ? "true" : "false";
  out += ",\"plus\":";
  put_outcome(out, rep.plus);
  out += ",\"minus\":";
  put_outcome(out, rep.minus);
  out += ",\"definiteness\":{\"definite\":";
  out += rep.definiteness.definite ? "true" : "false";
  out += ",\"via_positive_weight_window\":";
  out += rep.definiteness.via_positive_weight_window ? "true" : "false";
  out += ",\"window_start\":";
  out += std::to_string(rep.definiteness.window_start);
  out += ",\"detail\":";
  put_escaped(out, rep.definiteness.detail);
  out += "},\"params\":{\"t_max\":";
  out += std::to_string(rep.params.est.T_max);
  out += ",\"checkpoint_ratio\":";
  put_number(out, rep.params.est.checkpoint_ratio);
  out += ",\"eps\":";
  put_number(out, rep.params.est.eps);
  out += ",\"gap_factor\":";
  put_number(out, rep.params.est.gap_factor);
  out += ",\"renorm_every\":";
  out += std::to_string(rep.params.est.renorm_every);
  out += ",\"root_margin\":";
  put_number(out, rep.params.root_margin);
  out += ",\"concurrent\":";
  out += rep.params.concurrent ? "true" : "false";
  out += ",\"definiteness_window\":";
  out += std::to_string(rep.params.definiteness_window);
  out += "}}\n";
  return out;
}

std::string write_factorization_json(const Factorization& f, const FactorizationCheck& chk) {
  std::string out = "{\"params\":{\"horizon\":";
  out += std::to_string(f.horizon);
  out += "},\"n\":";
  out += std::to_string(f.factors.n);
  out += ",\"factors\":{";
  for (int j = 0; j <= f.factors.n; ++j) {
    if (j) out += ',';
    out += "\"B" + std::to_string(j) + "\":";
    put_spec(out, f.factors.b[static_cast<std::size_t>(j)]);
  }
  out += "},\"c\":";
  put_spec(out, f.c);
  out += ",\"triangle\":[";
  for (std::size_t j = 0; j < f.triangle.size(); ++j) {
    if (j) out += ',';
    out += '[';
    for (std::size_t i = 0; i < f.triangle[j].size(); ++i) {
      if (i) out += ',';
      put_complex(out, f.triangle[j][i]);
    }
    out += ']';
  }
  out += "],\"verification\":{\"pass\":";
  out += chk.pass ? "true" : "false";
  out += ",\"max_deviation\":";
  put_number(out, chk.max_deviation);
  out += ",\"scale\":";
  put_number(out, chk.scale);
  out += ",\"worst_j\":";
  out += std::to_string(chk.worst_j);
  out += ",\"worst_t\":";
  out += std::to_string(chk.worst_t);
  out += "}}\n";
  return out;
}

void write_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp + " for writing");
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    os.flush();
    if (!os) throw std::runtime_error("write to " + tmp + " failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

}  // namespace sadiff
