// Command-line front end: parses operator definition files, dispatches to the
// library, and emits reports (text), documents (JSON), and bulk numerics (CSV).
//
// Exit codes: 0 success, 1 negative verdict or internal failure, 2 document or
// command-line parse error, 3 precondition violation, 4 indeterminate outcome,
// 5 property failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sadiff/deficiency.hpp"
#include "sadiff/errors.hpp"
#include "sadiff/expr.hpp"
#include "sadiff/factor.hpp"
#include "sadiff/green.hpp"
#include "sadiff/opfile.hpp"
#include "sadiff/solve.hpp"

namespace {

using namespace sadiff;

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw schema_error("cannot read " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text;
  else
    write_atomic(out_path, text);
}

// Conversion horizon when a delta_nabla document feeds an operation that
// evaluates coefficients up to `needed`.
FSAExpr need_fsa(const OperatorFile& f, std::int64_t needed) {
  if (f.fsa) return *f.fsa;
  if (f.dn) return from_delta_nabla(*f.dn, needed);
  throw precondition_error(
      "this operation requires a formally self-adjoint operator document");
}

std::uint64_t resolve_seed(std::uint64_t cli_seed) {
  if (const char* env = std::getenv("SADIFF_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw schema_error("SADIFF_SEED must be an unsigned integer");
    return v;
  }
  return cli_seed;
}

double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

ComplexScalar random_unit_square(std::mt19937_64& g) {
  return {2.0 * uniform01(g) - 1.0, 2.0 * uniform01(g) - 1.0};
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int cmd_check(const OperatorFile& f, std::int64_t probe) {
  if (f.dn) {
    std::cout << "form: delta_nabla, order " << 2 * f.dn->n << " (n = " << f.dn->n << ")\n"
              << "formally self-adjoint: yes (real delta/nabla expressions are by construction)\n";
    return 0;
  }
  const ShiftExpr& L = *f.shift;
  if (L.order() % 2 != 0) throw precondition_error("order must be even");
  const SelfAdjointReport rep = is_formally_self_adjoint(L, probe);
  std::cout << "form: shift, forward span " << L.k << ", backward span " << L.s
            << ", order " << L.order() << "\n"
            << "formally self-adjoint: " << (rep.pass ? "yes" : "no") << "\n";
  if (!rep.pass) std::cout << "reason: " << rep.reason << "\n";
  return rep.pass ? 0 : 1;
}

int cmd_adjoint(const OperatorFile& f, const std::string& out) {
  if (!f.shift)
    throw precondition_error("adjoint requires a shift-form document (convert first)");
  emit(out, write_operator_file(formal_adjoint(*f.shift), f.weight));
  return 0;
}

int cmd_convert(const OperatorFile& f, std::int64_t horizon, const std::string& out) {
  if (!f.dn) throw precondition_error("convert requires a delta_nabla document");
  emit(out, write_operator_file(from_delta_nabla(*f.dn, horizon), f.weight));
  return 0;
}

InitTriangle parse_triangle_file(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(slurp(path));
  } catch (const nlohmann::json::exception& e) {
    throw schema_error(path + ": malformed JSON: " + e.what());
  }
  if (!doc.is_array()) throw schema_error(path + ": must be an array of rows");
  InitTriangle tri;
  for (const auto& row : doc) {
    if (!row.is_array()) throw schema_error(path + ": each row must be an array");
    std::vector<ComplexScalar> r;
    for (const auto& v : row) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw schema_error(path + ": entries must be [re, im] pairs");
      r.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    tri.push_back(std::move(r));
  }
  return tri;
}

int cmd_factorize(const OperatorFile& f, std::int64_t horizon, const std::string& triangle_path,
                  const std::string& out) {
  const FSAExpr l = need_fsa(f, horizon + 2 * (f.dn ? f.dn->n : 1) + 2);
  Factorization fact = triangle_path.empty()
                           ? factorize(l, horizon)
                           : factorize(l, horizon, parse_triangle_file(triangle_path));
  const std::int64_t window = std::max<std::int64_t>(horizon - l.n, 0);
  const FactorizationCheck chk = verify_factorization(l, fact, window);
  emit(out, write_factorization_json(fact, chk));
  return chk.pass ? 0 : 5;
}

ComplexScalar parse_lambda(const std::string& s) {
  double re = 0.0, im = 0.0;
  char tail = 0;
  if (std::sscanf(s.c_str(), " %lf , %lf %c", &re, &im, &tail) != 2)
    throw schema_error("--lambda must be RE,IM");
  return {re, im};
}

int cmd_solve(const OperatorFile& f, const std::string& lambda_str, std::int64_t steps,
              int renorm, const std::string& out) {
  const FSAExpr l = need_fsa(f, steps + 2 * (f.dn ? f.dn->n : 1) + 2);
  const SpectralProblem p{l, f.weight, parse_lambda(lambda_str)};
  const SolutionBasis basis = solution_basis(p, steps, renorm);
  std::ostringstream os;
  write_solution_csv(os, basis);
  emit(out, os.str());
  return 0;
}

int cmd_deficiency(const OperatorFile& f, const ReportParams& rp, const std::string& out,
                   const std::string& diag_plus, const std::string& diag_minus) {
  const FSAExpr l = need_fsa(f, rp.est.T_max + 2 * (f.dn ? f.dn->n : 1) + 2);
  const DeficiencyReport rep = deficiency_report(l, f.weight, rp);
  emit(out, write_deficiency_json(rep));
  if (!diag_plus.empty()) {
    std::ostringstream os;
    write_deficiency_csv(os, rep.plus.estimate.diag);
    write_atomic(diag_plus, os.str());
  }
  if (!diag_minus.empty()) {
    std::ostringstream os;
    write_deficiency_csv(os, rep.minus.estimate.diag);
    write_atomic(diag_minus, os.str());
  }
  if (!rep.plus.determinate || !rep.minus.determinate) return 4;
  return rep.plus.count == rep.minus.count ? 0 : 5;
}

int cmd_green(const OperatorFile& f, std::int64_t trials, std::uint64_t seed, double tol) {
  const ForwardExpr fe = forward_view(f);
  const int n = fe.n;
  std::mt19937_64 rng(seed);
  double max_rel = 0.0;
  std::int64_t worst_trial = -1;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    const std::int64_t k = static_cast<std::int64_t>(uniform01(rng) * 8.0);
    const std::int64_t r = k + static_cast<std::int64_t>(uniform01(rng) * 16.0);
    const std::int64_t lo = k - n - 1;
    const std::int64_t len = (r + n + 1) - lo + 1;
    std::vector<ComplexScalar> xv, yv;
    for (std::int64_t i = 0; i < len; ++i) xv.push_back(random_unit_square(rng));
    for (std::int64_t i = 0; i < len; ++i) yv.push_back(random_unit_square(rng));
    const CoeffSeq x = compact_seq(lo, std::move(xv));
    const CoeffSeq y = compact_seq(lo, std::move(yv));

    const ComplexScalar defect = green_defect(fe, x, y, k, r);
    double scale = 1.0;
    for (std::int64_t t = k; t <= r; ++t) {
      scale += std::abs(std::conj(eval(y, t)) * apply_forward(fe, x, t));
      scale += std::abs(std::conj(apply_forward_adjoint(fe, y, t)) * eval(x, t));
    }
    scale += std::abs(sesquilinear_s(fe, x, y, r + 1));
    scale += std::abs(sesquilinear_s(fe, x, y, k));
    const double rel = std::abs(defect) / scale;
    if (rel > max_rel) {
      max_rel = rel;
      worst_trial = trial;
    }
  }
  const bool pass = max_rel <= tol;
  std::cout << "trials: " << trials << "\nseed: " << seed
            << "\nmax_relative_residual: " << fmt17(max_rel)
            << "\nworst_trial: " << worst_trial << "\ntolerance: " << fmt17(tol)
            << "\nverdict: " << (pass ? "pass" : "fail") << "\n";
  return pass ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-adjoint difference expression toolkit"};
  app.require_subcommand(1);

  std::string file, out, triangle_path, lambda_str, diag_plus, diag_minus;
  std::int64_t probe = 64, horizon = 64, steps = 256, trials = 200, tmax = 8192;
  int renorm = 32;
  std::uint64_t seed = 0;
  double eps = 0.05, gap = 1e3, root_margin = 1e-6, green_tol = 1e-9;
  bool serial = false;

  auto* check = app.add_subcommand("check", "self-adjointness report");
  check->add_option("file", file)->required();
  check->add_option("--probe", probe, "probe horizon for coefficient comparison");

  auto* adjoint = app.add_subcommand("adjoint", "emit the formal adjoint as a document");
  adjoint->add_option("file", file)->required();
  adjoint->add_option("-o,--output", out);

  auto* convert = app.add_subcommand("convert", "convert delta_nabla form to shift form");
  convert->add_option("file", file)->required();
  convert->add_option("--horizon", horizon, "tabulation horizon");
  convert->add_option("-o,--output", out);

  auto* factorize_cmd = app.add_subcommand("factorize", "quasi-difference factorization");
  factorize_cmd->add_option("file", file)->required();
  factorize_cmd->add_option("--horizon", horizon)->required();
  factorize_cmd->add_option("--triangle", triangle_path, "initial-data triangle JSON");
  factorize_cmd->add_option("-o,--output", out);

  auto* solve = app.add_subcommand("solve", "propagate a full solution basis");
  solve->add_option("file", file)->required();
  solve->add_option("--lambda", lambda_str, "spectral parameter RE,IM")->required();
  solve->add_option("--steps", steps)->required();
  solve->add_option("--renorm", renorm, "renormalization cadence");
  solve->add_option("-o,--output", out);

  auto* deficiency = app.add_subcommand("deficiency", "square-summable solution counts");
  deficiency->add_option("file", file)->required();
  deficiency->add_option("--tmax", tmax, "propagation horizon");
  deficiency->add_option("--eps", eps, "stabilization threshold");
  deficiency->add_option("--gap", gap, "growth factor for the unbounded gate");
  deficiency->add_option("--renorm", renorm, "renormalization cadence");
  deficiency->add_option("--root-margin", root_margin, "unit-circle margin for the oracle");
  deficiency->add_flag("--serial", serial, "run the two branches sequentially");
  deficiency->add_option("-o,--output", out);
  deficiency->add_option("--diag-plus", diag_plus, "diagnostics CSV for lambda = +i");
  deficiency->add_option("--diag-minus", diag_minus, "diagnostics CSV for lambda = -i");

  auto* green = app.add_subcommand("green", "summation-by-parts property suite");
  green->add_option("file", file)->required();
  green->add_option("--trials", trials);
  green->add_option("--seed", seed);
  green->add_option("--tolerance", green_tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const OperatorFile opfile = parse_operator_file(slurp(file));
    if (app.got_subcommand(check)) return cmd_check(opfile, probe);
    if (app.got_subcommand(adjoint)) return cmd_adjoint(opfile, out);
    if (app.got_subcommand(convert)) return cmd_convert(opfile, horizon, out);
    if (app.got_subcommand(factorize_cmd))
      return cmd_factorize(opfile, horizon, triangle_path, out);
    if (app.got_subcommand(solve)) return cmd_solve(opfile, lambda_str, steps, renorm, out);
    if (app.got_subcommand(deficiency)) {
      ReportParams rp;
      rp.est.T_max = tmax;
      rp.est.eps = eps;
      rp.est.gap_factor = gap;
      rp.est.renorm_every = renorm;
      rp.root_margin = root_margin;
      rp.concurrent = !serial;
      return cmd_deficiency(opfile, rp, out, diag_plus, diag_minus);
    }
    if (app.got_subcommand(green)) return cmd_green(opfile, trials, resolve_seed(seed), green_tol);
  } catch (const schema_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const precondition_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
