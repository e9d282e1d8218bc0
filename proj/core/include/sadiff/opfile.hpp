#pragma once

// JSON operator definition files and report serialization. Documents carry a
// form tag ("shift" or "delta_nabla"), named coefficient specs, and a weight;
// complex values are [re, im] pairs. All emitted numerics use 17 significant
// digits and a stable key order, so identical inputs give identical bytes.

#include <cstdint>
#include <optional>
#include <string>

#include "sadiff/coeff_seq.hpp"
#include "sadiff/deficiency.hpp"
#include "sadiff/expr.hpp"
#include "sadiff/factor.hpp"
#include "sadiff/green.hpp"

namespace sadiff {

/// Parsed operator definition. For shift documents `shift` always holds the
/// general two-sided form; `fsa` is engaged when the layout is self-adjoint
/// (conjugate backward part, real A_0, nonvanishing A_n). For delta_nabla
/// documents only `dn` is engaged; conversion to shift form happens at the
/// horizon the consumer needs.
struct OperatorFile {
  std::optional<ShiftExpr> shift;
  std::optional<FSAExpr> fsa;
  std::optional<DeltaNablaExpr> dn;
  CoeffSeq weight;
};

/// Parse and validate a JSON operator document. Throws schema_error naming
/// the offending field and the violated constraint.
OperatorFile parse_operator_file(const std::string& text);

/// Forward-expression view of a shift document without a backward part.
/// Throws precondition_error when the document has one.
ForwardExpr forward_view(const OperatorFile& f);

/// Single coefficient spec as a JSON value (shared by files and reports).
std::string coeff_spec_json(const CoeffSeq& f);

// Canonical operator documents.
std::string write_operator_file(const ShiftExpr& L, const CoeffSeq& weight);
std::string write_operator_file(const FSAExpr& L, const CoeffSeq& weight);

// Reports. Each carries the full parameter set of the run that produced it.
std::string write_deficiency_json(const DeficiencyReport& rep);
std::string write_factorization_json(const Factorization& f, const FactorizationCheck& chk);

/// Write text to path atomically: temp file in the same directory + rename.
void write_atomic(const std::string& path, const std::string& text);

}  // namespace sadiff
