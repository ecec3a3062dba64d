#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dpfb/analysis.hpp"
#include "dpfb/correspondence.hpp"
#include "dpfb/encoder.hpp"
#include "dpfb/error.hpp"
#include "dpfb/solver.hpp"

namespace dpfb {

enum class Verdict { VerifiedCorrect, Faulty, Unlabeled };
enum class CorrectionKind {
  Declaration,
  IterationSpace,
  ReplaceStatement,
  GuardSplit,
  TotalSubstitution,
  OutputPattern,
  OutOfBounds,
};

std::string to_string(Verdict v);
std::string to_string(CorrectionKind k);

struct Correction {
  CorrectionKind kind = CorrectionKind::ReplaceStatement;
  std::string component;  // declaration, input, initialization, update, output
  std::string subject;    // declared names ("A and D") or the accessed cell
  ExprPtr guard;          // simplified, candidate names; null when not guarded
  ExprPtr raw_guard;      // before simplification
  std::string suggested;
  std::string replaced;
  int line = 0;           // candidate source line

  /// Text after the item number, e.g. "Under guard j == 0, compute ...".
  std::string text() const;
};

struct QueryRecord {
  std::string name;  // "phi", "psi_1", "psi_2", ..., "bounds"
  VerdictKind verdict = VerdictKind::Valid;
  std::int64_t elapsed_ms = 0;
  bool countermodel_falsifies = true;  // re-evaluated by substitution
  std::string diagnostic;
};

struct PairTrace {
  std::string component;
  std::size_t ref_index = 0, cand_index = 0;
  int ref_line = 0, cand_line = 0;
  std::vector<QueryRecord> queries;
  int refinements = 0;
  bool exited_valid = true;  // the refinement loop ended on a valid Ψ
  bool total_substitution = false;
  bool final_psi_valid = true;
};

struct FeedbackReport {
  std::string submission;
  std::string reference;
  Verdict verdict = Verdict::Unlabeled;
  std::string sigma;
  std::vector<Correction> corrections;
  std::vector<PairTrace> trace;
  std::size_t size_before = 0;  // guard AST nodes before simplification
  std::size_t size_after = 0;
  std::int64_t elapsed_ms = 0;
  std::int64_t solver_queries = 0;
  std::optional<ErrorKind> error_kind;
  std::string error;
  std::vector<std::string> notes;
  std::optional<std::string> repaired_source;  // candidate with all corrections applied
};

struct FeedbackOptions {
  int delta = 10;
  std::vector<ExprPtr> constraints;  // over reference input names
};

/// Declaration corrections: candidate arrays with a hardcoded dimension
/// where the reference's dimension depends on inputs.
std::vector<Correction> check_declarations(const LabeledProgram& ref, const LabeledProgram& cand,
                                           const VariableMap& sigma);

/// Printed values of the Output statements with scan-for-maximum (minimum,
/// sum) loops lifted to `_max(first, last)` (`_min`, `_sum`). Absent when no
/// aggregate is found.
std::optional<std::vector<ExprPtr>> lift_output_pattern(const LabeledProgram& lp);

/// Syntactic comparison of lifted outputs under σ after commutative
/// normalization.
std::vector<Correction> compare_outputs(const std::vector<ExprPtr>& ref_out, const std::vector<ExprPtr>& cand_out,
                                        const VariableMap& sigma);

/// Verify `cand` against `ref` under every variable map and keep the report
/// with the fewest corrections.
FeedbackReport verify_submission(const LabeledProgram& ref, const LabeledProgram& cand, const Solver& solver,
                                 const FeedbackOptions& options);

/// Parse and analyze both sources first; failures give an Unlabeled report.
FeedbackReport verify_sources(std::string_view ref_source, std::string_view cand_source, const Solver& solver,
                              const FeedbackOptions& options);

/// Report of `repaired_source` against the reference (apply-and-recheck).
FeedbackReport recheck(std::string_view ref_source, const FeedbackReport& report, const Solver& solver,
                       const FeedbackOptions& options);

/// Human-readable feedback grouped by component.
std::string render(const FeedbackReport& report);
nlohmann::json to_json(const FeedbackReport& report);

}  // namespace dpfb
