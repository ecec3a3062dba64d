#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dpfb/analysis.hpp"

namespace dpfb {

/// σ: reference input/DP names to candidate names.
struct VariableMap {
  std::map<std::string, std::string> pairs;

  std::string operator()(const std::string& ref_name) const;
  std::map<std::string, std::string> inverse() const;
  std::string text() const;  // "dp->D, m->A, n->n"

  friend bool operator==(const VariableMap&, const VariableMap&) = default;
};

/// One `for` header of a loop nest.
struct LoopLevel {
  std::string index;
  ExprPtr start;
  ExprPtr cond;
  std::int64_t stride = 1;  // signed step
  StmtPtr header;           // the For statement
};

/// Perfect loop nest view. `levels` is empty for straight-line code; `body`
/// is the innermost body.
struct Nest {
  std::vector<LoopLevel> levels;
  StmtList body;

  std::string directions() const;
};

/// Loop levels down to the first body that is not a single `for`. Returns
/// nullopt when a header is not `v = a; cond; v = v +- c`.
std::optional<Nest> as_nest(const StmtPtr& s);

/// A canonicalized top-level statement.
struct TopLevel {
  StmtPtr stmt;               // loop nest, single statement, or Block
  Label label = Label::Input;
  std::vector<int> origins;   // ordinals of the source top-level statements
  std::set<std::string> targets;  // DP/input variables written
  int depth = 0;
  std::string directions;

  /// Loop nest view of `stmt` (a Block contributes its statements as body).
  Nest nest() const;
};

std::vector<VariableMap> derive_variable_maps(const LabeledProgram& ref, const LabeledProgram& cand);

/// Split heterogeneous loops by label, merge contiguous Input/Init loops over
/// the same array, group straight-line Init statements and all Output
/// statements. Scalar input reads and unlabeled statements are left out.
/// Throws CanonicalizationFailed.
std::vector<TopLevel> canonicalize_loops(const LabeledProgram& lp);

/// `main` with its top-level statements replaced by `list` (each element at
/// the position of its first origin). `overrides` substitutes the statement
/// of an element by index.
Program rebuild(const LabeledProgram& lp, const std::vector<TopLevel>& list,
                const std::map<std::size_t, StmtList>& overrides = {});

struct ControlCorrespondence {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // indices into R and C
};

/// Throws NoCorrespondence naming the first mismatching index.
ControlCorrespondence control_correspondence(const std::vector<TopLevel>& R, const std::vector<TopLevel>& C,
                                             const VariableMap& sigma);

/// σ̂ for one statement pair: σ plus loop indices at equal nesting depth.
VariableMap extend_with_indices(const VariableMap& sigma, const TopLevel& r, const TopLevel& c);

}  // namespace dpfb
