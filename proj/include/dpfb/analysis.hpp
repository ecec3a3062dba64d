#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dpfb/ast.hpp"
#include "dpfb/frontend.hpp"

namespace dpfb {

enum class Label { Input, Init, Update, Output };

std::string to_string(Label l);

struct GuardedExpr {
  ExprPtr guard;
  ExprPtr expr;
};

using GuardedSet = std::vector<GuardedExpr>;

/// One guarded variant of an assignment with temporaries eliminated.
struct GuardedAssign {
  ExprPtr guard;
  ExprPtr lhs;
  ExprPtr rhs;
};

/// Σ: values of temporaries at each use, expressed over DP variables.
struct SubstitutionStore {
  std::map<std::pair<int, std::string>, GuardedSet> entries;  // (location ordinal, temporary)
  /// Assignments of `main` lifted through Σ, by location. Absent when a
  /// temporary in the statement could not be eliminated.
  std::map<int, std::vector<GuardedAssign>> assignments;
  /// If/loop conditions of `main` lifted to a single formula, by location.
  std::map<int, ExprPtr> conditions;
  /// Scalars treated as DP variables while the store was built.
  std::set<std::string> dp_scalars;

  const GuardedSet* find(int ordinal, const std::string& var) const;
};

inline constexpr std::size_t kMaxGuardedVariants = 64;

struct InputVar {
  std::string name;
  ScalarType type = ScalarType::Int;
  std::size_t rank = 0;

  friend bool operator==(const InputVar&, const InputVar&) = default;
};

struct LabeledProgram {
  Program program;
  SymbolTable symbols;                // of main
  std::vector<std::string> dp_arrays;  // canonical order: first updating location
  std::vector<InputVar> inputs;        // read order
  std::set<std::string> loop_indices;
  std::map<int, Label> labels;         // by location ordinal
  SubstitutionStore store;

  bool is_input(const std::string& name) const;
  bool is_dp_array(const std::string& name) const;
  std::optional<Label> label_of(const Stmt& s) const;
};

/// Scalars satisfying: initialized (not by scanf) before the loop, updated in
/// the loop, used in its guard. Covers every function.
std::set<std::string> identify_loop_indices(const Program& p);

/// Input variables of `main` in order of their first read.
std::vector<InputVar> identify_inputs(const Program& p);

/// Forward symbolic execution of `main`; calls are inlined. Throws
/// RecursionUnsupported on a cyclic call graph.
SubstitutionStore compute_substitution_store(const Program& p);

/// Arrays appearing on both sides of an assignment after substitution, in
/// order of first updating location. Throws NoDpArray when empty.
std::vector<std::string> identify_dp_arrays(const Program& p, const SubstitutionStore& s);

/// Throws LabelConflict, LabelIncomplete.
LabeledProgram label_statements(const Program& p, const SubstitutionStore& s);

/// compute_substitution_store + identify_dp_arrays + label_statements.
LabeledProgram analyze(const Program& p);

}  // namespace dpfb
