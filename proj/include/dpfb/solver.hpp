#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpfb/ast.hpp"
#include "dpfb/formula.hpp"

namespace dpfb {

struct SolverConfig {
  std::string path = "z3";
  std::vector<std::string> args = {"-in"};
  int timeout_ms = 3000;
};

enum class VerdictKind { Valid, Counterexample, Unknown };

std::string to_string(VerdictKind k);

struct SolverVerdict {
  VerdictKind kind = VerdictKind::Unknown;
  std::optional<Model> model;  // present iff Counterexample
  std::int64_t elapsed_ms = 0;
  std::string diagnostic;      // why the verdict is Unknown
};

/// SMT-LIB rendering of a formula. Every symbol (scalar variable or array
/// access, keyed by its C rendering) is an Int; booleans are 0/1 when used as
/// values. C division truncates toward zero and x / 0 = 0.
struct SmtScript {
  std::string logic;                  // QF_LIA or QF_NIA
  std::vector<std::string> symbols;   // model keys, sorted
  std::string declarations;
  std::string formula;                // boolean term
};

SmtScript to_smt(const ExprPtr& f);
/// `|name|` quoting for a model key.
std::string smt_symbol(const std::string& key);

/// Runs one solver process per query.
class Solver {
public:
  explicit Solver(SolverConfig config = {});

  const SolverConfig& config() const { return config_; }

  /// Valid iff the negation of `f` is unsatisfiable. A countermodel is only
  /// surfaced after `f` evaluates to false under it.
  SolverVerdict check_validity(const ExprPtr& f) const;
  /// Valid verdict shorthand; Unknown counts as false.
  bool is_valid(const ExprPtr& f) const;

  /// Equivalent (under `context`) formula with no more AST nodes: constant
  /// folding, duplicate removal, and removal of conjuncts implied by the rest
  /// of the conjunction or by the context alone. Returns `f` on any failure.
  ExprPtr simplify(const ExprPtr& f, const ExprPtr& context = nullptr) const;

  /// Number of solver processes started by this instance.
  std::int64_t queries() const;

private:
  SolverConfig config_;
  mutable std::atomic<std::int64_t> queries_{0};
};

struct ProcessResult {
  bool started = false;
  bool timed_out = false;
  int exit_status = -1;
  std::string output;  // stdout and stderr interleaved
};

/// Spawn `path args...`, write `input` to its stdin, collect output until it
/// exits or `timeout_ms` passes (then it is killed).
ProcessResult run_process(const std::string& path, const std::vector<std::string>& args,
                          const std::string& input, int timeout_ms);

}  // namespace dpfb
