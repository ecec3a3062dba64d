#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dpfb/ast.hpp"

namespace dpfb {

enum class ExecStatus { Ok, OutOfBounds, DivByZero, NonTermination };

std::string to_string(ExecStatus s);

struct ExecutionResult {
  std::vector<std::int64_t> outputs;
  ExecStatus status = ExecStatus::Ok;
  std::size_t uninitialized_reads = 0;  // reads of never-written storage (value 0)
  std::size_t exhausted_reads = 0;      // scanf past the end of the input (value 0)
  std::uint64_t steps = 0;

  bool same_behaviour(const ExecutionResult& o) const { return status == o.status && outputs == o.outputs; }
};

/// One scanf target being filled, as seen by an input source.
struct ReadEvent {
  std::string variable;
  bool array_element = false;
  std::size_t position = 0;  // index in the input stream
};

using InputSource = std::function<std::optional<std::int64_t>(const ReadEvent&)>;

inline constexpr std::uint64_t kDefaultStepBudget = 10'000'000;

/// Deterministic big-step evaluation of `main`. Faults are reported through
/// `status`; outputs printed before a fault are kept.
ExecutionResult interpret(const Program& p, const std::vector<std::int64_t>& input,
                          std::uint64_t step_budget = kDefaultStepBudget);
ExecutionResult interpret(const Program& p, const InputSource& input,
                          std::uint64_t step_budget = kDefaultStepBudget);

struct InputProfile {
  std::int64_t scalar_min = 1;
  std::int64_t scalar_max = 6;
  std::int64_t element_min = 0;
  std::int64_t element_max = 9;
  std::vector<ExprPtr> constraints;  // over scalar input names
};

struct GeneratedInput {
  std::vector<std::int64_t> tokens;
  std::vector<ReadEvent> events;
  ExecutionResult result;  // behaviour of the program that drove generation
};

/// Draw a constraint-satisfying input by running `driver` against a random
/// source. Returns nullopt when no valid input was found within the attempts.
/// `size_cap` further limits scalar values (small inputs first).
std::optional<GeneratedInput> generate_input(const Program& driver, const InputProfile& profile,
                                             std::uint64_t seed, std::int64_t size_cap = 0,
                                             int attempts = 64);

struct DifferentialResult {
  bool agree = true;
  std::size_t trials_run = 0;
  std::vector<std::int64_t> witness;  // minimized, when !agree
  ExecutionResult ref_result;
  ExecutionResult cand_result;
};

/// Random differential testing of two programs over the reference's input
/// signature; inputs the reference itself faults on are discarded.
DifferentialResult differential(const Program& ref, const Program& cand, int trials,
                                const InputProfile& profile, std::uint64_t seed = 1);

/// Parse an input-constraint file: one boolean expression per line, blank
/// lines and `#` comments ignored.
std::vector<ExprPtr> parse_constraints(const std::string& text);

}  // namespace dpfb
