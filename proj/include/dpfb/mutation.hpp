#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dpfb {

enum class MutationKind {
  WrongGuard,
  IndexOffByOne,
  MissingCase,
  WrongLoopBound,
  HardcodedDimension,
  SpuriousInit,
  WrongOutputBound,
};

inline constexpr MutationKind kAllMutationKinds[] = {
    MutationKind::WrongGuard,         MutationKind::IndexOffByOne, MutationKind::MissingCase,
    MutationKind::WrongLoopBound,     MutationKind::HardcodedDimension, MutationKind::SpuriousInit,
    MutationKind::WrongOutputBound,
};

std::string to_string(MutationKind k);

struct Mutant {
  std::string id;  // "<base>-<kind>-<site>"
  MutationKind kind = MutationKind::WrongGuard;
  std::string description;
  std::string source;
};

/// Every single-site mutant of a correct solution, in a fixed order. Mutants
/// are written over the normalized program (testcase loop removed,
/// preprocessing applied). Throws when the solution itself cannot be analyzed.
std::vector<Mutant> generate_mutants(std::string_view source, const std::string& base_id);

/// Mutants of one kind only.
std::vector<Mutant> generate_mutants(std::string_view source, const std::string& base_id, MutationKind kind);

/// Literal used for hardcoded dimensions.
inline constexpr int kHardcodedDimension = 101;

}  // namespace dpfb
