#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dpfb {

enum class ErrorKind {
  SyntaxError,
  TypeError,
  UnsupportedConstruct,
  RecursionUnsupported,
  NoDpArray,
  LabelConflict,
  LabelIncomplete,
  FeatureExtractionFailed,
  ReferenceClusterMismatch,
  CanonicalizationFailed,
  NoCorrespondence,
  EncodingFailed,
  UnlabeledSubmission,
  NoMatchingGuard,
  SolverCrashed,
  InvalidInput,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the whole pipeline; `kind` is what callers branch on.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message, int line = 0, int column = 0);

  ErrorKind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

private:
  ErrorKind kind_;
  int line_;
  int column_;
  std::string detail_;
};

}  // namespace dpfb
