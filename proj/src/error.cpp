#include "dpfb/error.hpp"

namespace dpfb {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::TypeError: return "TypeError";
    case ErrorKind::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorKind::RecursionUnsupported: return "RecursionUnsupported";
    case ErrorKind::NoDpArray: return "NoDpArray";
    case ErrorKind::LabelConflict: return "LabelConflict";
    case ErrorKind::LabelIncomplete: return "LabelIncomplete";
    case ErrorKind::FeatureExtractionFailed: return "FeatureExtractionFailed";
    case ErrorKind::ReferenceClusterMismatch: return "ReferenceClusterMismatch";
    case ErrorKind::CanonicalizationFailed: return "CanonicalizationFailed";
    case ErrorKind::NoCorrespondence: return "NoCorrespondence";
    case ErrorKind::EncodingFailed: return "EncodingFailed";
    case ErrorKind::UnlabeledSubmission: return "UnlabeledSubmission";
    case ErrorKind::NoMatchingGuard: return "NoMatchingGuard";
    case ErrorKind::SolverCrashed: return "SolverCrashed";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Error";
}

namespace {
std::string compose(ErrorKind kind, const std::string& message, int line, int column) {
  std::string out(to_string(kind));
  if (line > 0) out += " at " + std::to_string(line) + ":" + std::to_string(column);
  out += ": " + message;
  return out;
}
}  // namespace

Error::Error(ErrorKind kind, const std::string& message, int line, int column)
    : std::runtime_error(compose(kind, message, line, column)),
      kind_(kind),
      line_(line),
      column_(column),
      detail_(message) {}

}  // namespace dpfb
