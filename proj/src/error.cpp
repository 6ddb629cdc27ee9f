#include "qsaf/error.hpp"

namespace qsaf {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidDigit: return "InvalidDigit";
    case ErrorKind::kOutOfDomain: return "OutOfDomain";
    case ErrorKind::kAlphabetMismatch: return "AlphabetMismatch";
    case ErrorKind::kInsufficientDepth: return "InsufficientDepth";
    case ErrorKind::kInvalidParameters: return "InvalidParameters";
    case ErrorKind::kNonConvergence: return "NonConvergence";
    case ErrorKind::kHypothesisViolated: return "HypothesisViolated";
    case ErrorKind::kConditionsNotMet: return "ConditionsNotMet";
    case ErrorKind::kPreconditionViolated: return "PreconditionViolated";
    case ErrorKind::kInvariantViolated: return "InvariantViolated";
    case ErrorKind::kIo: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind) {}

}  // namespace qsaf
