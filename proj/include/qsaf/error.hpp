#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsaf {

enum class ErrorKind {
  kInvalidDigit,
  kOutOfDomain,
  kAlphabetMismatch,
  kInsufficientDepth,
  kInvalidParameters,
  kNonConvergence,
  kHypothesisViolated,
  kConditionsNotMet,
  kPreconditionViolated,
  kInvariantViolated,
  kIo,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so that front ends can
// map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qsaf
