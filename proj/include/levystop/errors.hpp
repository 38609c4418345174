#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace levystop {

// Error taxonomy, used consistently across the library so the CLI can map
// failures to exit codes:
//   UsageError        bad input (malformed JSON, unknown option value)   -> exit 1
//   DomainError       argument outside a function's mathematical domain  -> exit 2
//   PreconditionError a solver's standing assumption does not hold       -> exit 2
//   NumericalError    internal numerical breakdown (no root, overflow)   -> exit 3

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class PreconditionError : public std::runtime_error {
 public:
  PreconditionError(std::string condition, const std::string& detail)
      : std::runtime_error(detail), condition_(std::move(condition)) {}

  // Machine-readable name of the violated condition, e.g. "q > psi(1)".
  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace levystop
