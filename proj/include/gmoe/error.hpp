#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gmoe {

enum class ErrorKind {
  DegenerateState,
  InvalidState,
  InvalidDistribution,
  NotCompletelyPositive,
  InvalidParameter,
  TruncationError,
  InconclusiveTruncation,
  PreconditionViolated,
  ProtocolInconsistent,
};

std::string_view to_string(ErrorKind kind);

/// Base error for every failure raised by the library. The kind drives the
/// CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a caller-supplied truncation is too small for the requested
/// accuracy. Carries the dimension that would have been sufficient.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, std::size_t required_dim)
      : Error(ErrorKind::TruncationError, what), required_dim_(required_dim) {}

  std::size_t required_dim() const noexcept { return required_dim_; }

 private:
  std::size_t required_dim_;
};

}  // namespace gmoe
