#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ddks {

enum class ErrorKind {
  DimensionMismatch,
  EmptySample,
  NonFiniteValue,
  DimensionTooLarge,
  OutOfRange,
  GridTooLarge,
  EmptyList,
  DomainError,
  SingularCovariance,
  InsufficientSamples,
  BadSpec,
  IoError,
  ParseError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// All library failures are reported through this exception. The kind is the
// machine-readable part; the message always starts with the kind's name so
// that diagnostics printed from what() can be grepped for it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& detail);

}  // namespace ddks
