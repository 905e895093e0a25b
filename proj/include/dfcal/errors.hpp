#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dfcal {

enum class ErrorKind {
  InvalidParameter,
  InvalidInput,
  OutOfDomain,
  DegeneratePartition,
  EmptyBin,
  DegenerateBin,
  BoundsViolation,
  Numeric,
};

const char* to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind lets
/// callers (the CLI in particular) distinguish validation problems from
/// numerical breakdowns without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  bool is_numeric() const noexcept { return kind_ == ErrorKind::Numeric; }

 private:
  ErrorKind kind_;
};

/// Raised when a prediction or interval is requested for a bin that received
/// no calibration points.
class EmptyBinError : public Error {
 public:
  explicit EmptyBinError(std::size_t bin);

  std::size_t bin() const noexcept { return bin_; }

 private:
  std::size_t bin_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace dfcal
