#pragma once

#include <stdexcept>
#include <string>

namespace toric_bayes {

// Process exit codes used by the command-line front end.
enum class ErrorKind : int {
  kParse = 2,
  kCapacity = 3,
  kInconsistent = 4,
  kNumeric = 5,
  kInvalidArgument = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

// Malformed input document, bad value, duplicate cell.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorKind::kParse, what) {}
};

// A configured resource budget was exceeded. Never a silent truncation.
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what)
      : Error(ErrorKind::kCapacity, what) {}
};

// Request involving an instance that is logically inconsistent with the data.
class InconsistentInstanceError : public Error {
 public:
  explicit InconsistentInstanceError(const std::string& what)
      : Error(ErrorKind::kInconsistent, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::kNumeric, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::kInvalidArgument, what) {}
};

}  // namespace toric_bayes
