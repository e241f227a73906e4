#pragma once

#include <stdexcept>
#include <string>

namespace alcnn {

// Base for every error thrown by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed arguments outside an operation's documented domain.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Input file or document does not match its schema.
class DataError : public Error {
 public:
  using Error::Error;
};

// Not enough observations to compute a statistic (e.g. < 2 days).
class InsufficientData : public Error {
 public:
  using Error::Error;
};

// A NaN/Inf surfaced where finite values are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

[[noreturn]] void throw_invalid(const std::string& what);

}  // namespace alcnn
