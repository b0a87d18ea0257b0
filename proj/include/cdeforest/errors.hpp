#pragma once

#include <stdexcept>
#include <string>

namespace cdeforest {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Data cannot be fitted (degenerate responses, too few rows).
class FitError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Model file is unreadable or from an unsupported format version.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace cdeforest
