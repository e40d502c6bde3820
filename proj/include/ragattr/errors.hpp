#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ragattr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Index, size, or player count outside the supported range.
class BoundsError : public Error {
 public:
  using Error::Error;
};

// Invalid settings, unknown method/template names, malformed configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input files. `line` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Remote endpoint unreachable or answered with a server error. Retryable.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Remote endpoint cannot provide what the oracle needs (e.g. per-token logprobs). Fatal.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class InputTooLongError : public Error {
 public:
  using Error::Error;
};

// Correlation of a constant (all-tied) input.
class UndefinedCorrelation : public Error {
 public:
  using Error::Error;
};

class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

// Normal equations are singular; carries the columns found to be linearly
// dependent on earlier ones.
class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, std::vector<std::size_t> columns)
      : Error(what), columns_(std::move(columns)) {}
  const std::vector<std::size_t>& deficient_columns() const { return columns_; }

 private:
  std::vector<std::size_t> columns_;
};

}  // namespace ragattr
