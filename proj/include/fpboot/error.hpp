#pragma once

#include <stdexcept>
#include <string>

namespace fpboot {

// Precondition violated by the caller (bad n, empty input, level outside (0,1), ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The bootstrap distribution cannot support the requested interval
// (BCa bias fraction at 0 or 1, too many zero-variance bootstrap-t replicates).
class DegenerateDistribution : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input whose values break a domain invariant (negative ncs, n > N in a config).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fpboot
