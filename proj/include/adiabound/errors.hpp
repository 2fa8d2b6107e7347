#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adiabound {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (range, shape, mismatch).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A requested computation exceeds the supported size (enumeration, dimension).
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. `line()` is 1-based; 0 when no line applies.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An iterative method did not reach its tolerance within its iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The integrator's norm drift exceeded the configured tolerance.
class NormDriftError : public Error {
 public:
  NormDriftError(double drift, double suggested_step, const std::string& what)
      : Error(what), drift_(drift), suggested_step_(suggested_step) {}

  double drift() const noexcept { return drift_; }
  double suggested_step() const noexcept { return suggested_step_; }

 private:
  double drift_;
  double suggested_step_;
};

/// Coherent-state truncation leaves more tail mass than allowed.
class TruncationError : public Error {
 public:
  TruncationError(std::size_t minimal_n_max, const std::string& what)
      : Error(what), minimal_n_max_(minimal_n_max) {}

  std::size_t minimal_n_max() const noexcept { return minimal_n_max_; }

 private:
  std::size_t minimal_n_max_;
};

}  // namespace adiabound
