#pragma once

#include <stdexcept>
#include <string>

namespace pdh {

/// Invalid grid, mismatched grids, or a band the grid cannot resolve.
class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dyadic block index outside the decomposition range.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Exponent or parameter outside an admissible range.
class RangeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Value outside the domain of a change of variables (e.g. n outside the range of n(rho)).
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, double time = 0.0)
      : std::domain_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two trajectories whose grids or time stamps do not line up.
class AlignmentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyFieldError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller-supplied function violates its contract (e.g. f(0) != 0).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values appeared in the solution.
class BlowupDetected : public std::runtime_error {
 public:
  explicit BlowupDetected(double time)
      : std::runtime_error("non-finite values at t = " + std::to_string(time)),
        time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Malformed or truncated artifact file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace pdh
