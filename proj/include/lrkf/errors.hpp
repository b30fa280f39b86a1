#pragma once

#include <stdexcept>
#include <string>

namespace lrkf {

/// Input violates an operation's precondition (non-Hermitian, bad dims, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix that must be inverted is numerically singular.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, double eigenvalue)
      : std::runtime_error(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// Two algebraically equal routes disagreed beyond tolerance.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem setup that cannot be satisfied (dims, P < 0, empty policy list).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Projection or reconstruction has nothing to work with.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// SDP engine did not reach an optimal point.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lrkf
