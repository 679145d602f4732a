#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace metapop {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (k <= 0, negative state, bad range).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Parameter construction failed; carries every violated invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class InadmissibleArcsError : public Error {
 public:
  using Error::Error;
};

class UnknownTopologyError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

class SingularJacobianError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The coexistence construction found no sign change of its scalar function.
class BracketFailureError : public Error {
 public:
  using Error::Error;
};

/// A feasible closed-form equilibrium was not reproduced by the numerical search.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class StaleEquilibriumError : public Error {
 public:
  using Error::Error;
};

class StepUnderflowError : public Error {
 public:
  using Error::Error;
};

/// Malformed or incomplete run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace metapop
