#pragma once

#include <stdexcept>
#include <string>

namespace mflab {

// Base of every error raised by the library. The CLI maps the subclasses
// onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition or shape violation on an operation's inputs.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Basis dimension beyond the configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Invalid or unknown configuration content.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Hartree integrator step-size collapse or conservation breach.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

// Lanczos propagator failed to reach its residual tolerance.
class KrylovError : public Error {
 public:
  using Error::Error;
};

// Superposition components are numerically indistinguishable.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

// A numerical invariant (PSD floor, Hermiticity, ...) did not hold.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// fit_rate refuses zero distances: the mean-field approximation is exact.
class ExactRegime : public Error {
 public:
  using Error::Error;
};

}  // namespace mflab
