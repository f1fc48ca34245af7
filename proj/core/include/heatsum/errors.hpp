#pragma once

#include <stdexcept>
#include <string>

namespace heatsum {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid argument or out-of-domain input.
struct DomainError : Error {
  using Error::Error;
};

// Scenario or grid configuration rejected before any solve. Maps to exit
// code 2 in the CLI.
struct ConfigError : Error {
  using Error::Error;
};

// Numerical failure inside a solve (step control, truncation). Maps to exit
// code 3 in the CLI.
struct SolverError : Error {
  using Error::Error;
};

// The end is neither critical nor subcritical; the two-sided estimates do
// not apply to it.
struct UnsupportedClassError : DomainError {
  using DomainError::DomainError;
};

// The operation is defined for power-law weight profiles only.
struct UnsupportedProfileError : DomainError {
  using DomainError::DomainError;
};

// t at or below the small-time cutoff; short times are out of scope.
struct SmallTimeError : DomainError {
  using DomainError::DomainError;
};

// The requested regime case does not exist for this connected sum.
struct CaseMismatchError : DomainError {
  using DomainError::DomainError;
};

// Degenerate sample set fed to a fit.
struct FitError : Error {
  using Error::Error;
};

}  // namespace heatsum
