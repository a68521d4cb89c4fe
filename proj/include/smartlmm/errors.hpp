#pragma once

#include <stdexcept>
#include <string>

namespace smartlmm {

// Bad inputs: malformed files, design/data mismatches, impossible queries.
// The CLI maps these to exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaError : ValidationError {
  using ValidationError::ValidationError;
};

struct InvalidQueryError : ValidationError {
  using ValidationError::ValidationError;
};

struct PositivityError : ValidationError {
  using ValidationError::ValidationError;
};

struct InsufficientDataError : ValidationError {
  using ValidationError::ValidationError;
};

// Numerical failures: rank deficiency, singular systems, non-convergence.
// The CLI maps these to exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IdentifiabilityError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace smartlmm
