#pragma once

#include <stdexcept>
#include <string>

namespace bcw {

/// Requested accuracy cannot be represented at the given Fock truncation.
class truncation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix or moment data violates a physicality constraint
/// (non-hermitian, negative eigenvalue, symplectic eigenvalue below 1/2, ...).
class unphysical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scalar summaries contradict each other, e.g. an environment entropy
/// exceeding the maximum-entropy value g(N_E) for its photon number.
class consistency_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical quadrature grid fails to cover the requested mass fraction.
class coverage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bcw
