#pragma once

#include <stdexcept>
#include <string>

namespace normdyn {

// Incompatible matrix/vector dimensions.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value outside the documented domain of an operation (e.g. B <= 1 for
// the chicken family, a distribution that does not sum to one).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure at run time: eigensolver non-convergence, a trajectory
// leaving the simplex, IO.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace normdyn
