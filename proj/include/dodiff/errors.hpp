#pragma once

#include <stdexcept>
#include <string>

namespace dodiff {

/// Argument outside the mathematical domain of an operation (a point on the
/// branch cut, an order outside (0,1], a negative radius, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input object violates a structural invariant (ellipticity, weight
/// concentration certificate, mismatched grids).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not meet its accuracy certificate.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dodiff
