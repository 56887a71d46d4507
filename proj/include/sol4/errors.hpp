#pragma once

#include <stdexcept>
#include <string>

namespace sol4 {

/// Coordinates outside the representable range, or a non-finite intermediate.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A documented precondition was not met by the caller.
class ContractViolation : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The immersion differential lost rank at a sampled parameter point.
class DegeneratePatch : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input lies outside the hypotheses of the classification
/// (non-constant angle functions c or d).
class NotInScope : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The case split could not be decided at double precision.
class AmbiguousCase : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A candidate family was selected but the fitted residual is too large.
class NoMatch : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical integration produced a non-finite state.
class IntegrationFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace sol4
