#pragma once

#include <stdexcept>
#include <string>

namespace maxaffine {

/// Malformed inputs: dimension mismatches, empty datasets, invalid configs.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A closed-form expression was evaluated outside its domain
/// (e.g. a logarithm argument at or below 1, a non-convergent fixed point).
struct FormulaDomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Raised when an initializer cannot produce a usable starting point,
/// e.g. the sample covariance has rank below the number of affine pieces.
struct InitializationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace maxaffine
