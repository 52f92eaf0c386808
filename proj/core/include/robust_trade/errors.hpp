#pragma once

#include <stdexcept>
#include <string>

namespace robust_trade {

/// Malformed input: bad marginal specs, inconsistent masses, bad configs.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation's precondition does not hold for the given arguments.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A numerical cross-check between two independent routes disagreed.
class NumericalCheckError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace robust_trade
