#pragma once

#include <stdexcept>
#include <string>

namespace qfib {

/// Malformed or out-of-contract input (bad file, asymmetric matrix, bad prime).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A precondition of a mathematical operation does not hold
/// (non-isotropic vector, degenerate section, ...).
class PreconditionError : public std::domain_error {
 public:
  explicit PreconditionError(const std::string& what) : std::domain_error(what) {}
};

/// An enumeration or search exceeded its configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qfib
