#pragma once

#include <stdexcept>
#include <string>

namespace mvf {

/// Raised when an input violates an operation's precondition (shape, range,
/// Hermiticity, bidegree).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Newton failure: singular Jacobian or no convergence within the budget.
class NewtonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tr((omega Id - F)^n) vanishes, so the dHYM phase is undefined.
class DegenerateAngleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The off-diagonal amplitude fit cannot make the Condition-E witness vanish.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ContractError(what);
}

}  // namespace mvf
