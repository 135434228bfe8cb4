#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace similab {

/// A time-stepper gave up; step() is the index of the failing step.
class IntegrationAbort : public std::runtime_error {
 public:
  IntegrationAbort(const std::string& what, std::size_t step) : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Caller broke a documented precondition that is only checkable at run time.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace similab
