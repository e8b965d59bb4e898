#pragma once

#include <stdexcept>
#include <string>

namespace matchsim {

/// A simulation would exceed a configured resource cap (e.g. the
/// statevector amplitude limit).
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Grover iteration schedule is undefined for an empty marked set.
class ScheduleUndefinedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace matchsim
