#pragma once

#include <stdexcept>
#include <string>

namespace bmg {

/// Invalid user-supplied input: malformed documents, out-of-range parameters,
/// violated model invariants, exceeded caps.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Enumeration or materialization would exceed a configured cap.
class CapExceeded : public InputError {
 public:
  using InputError::InputError;
};

/// Default cap for exhaustive enumerations; BMG_LAB_CAP overrides it.
std::size_t enumeration_cap();

}  // namespace bmg
