#pragma once

#include <stdexcept>
#include <string>

namespace crn {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Active-PU degree beyond the enumeration cap of the exact PU message.
struct DegreeTooHigh : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SearchSpaceTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace crn
