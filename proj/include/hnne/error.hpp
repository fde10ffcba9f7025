#pragma once

#include <stdexcept>
#include <string>

namespace hnne {

// Caller passed something structurally wrong (bad k, bad dimension, ...).
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The data itself is unusable (NaN/Inf, malformed file, truncated stream).
struct InvalidData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hnne
