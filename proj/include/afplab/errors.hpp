#pragma once

#include <stdexcept>
#include <string>

namespace afplab {

/// Base class for all library errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid input: group mismatch, point outside a model, bad weights, ...
struct domain_error : error {
  using error::error;
};

/// A configured resource cap (ball size, schedule index) was exceeded.
struct resource_error : error {
  using error::error;
};

/// Non-finite numerics encountered mid-computation.
struct numeric_error : error {
  using error::error;
};

/// Configuration / schema problems; maps to CLI exit code 2.
struct validation_error : domain_error {
  using domain_error::domain_error;
};

}  // namespace afplab
