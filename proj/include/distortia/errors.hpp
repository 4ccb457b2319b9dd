#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace distortia {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Bad input: unknown names, violated preconditions, malformed files.
/// CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Computation could not be carried out (quadrature blow-up,
/// non-convergent extrapolation). CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Confidence { analytic, numeric_confident, numeric_borderline };

inline const char* to_string(Confidence c) {
  switch (c) {
    case Confidence::analytic: return "analytic";
    case Confidence::numeric_confident: return "numeric-confident";
    default: return "numeric-borderline";
  }
}

}  // namespace distortia
