#pragma once

#include <span>
#include <utility>

namespace oscimax {

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
};

/// Ordinary least squares on (log λ, log value) pairs.
/// Throws DegenerateAbscissae for fewer than three points or repeated abscissae.
ExponentFit fit_exponent(std::span<const std::pair<double, double>> points);

}  // namespace oscimax
