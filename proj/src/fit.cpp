#include "oscimax/fit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "oscimax/error.hpp"

namespace oscimax {

ExponentFit fit_exponent(std::span<const std::pair<double, double>> points) {
  const std::size_t n = points.size();
  if (n < 3) throw Error(ErrorCode::DegenerateAbscissae, "at least three points are required");
  std::vector<double> xs;
  xs.reserve(n);
  for (const auto& [x, y] : points) {
    if (!std::isfinite(x) || !std::isfinite(y))
      throw Error(ErrorCode::DegenerateAbscissae, "non-finite point");
    xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  if (std::adjacent_find(xs.begin(), xs.end()) != xs.end())
    throw Error(ErrorCode::DegenerateAbscissae, "repeated abscissa");

  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (const auto& [x, y] : points) {
    const double r = y - (fit.intercept + fit.slope * x);
    ssr += r * r;
  }
  fit.stderr_slope = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  return fit;
}

}  // namespace oscimax
