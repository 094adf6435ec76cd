#include "oscimax/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "oscimax/error.hpp"
#include "oscimax/fit.hpp"
#include "oscimax/gauss.hpp"

namespace oscimax {
namespace {

constexpr double kSingularCut = 0.1;

void check_cantor_ratio(double r) {
  if (!(r > 0.0 && r < 0.5)) throw Error(ErrorCode::InvalidParams, "Cantor ratio r must lie in (0, 1/2)");
}

void validate_factor(const DirectionFactor& f) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Singleton>) {
          if (!std::isfinite(v.theta)) throw Error(ErrorCode::InvalidParams, "direction must be finite");
        } else if constexpr (std::is_same_v<T, IntervalDirections>) {
          if (!(v.a <= v.b)) throw Error(ErrorCode::InvertedInterval, "direction interval has a > b");
        } else {
          check_cantor_ratio(v.r);
          if (v.k < 0) throw Error(ErrorCode::InvalidParams, "Cantor generation must be nonnegative");
        }
      },
      f);
}

// ∫_a^b g(x) x^{α−1} dx for 0 ≤ a < b.
double positive_part(const std::function<double(double)>& g, double alpha, double a, double b) {
  if (alpha == 1.0) return integrate_smooth(g, a, b);
  double total = 0.0;
  const double cut = std::min(b, kSingularCut);
  if (a < cut) {
    const double inv = 1.0 / alpha;
    auto smooth = [&](double u) { return g(std::pow(u, inv)) * inv; };
    total += integrate_smooth(smooth, std::pow(a, alpha), std::pow(cut, alpha));
  }
  const double lo = std::max(a, cut);
  if (lo < b) total += integrate_smooth([&](double x) { return g(x) * std::pow(x, alpha - 1.0); }, lo, b);
  return total;
}

double antiderivative(double alpha, double x) {
  const double v = std::pow(std::abs(x), alpha) / alpha;
  return x < 0.0 ? -v : v;
}

void append_factor_samples(const DirectionFactor& f, int interval_samples, std::vector<double>& out) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Singleton>) {
          out.push_back(v.theta);
        } else if constexpr (std::is_same_v<T, IntervalDirections>) {
          const int n = std::max(interval_samples, 1);
          if (n == 1 || v.a == v.b) {
            out.push_back(v.a);
            return;
          }
          for (int i = 0; i < n; ++i) out.push_back(v.a + (v.b - v.a) * i / (n - 1));
        } else {
          const CantorSet set = cantor_intervals(v.r, v.k);
          for (const ClosedInterval& iv : set.intervals()) {
            out.push_back(iv.lo);
            out.push_back(iv.hi);
          }
        }
      },
      f);
}

}  // namespace

void validate_path(const PathSpec& path) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PowerCurve>) {
          if (!(p.kappa > 0.0 && p.kappa <= 1.0)) throw Error(ErrorCode::InvalidParams, "κ must lie in (0, 1]");
        } else if constexpr (std::is_same_v<T, LineField>) {
          if (p.directions.factors.empty() || p.directions.factors.size() > 2)
            throw Error(ErrorCode::MissingDirection, "line field needs one direction factor per dimension");
          for (const auto& f : p.directions.factors) validate_factor(f);
        }
      },
      path);
}

Point path_point(const PathSpec& path, const Point& x, int dimension, double t, const std::optional<Point>& theta) {
  const bool line = std::holds_alternative<LineField>(path);
  if (line && !theta) throw Error(ErrorCode::MissingDirection, "line field path needs a direction θ");
  if (!line && theta) throw Error(ErrorCode::MissingDirection, "θ is only meaningful for a line field");
  Point out = x;
  auto shift = [&](double delta) {
    for (int axis = 0; axis < dimension; ++axis) out[axis] -= delta;
  };
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PowerCurve>) {
          if (!(t >= 0.0)) throw Error(ErrorCode::InvalidTime, "power curve needs t ≥ 0");
          shift(std::pow(t, p.kappa));
        } else if constexpr (std::is_same_v<T, ExpTangential>) {
          if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::InvalidTime, "exponential path needs t in (0, 1)");
          shift(1.0 / std::log(1.0 / t));
        } else if constexpr (std::is_same_v<T, LineField>) {
          for (int axis = 0; axis < dimension; ++axis) out[axis] += t * (*theta)[axis];
        }
      },
      path);
  return out;
}

double CantorSet::piece_length() const noexcept { return std::pow(r_, k_); }

CantorSet cantor_intervals(double r, int k) {
  check_cantor_ratio(r);
  if (k < 0) throw Error(ErrorCode::InvalidParams, "Cantor generation must be nonnegative");
  if (k > kMaxCantorGeneration) throw Error(ErrorCode::TooManyIntervals, "more than 2^24 Cantor intervals");
  std::vector<ClosedInterval> current{{0.0, 1.0}};
  std::vector<ClosedInterval> next;
  double length = 1.0;
  for (int gen = 0; gen < k; ++gen) {
    length *= r;
    next.clear();
    next.reserve(current.size() * 2);
    for (const ClosedInterval& iv : current) {
      next.push_back({iv.lo, iv.lo + length});
      next.push_back({iv.hi - length, iv.hi});
    }
    std::swap(current, next);
  }
  CantorSet set;
  set.r_ = r;
  set.k_ = k;
  set.intervals_ = std::make_shared<const std::vector<ClosedInterval>>(std::move(current));
  return set;
}

double nearest_cantor_endpoint(double y, const CantorSet& set) {
  const auto& ivs = set.intervals();
  const double slack = 1e-12 * set.piece_length();
  auto it = std::upper_bound(ivs.begin(), ivs.end(), y + slack,
                             [](double v, const ClosedInterval& iv) { return v < iv.lo; });
  if (it == ivs.begin()) throw Error(ErrorCode::NotInSet, "point lies outside the Cantor set");
  const ClosedInterval& iv = *std::prev(it);
  if (y > iv.hi + slack) throw Error(ErrorCode::NotInSet, "point lies outside the Cantor set");
  return (y - iv.lo <= iv.hi - y) ? iv.lo : iv.hi;
}

std::size_t box_count(const std::vector<ClosedInterval>& sorted, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidParams, "box size must be positive");
  const double width = delta * (1.0 + 1e-9);
  std::size_t count = 0;
  double covered = -std::numeric_limits<double>::infinity();
  for (const ClosedInterval& iv : sorted) {
    if (iv.hi <= covered) continue;
    const double start = std::max(iv.lo, covered);
    const double n = std::max(1.0, std::ceil((iv.hi - start) / width));
    count += static_cast<std::size_t>(n);
    covered = start + n * width;
  }
  return count;
}

MinkowskiEstimate minkowski_dim_table(double r, int k_max) {
  check_cantor_ratio(r);
  if (k_max < 4) throw Error(ErrorCode::InvalidParams, "k_max must be at least 4");
  const CantorSet set = cantor_intervals(r, k_max);
  MinkowskiEstimate est;
  std::vector<std::pair<double, double>> points;
  for (int j = 1; j <= k_max; ++j) {
    const double delta = std::pow(r, j);
    const std::size_t n = box_count(set.intervals(), delta);
    est.rows.push_back({j, delta, n});
    points.emplace_back(std::log(1.0 / delta), std::log(static_cast<double>(n)));
  }
  est.slope = fit_exponent(points).slope;
  return est;
}

double minkowski_dim_estimate(double r, int k_max) { return minkowski_dim_table(r, k_max).slope; }

void validate_measure(const AlphaMeasure& mu) {
  if (!(mu.alpha > 0.0 && mu.alpha <= 1.0)) throw Error(ErrorCode::InvalidParams, "α must lie in (0, 1]");
}

double alpha_measure_of(const AlphaMeasure& mu, double a, double b) {
  validate_measure(mu);
  if (a > b) throw Error(ErrorCode::InvertedInterval, "measure of [a,b] with a > b");
  return antiderivative(mu.alpha, b) - antiderivative(mu.alpha, a);
}

double alpha_measure_integral(const std::function<double(double)>& g, const AlphaMeasure& mu, double a, double b) {
  validate_measure(mu);
  if (a > b) throw Error(ErrorCode::InvertedInterval, "integral over [a,b] with a > b");
  double total = 0.0;
  if (a < 0.0) {
    auto mirrored = [&](double u) { return g(-u); };
    total += positive_part(mirrored, mu.alpha, std::max(-b, 0.0), -a);
  }
  if (b > 0.0) total += positive_part(g, mu.alpha, std::max(a, 0.0), b);
  return total;
}

double frostman_ratio(const AlphaMeasure& mu, const std::vector<BallSample>& samples) {
  validate_measure(mu);
  double best = 0.0;
  for (const BallSample& s : samples) {
    if (!(s.radius > 0.0)) throw Error(ErrorCode::InvalidParams, "ball radius must be positive");
    const double mass = alpha_measure_of(mu, s.x - s.radius, s.x + s.radius);
    best = std::max(best, mass / std::pow(s.radius, mu.alpha));
  }
  return best;
}

std::vector<Point> direction_samples(const DirectionSet& set, int interval_samples) {
  if (set.factors.empty() || set.factors.size() > 2)
    throw Error(ErrorCode::MissingDirection, "direction set needs one or two factors");
  for (const auto& f : set.factors) validate_factor(f);
  std::vector<double> first;
  append_factor_samples(set.factors[0], interval_samples, first);
  std::vector<Point> out;
  if (set.factors.size() == 1) {
    for (double v : first) out.push_back({v, 0.0});
    return out;
  }
  std::vector<double> second;
  append_factor_samples(set.factors[1], interval_samples, second);
  for (double u : first)
    for (double v : second) out.push_back({u, v});
  return out;
}

}  // namespace oscimax
