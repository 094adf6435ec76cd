#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "oscimax/propagator.hpp"

namespace oscimax {

struct Singleton {
  double theta = 0.0;
};
struct IntervalDirections {
  double a = 0.0;
  double b = 1.0;
};
struct CantorDirections {
  double r = 1.0 / 3.0;
  int k = 0;
};
using DirectionFactor = std::variant<Singleton, IntervalDirections, CantorDirections>;

/// One factor per dimension; a dimension-2 set is the product of its two factors.
struct DirectionSet {
  std::vector<DirectionFactor> factors;
};

struct Vertical {};
struct PowerCurve {
  double kappa = 1.0;
};
struct ExpTangential {};
struct LineField {
  DirectionSet directions;
};
using PathSpec = std::variant<Vertical, PowerCurve, ExpTangential, LineField>;

void validate_path(const PathSpec& path);

/// x, x − t^κ, x − (log 1/t)^{-1} or x + tθ, componentwise; only the first
/// `dimension` coordinates are meaningful.
Point path_point(const PathSpec& path, const Point& x, int dimension, double t,
                 const std::optional<Point>& theta = std::nullopt);

struct ClosedInterval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const noexcept { return hi - lo; }
};

/// Generation-k pre-Cantor set 𝔠_k(r) ⊂ [0,1].
class CantorSet {
 public:
  double r() const noexcept { return r_; }
  int k() const noexcept { return k_; }
  const std::vector<ClosedInterval>& intervals() const noexcept { return *intervals_; }
  /// r^k.
  double piece_length() const noexcept;

  friend CantorSet cantor_intervals(double r, int k);

 private:
  double r_ = 1.0 / 3.0;
  int k_ = 0;
  std::shared_ptr<const std::vector<ClosedInterval>> intervals_;
};

inline constexpr int kMaxCantorGeneration = 24;

CantorSet cantor_intervals(double r, int k);

/// Nearer endpoint of the interval holding y; midpoints go left. Throws NotInSet.
double nearest_cantor_endpoint(double y, const CantorSet& set);

/// Greedy count of closed intervals of length δ covering a union of sorted intervals.
std::size_t box_count(const std::vector<ClosedInterval>& sorted, double delta);

struct BoxCountRow {
  int j = 0;
  double delta = 0.0;
  std::size_t count = 0;
};

struct MinkowskiEstimate {
  std::vector<BoxCountRow> rows;
  double slope = 0.0;
};

/// N_δ(𝔠_{k_max}(r)) for δ = r^j, j = 1..k_max, and the log-log slope.
MinkowskiEstimate minkowski_dim_table(double r, int k_max);
double minkowski_dim_estimate(double r, int k_max);

/// dμ = |x|^{α−1} dx; α = 1 is Lebesgue measure.
struct AlphaMeasure {
  double alpha = 1.0;
};

void validate_measure(const AlphaMeasure& mu);

/// μ([a,b]) in closed form.
double alpha_measure_of(const AlphaMeasure& mu, double a, double b);

/// ∫_a^b g(x)|x|^{α−1} dx. Near 0 the substitution u = x^α removes the singularity.
double alpha_measure_integral(const std::function<double(double)>& g, const AlphaMeasure& mu, double a,
                              double b);

struct BallSample {
  double x = 0.0;
  double radius = 1.0;
};

/// max μ(B(x,r))/r^α over the samples.
double frostman_ratio(const AlphaMeasure& mu, const std::vector<BallSample>& samples);

/// Finite θ sample of a direction set: 2^{k+1} endpoints for a Cantor factor, an
/// `interval_samples`-point uniform grid for an interval, tensor product in dimension 2.
std::vector<Point> direction_samples(const DirectionSet& set, int interval_samples);

}  // namespace oscimax
