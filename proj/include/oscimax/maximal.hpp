#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "oscimax/geometry.hpp"
#include "oscimax/propagator.hpp"
#include "oscimax/spectral.hpp"

namespace oscimax {

/// Interval (dimension 1) or rectangle (dimension 2) of the spatial domain.
struct XCell {
  Point lo{0.0, 0.0};
  Point hi{0.0, 0.0};
};

/// Union of non-overlapping cells, integrated cell by cell in ascending order.
struct XDomain {
  int dimension = 1;
  std::vector<XCell> cells;

  static XDomain interval(double a, double b);
  /// sign·Ω_{k,j} for every interval of the set (sign = −1 gives −𝔠_k(r)).
  static XDomain cantor(const CantorSet& set, double sign = 1.0);
  /// Every cell of `first` times the interval [a,b] on the second axis.
  static XDomain with_second_axis(const XDomain& first, double a, double b);
};

struct TimeWindow {
  double lo = 0.0;
  double hi = 1.0;
};

/// Coarse grid: geometric on [lo,hi] when lo > 0, otherwise a signed geometric
/// grid down to log_floor·max|t| plus t = 0. Refinement subdivides the cell
/// bracketing the running argmax `refine_factor` times, `refine_levels` times.
struct TimeGrid {
  int coarse_size = 64;
  int refine_levels = 2;
  int refine_factor = 8;
  double log_floor = 1e-6;
};

struct MixedNormSpec {
  double q = 2.0;
  AlphaMeasure measure{1.0};
  XDomain x_domain;
  TimeWindow t_window;
  int x_nodes = 4;
  TimeGrid t_grid;
  /// Grid size per interval factor of a line-field direction set.
  int interval_samples = 33;
  double rel_tol = 1e-10;
  std::size_t panel_budget = std::size_t{1} << 22;
  int threads = 1;
};

void validate_spec(const MixedNormSpec& spec);

struct Witness {
  double t = 0.0;
  Point theta{0.0, 0.0};
};
/// Analytic witnesses (t, θ) for a spatial node; always evaluated before the grid.
using WitnessFn = std::function<std::vector<Witness>(const Point& x)>;

struct MaximalProblem {
  SpectralProfile profile;
  double m = 2.0;
  PathSpec path = Vertical{};
  MixedNormSpec spec;
  WitnessFn witness;
  bool allow_large_2d = false;
};

std::vector<double> coarse_time_grid(const TimeWindow& window, const TimeGrid& grid);

/// Grid maximum of |S_t^m f(path(x,t,θ))| over the time grid and the θ sample.
/// A lower bound for the true supremum, nondecreasing under refinement. Grid
/// points whose rigorous magnitude bound cannot beat the running maximum are
/// skipped, which leaves the grid maximum unchanged.
double maximal_in_time(const MaximalProblem& problem, const Point& x);

/// maximal_in_time for profiles that share band supports and twists and differ only in
/// amplitudes; band integrals are computed once per probe point and reused by every member.
std::vector<double> maximal_in_time_family(const MaximalProblem& problem, std::span<const SpectralProfile> family,
                                           const Point& x);

struct NormNode {
  Point x{0.0, 0.0};
  double weight = 0.0;
  double value = 0.0;
};

struct MixedNormResult {
  double norm = 0.0;
  std::vector<NormNode> nodes;
};

/// Nodes and weights of the rule used by mixed_norm_of, values left at zero.
std::vector<NormNode> quadrature_nodes(const XDomain& domain, const AlphaMeasure& measure, int x_nodes);

/// (∫ F(x)^q dμ(x))^{1/q} with x_nodes Gauss–Legendre nodes per cell and axis; for
/// α < 1 the rule acts on u = |x|^α so constant integrands are exact. The power sum
/// is reduced in ascending node order.
MixedNormResult mixed_norm_of(const XDomain& domain, const AlphaMeasure& measure, double q, int x_nodes,
                              const std::function<double(const Point&)>& integrand, int threads);

MixedNormResult mixed_norm_detail(const MaximalProblem& problem);
double mixed_norm(const MaximalProblem& problem);
/// One result per family member; problem.profile is ignored.
std::vector<MixedNormResult> mixed_norm_family(const MaximalProblem& problem, std::span<const SpectralProfile> family);

/// μ(domain) for the measure acting on the first axis (Lebesgue on the second).
double domain_measure(const XDomain& domain, const AlphaMeasure& measure);

}  // namespace oscimax
