#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "oscimax/spectral.hpp"

namespace oscimax {

using Point = std::array<double, 2>;

/// coef·|ξ|^exponent, exponent > 1.
struct PowerTerm {
  double coef = 0.0;
  double exponent = 2.0;
};

/// Real phase Φ(ξ) = linear·ξ + Σ coef_k |ξ|^{e_k}. Terms with equal exponents are
/// merged, so t|ξ|^m combined with a negative-dispersion twist e^{-i|ξ|^m}
/// collapses to (t−1)|ξ|^m and the panel rule sees the cancellation.
struct PhaseModel {
  int dimension = 1;
  Point linear{0.0, 0.0};
  std::array<PowerTerm, 2> radial{};
  int radial_count = 0;

  void add_linear(const Point& b) noexcept;
  void add_power(double coef, double exponent) noexcept;

  double value(double xi) const noexcept;
  double value(const Point& xi) const noexcept;
  /// dΦ/dξ in dimension 1.
  double derivative(double xi) const noexcept;
  /// ∂Φ/∂ξ_axis in dimension 2.
  double partial(const Point& xi, int axis) const noexcept;
  /// Σ |coef_k| e_k ρ^{e_k−1}, an upper bound for the radial part of |∇Φ| at |ξ| ≤ ρ.
  double radial_slope_bound(double rho) const noexcept;
  /// True when every radial coefficient has the same sign (Φ′ monotone on half-lines).
  bool radial_single_signed() const noexcept;
  /// Same model with every coefficient negated.
  PhaseModel negated() const noexcept;
};

/// Total phase of one band: x·ξ + t|ξ|^m + twist(ξ).
PhaseModel band_phase(const Band& band, int dimension, const Point& position, double t, double m);

struct EvalRequest {
  SpectralProfile profile;
  double m = 2.0;
  Point position{0.0, 0.0};
  double t = 0.0;
  double rel_tol = 1e-10;
  std::size_t panel_budget = std::size_t{1} << 22;
  /// Dimension-2 requests with frequencies beyond 2^8 need this override.
  bool allow_large_2d = false;
};

inline constexpr double kDefault2dFrequencyCap = 256.0;

/// S_t^m f(x) = (2π)^{-d} ∫ e^{i(x·ξ + t|ξ|^m)} f̂(ξ) dξ by phase-panel Gauss–Legendre.
/// Panels keep the phase variation ≤ π/2 and are bisected globally until the
/// change is below rel_tol·max(|S|, (2π)^{-d}∫|f̂|). Throws InvalidRequest or
/// ToleranceNotReached.
std::complex<double> evaluate(const EvalRequest& req);

/// Midpoint Riemann sum with N nodes per band per axis, summed in ascending node order.
std::complex<double> evaluate_oracle(const EvalRequest& req, std::size_t nodes);

/// sup over the band support of |Φ(ξ)| from panel endpoints and interior critical points.
double phase_bound(const EvalRequest& req);

/// Rigorous upper bound for |evaluate(req)|: per band the smaller of amplitude·|band|
/// and the first-derivative (monotone Φ′) bound 2·amplitude/min|Φ′|.
double magnitude_upper_bound(const EvalRequest& req);

/// Unit-amplitude band integrals (2π)^{-1}∫_band e^{iΦ}, one per band, each with its own
/// stopping rule. Dimension 1 only; amplitudes of the request profile are ignored.
std::vector<std::complex<double>> evaluate_bands(const EvalRequest& req);

/// Unit-amplitude counterpart of magnitude_upper_bound, one entry per band.
std::vector<double> band_bounds(const EvalRequest& req);

/// (2π)^{-d} Σ amplitude·|band|.
double magnitude_trivial_bound(const SpectralProfile& profile);

/// One interval of the generic oscillatory engine: amplitude·∫_lo^hi w(ξ) e^{iΦ(ξ)} dξ.
/// An empty weight means w ≡ 1.
struct OscillatorySegment {
  PhaseModel phase;
  double lo = 0.0;
  double hi = 0.0;
  double amplitude = 1.0;
  std::function<double(double)> weight;
  /// Optional cap on panel width, for weights that need resolution of their own.
  double max_panel_width = 0.0;
};

/// Sum of the segment integrals with the global bisection stopping rule.
std::complex<double> integrate_oscillatory(std::span<const OscillatorySegment> segments, double rel_tol,
                                           std::size_t panel_budget);

}  // namespace oscimax
