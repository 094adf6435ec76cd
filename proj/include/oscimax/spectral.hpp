#pragma once

#include <array>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include <json.hpp>

namespace oscimax {

/// Unimodular factor multiplied onto a band's Fourier data.
struct NoTwist {};
/// e^{-i|ξ|^m}, with |ξ| the Euclidean norm in dimension 2.
struct NegativeDispersion {
  double m = 2.0;
};
/// e^{i c (ξ₁ + … + ξ_d)}.
struct LinearTwist {
  double c = 0.0;
};
using PhaseTwist = std::variant<NoTwist, NegativeDispersion, LinearTwist>;

/// A frequency band with constant amplitude. In dimension 1 only axis 0 is
/// used; in dimension 2 the band is the rectangle [lo₀,hi₀]×[lo₁,hi₁].
struct Band {
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
  double amplitude = 1.0;
  PhaseTwist phase = NoTwist{};

  static Band interval(double lo, double hi, double amplitude = 1.0, PhaseTwist phase = NoTwist{}) {
    return Band{{lo, 0.0}, {hi, 0.0}, amplitude, phase};
  }
  static Band rectangle(std::array<double, 2> lo, std::array<double, 2> hi, double amplitude = 1.0,
                        PhaseTwist phase = NoTwist{}) {
    return Band{lo, hi, amplitude, phase};
  }
};

/// Lebesgue measure of the band support in the given dimension.
double band_measure(const Band& band, int dimension) noexcept;

/// Piecewise-constant-amplitude Fourier data f̂. Immutable; copies share storage.
class SpectralProfile {
 public:
  SpectralProfile() = default;

  int dimension() const noexcept { return dimension_; }
  std::span<const Band> bands() const noexcept {
    return bands_ ? std::span<const Band>(*bands_) : std::span<const Band>();
  }

  /// Σ amplitude·|band|, i.e. ∫|f̂|.
  double total_mass() const noexcept;
  /// Largest |ξ| over all band supports.
  double max_frequency() const noexcept;
  /// Same bands with every amplitude multiplied by a ≥ 0.
  SpectralProfile scaled(double a) const;

  friend SpectralProfile make_profile(int dimension, std::vector<Band> bands);

 private:
  int dimension_ = 1;
  std::shared_ptr<const std::vector<Band>> bands_;
};

/// Validates and builds a profile. Throws EmptyProfile, InvertedInterval,
/// OverlappingBands, or InvalidProfile (bad dimension, amplitude, or twist exponent).
SpectralProfile make_profile(int dimension, std::vector<Band> bands);

/// ‖f‖_{H^s} = (2π)^{-d/2} (∫ (1+|ξ|²)^s |f̂(ξ)|² dξ)^{1/2}.
double sobolev_norm(const SpectralProfile& profile, double s);

SpectralProfile profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const SpectralProfile& profile);

}  // namespace oscimax
