#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oscimax/maximal.hpp"

namespace oscimax {

enum class ScenarioId {
  TangentialRow1,
  TangentialRow2,
  TangentialRow3,
  ExpTangential,
  FractalLines1D,
  FractalLines2DLow,
  FractalLines2DHigh,
  AlphaFractalRemark,
  SufficiencyProbe,
};

/// CLI names: tangential-row1, …, fractal-lines-2d-high, alpha-fractal-remark, sufficiency-probe.
std::string_view scenario_name(ScenarioId id) noexcept;
ScenarioId parse_scenario(std::string_view name);

/// Direction set used by the one-dimensional line-field scenario: the Cantor set
/// itself, the single direction {0} (β = 0), or the interval [0,1] (β = 1).
enum class DirectionMode { Cantor, Point, Interval };
std::string_view direction_mode_name(DirectionMode mode) noexcept;
DirectionMode parse_direction_mode(std::string_view name);

struct ScenarioParams {
  double m = 2.0;
  double kappa = 1.0;
  double q = 4.0;
  double alpha = 1.0;
  double s = 0.0;
  double r = 0.2;
  int k_min = 3;
  int k_max = 7;
  double c = 0.125;
  DirectionMode directions = DirectionMode::Cantor;
  std::uint64_t seed = 0;
  int trials = 20;
  int x_nodes = 4;
  TimeGrid t_grid;
  int interval_samples = 33;
  int threads = 1;
};

void validate_params(ScenarioId id, const ScenarioParams& params);
nlohmann::json params_to_json(const ScenarioParams& params);
/// Missing keys keep their defaults.
ScenarioParams params_from_json(const nlohmann::json& j);

/// λ of rung k: r^{-k} for the Cantor scenarios, 2^k otherwise.
double ladder_lambda(ScenarioId id, const ScenarioParams& params, int k);

struct ScenarioInstance {
  ScenarioId id = ScenarioId::FractalLines1D;
  int k = 0;
  double lambda = 1.0;
  MaximalProblem problem;
  /// Further profiles probed on the same spatial problem (random trials).
  std::vector<SpectralProfile> trial_profiles;
  /// Largest phase seen by the certificate, when one was run.
  std::optional<double> certified_phase;
  /// cos(1/2)·(2π)^{-d}·(band mass)·μ(x_domain)^{1/q}; zero when no witness guarantee applies.
  double guaranteed_lower_bound = 0.0;
};

/// Builds rung k. Every scenario with witnesses except TangentialRow1 asserts
/// phase_bound ≤ 1/2 at the witness of every quadrature node and every cell
/// endpoint and midpoint; failure throws PhaseCertificateFailed.
ScenarioInstance build_scenario(ScenarioId id, const ScenarioParams& params, int k);

/// Largest phase over the certificate points of an instance.
double witness_phase(const ScenarioInstance& instance);

/// Mixed norm with the witness map injected into the time grid.
double witness_norm(const ScenarioInstance& instance);

struct ScalingRow {
  double lambda = 0.0;
  int k = 0;
  double norm = 0.0;
  double sobolev = 0.0;
  double ratio = 0.0;
};

struct ScalingReport {
  ScenarioId id = ScenarioId::FractalLines1D;
  ScenarioParams params;
  std::vector<ScalingRow> rows;
  /// Slope of log ratio against log λ.
  double fitted_slope = 0.0;
  double stderr_slope = 0.0;
  double theoretical_slope = 0.0;
  /// Slope of log norm against log λ.
  double norm_slope = 0.0;
};

/// For ExpTangential both fits use value·(log λ)^{α/2}, removing the known
/// logarithmic factor. SufficiencyProbe rows carry the trial with the largest ratio.
ScalingReport run_scaling(ScenarioId id, const ScenarioParams& params);

double theoretical_exponent(ScenarioId id, const ScenarioParams& params);

/// log 2 / log(1/r).
double cantor_dimension(double r);

}  // namespace oscimax
