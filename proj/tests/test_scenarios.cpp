#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oscimax/error.hpp"
#include "oscimax/fit.hpp"
#include "oscimax/scenarios.hpp"

using namespace oscimax;

namespace {

constexpr double kPi = std::numbers::pi;
const double kCosHalf = std::cos(0.5);

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidParams;
}

ScenarioParams fractal_params() {
  ScenarioParams p;
  p.m = 2.0;
  p.q = 4.0;
  p.r = 0.2;
  p.s = 0.0;
  p.c = 0.125;
  return p;
}

}  // namespace

TEST_CASE("scenario names round trip") {
  for (auto id : {ScenarioId::TangentialRow1, ScenarioId::TangentialRow2, ScenarioId::TangentialRow3,
                  ScenarioId::ExpTangential, ScenarioId::FractalLines1D, ScenarioId::FractalLines2DLow,
                  ScenarioId::FractalLines2DHigh, ScenarioId::AlphaFractalRemark, ScenarioId::SufficiencyProbe}) {
    CHECK(parse_scenario(scenario_name(id)) == id);
  }
  CHECK(scenario_name(ScenarioId::FractalLines1D) == "fractal-lines-1d");
  CHECK(scenario_name(ScenarioId::SufficiencyProbe) == "sufficiency-probe");
  CHECK(code_of([] { parse_scenario("knapp"); }) == ErrorCode::InvalidParams);
}

TEST_CASE("fractal lines certificate and witness norm") {
  const auto p = fractal_params();
  const auto inst = build_scenario(ScenarioId::FractalLines1D, p, 4);
  CHECK(inst.lambda == doctest::Approx(625.0));
  REQUIRE(inst.certified_phase.has_value());
  CHECK(*inst.certified_phase <= 3 * p.c);
  CHECK(witness_phase(inst) <= 0.375);
  const double closed = kCosHalf * (625.0 / 8.0) / (2 * kPi) * std::pow(std::pow(0.4, 4), 0.25);
  CHECK(inst.guaranteed_lower_bound == doctest::Approx(closed).epsilon(1e-12));
  const double n = witness_norm(inst);
  CHECK(n >= closed);
  // The triangle inequality caps it at the same expression without cos(1/2).
  CHECK(n <= closed / kCosHalf * (1 + 1e-9));
}

TEST_CASE("certificate over r and k") {
  for (double r : {0.2, 1.0 / 3.0 - 1e-3}) {
    auto p = fractal_params();
    p.r = r;
    for (int k = 1; k <= 4; ++k) {
      const auto inst = build_scenario(ScenarioId::FractalLines1D, p, k);
      CHECK(witness_phase(inst) <= 0.5);
    }
  }
}

TEST_CASE("exponential tangential witness") {
  ScenarioParams p;
  p.m = 2.0;
  p.q = 2.0;
  p.alpha = 1.0;
  const auto inst = build_scenario(ScenarioId::ExpTangential, p, 16);
  const double lambda = 65536.0;
  CHECK(inst.lambda == lambda);
  const double top = std::sqrt(lambda) / 100.0;
  // Where e^{-1/x} is representable the offset cancels and the phase is t(x)·top^m ≤ 100^{-m}.
  for (double x : {0.0015, 0.01, 0.05, 1.0 / std::log(lambda)}) {
    EvalRequest r;
    r.profile = inst.problem.profile;
    r.t = std::exp(-1.0 / x);
    r.position = path_point(ExpTangential{}, {x, 0}, 1, r.t);
    CHECK(phase_bound(r) == doctest::Approx(r.t * top * top).epsilon(1e-9));
    CHECK(phase_bound(r) <= 1.0 / std::pow(100.0, p.m) * (1 + 1e-12));
  }
  // Below x = 1/700 the witness time is held at e^{-700}, leaving a linear term ≤ top/700.
  CHECK(witness_phase(inst) <= 1.0 / std::pow(100.0, p.m) + top / 700.0);
  const double closed = kCosHalf * (std::sqrt(lambda) / 100.0) / (2 * kPi) / std::sqrt(std::log(lambda));
  CHECK(inst.guaranteed_lower_bound == doctest::Approx(closed).epsilon(1e-9));
  CHECK(witness_norm(inst) >= closed);
}

TEST_CASE("row 3 rejects kappa above 1/m") {
  ScenarioParams p;
  p.m = 2.0;
  p.q = 2.0;
  p.kappa = 0.75;
  CHECK(code_of([&] { build_scenario(ScenarioId::TangentialRow3, p, 14); }) == ErrorCode::PhaseCertificateFailed);
  p.kappa = 0.25;
  const auto inst = build_scenario(ScenarioId::TangentialRow3, p, 14);
  CHECK(witness_phase(inst) <= 0.5);
}

TEST_CASE("witness norms dominate their guaranteed bounds") {
  ScenarioParams row2;
  row2.m = 2.0;
  row2.q = 2.0;
  row2.alpha = 0.5;
  for (int k : {8, 12}) {
    const auto inst = build_scenario(ScenarioId::TangentialRow2, row2, k);
    CHECK(witness_phase(inst) <= 0.5);
    CHECK(witness_norm(inst) >= inst.guaranteed_lower_bound);
  }
  auto remark = fractal_params();
  remark.q = 2.0;
  remark.alpha = 0.75;
  const auto inst = build_scenario(ScenarioId::AlphaFractalRemark, remark, 3);
  CHECK(witness_phase(inst) <= 0.5);
  CHECK(witness_norm(inst) >= inst.guaranteed_lower_bound);
  auto low = fractal_params();
  low.q = 3.0;
  low.r = 1.0 / 3.0;
  low.k_max = 5;
  const auto plane = build_scenario(ScenarioId::FractalLines2DLow, low, 2);
  CHECK(witness_phase(plane) <= 0.5);
  CHECK(witness_norm(plane) >= plane.guaranteed_lower_bound);
}

TEST_CASE("zero amplitude gives zero norm") {
  auto inst = build_scenario(ScenarioId::FractalLines1D, fractal_params(), 3);
  inst.problem.profile = inst.problem.profile.scaled(0.0);
  CHECK(witness_norm(inst) == 0.0);
}

TEST_CASE("theoretical exponents") {
  const double b5 = std::log(2.0) / std::log(5.0);
  auto low = fractal_params();
  low.q = 3.0;
  CHECK(theoretical_exponent(ScenarioId::FractalLines2DLow, low) == doctest::Approx(1.0 - 2.0 / 3.0 + b5 / 3.0));
  CHECK(theoretical_exponent(ScenarioId::FractalLines2DLow, low) == doctest::Approx(0.4769).epsilon(1e-3));
  auto one = fractal_params();
  CHECK(theoretical_exponent(ScenarioId::FractalLines1D, one) == doctest::Approx(0.3577).epsilon(1e-3));
  one.directions = DirectionMode::Interval;
  CHECK(theoretical_exponent(ScenarioId::FractalLines1D, one) == doctest::Approx(0.5));
  one.directions = DirectionMode::Point;
  CHECK(theoretical_exponent(ScenarioId::FractalLines1D, one) == doctest::Approx(0.25));
  ScenarioParams e;
  e.m = 2.0;
  CHECK(theoretical_exponent(ScenarioId::ExpTangential, e) == doctest::Approx(0.25));
  ScenarioParams row2;
  row2.m = 2.0;
  row2.q = 2.0;
  row2.alpha = 0.5;
  CHECK(theoretical_exponent(ScenarioId::TangentialRow2, row2) == doctest::Approx(0.125));
  ScenarioParams row3;
  row3.m = 2.0;
  row3.q = 2.0;
  row3.alpha = 1.0;
  row3.kappa = 0.25;
  CHECK(theoretical_exponent(ScenarioId::TangentialRow3, row3) == doctest::Approx(0.125));
  auto remark = fractal_params();
  remark.q = 2.0;
  remark.alpha = 0.75;
  CHECK(theoretical_exponent(ScenarioId::AlphaFractalRemark, remark) == doctest::Approx(0.5 + (b5 - 1.0) / 2.0));
  ScenarioParams suff;
  suff.q = 4.0;
  suff.alpha = 1.0;
  CHECK(theoretical_exponent(ScenarioId::SufficiencyProbe, suff) == doctest::Approx(0.25));
  CHECK(cantor_dimension(1.0 / 3.0) == doctest::Approx(0.6309297535714574));
}

TEST_CASE("fit_exponent") {
  std::vector<std::pair<double, double>> pts;
  for (int k = 0; k < 8; ++k) {
    const double lambda = std::pow(2.0, 3 + k);
    pts.emplace_back(std::log(lambda), 0.8577 * std::log(lambda) + 1.3);
  }
  const auto exact = fit_exponent(pts);
  CHECK(std::abs(exact.slope - 0.8577) <= 1e-12);
  CHECK(exact.stderr_slope <= 1e-12);
  for (auto& p : pts) p.second = 2.0;
  CHECK(std::abs(fit_exponent(pts).slope) <= 1e-14);
  pts.clear();
  for (int k = 10; k <= 20; ++k) {
    const double lambda = std::pow(2.0, k);
    pts.emplace_back(std::log(lambda), std::log(std::sqrt(lambda) * std::pow(std::log(lambda), -0.25)));
  }
  const double biased = fit_exponent(pts).slope;
  CHECK(biased > 0.45);
  CHECK(biased < 0.50);
  const std::vector<std::pair<double, double>> two{{0.0, 1.0}, {1.0, 2.0}};
  CHECK(code_of([&] { fit_exponent(two); }) == ErrorCode::DegenerateAbscissae);
  const std::vector<std::pair<double, double>> repeated{{1.0, 1.0}, {1.0, 2.0}, {1.0, 3.0}};
  CHECK(code_of([&] { fit_exponent(repeated); }) == ErrorCode::DegenerateAbscissae);
}

TEST_CASE("scaling report structure and amplitude invariance") {
  auto p = fractal_params();
  p.k_min = 2;
  p.k_max = 4;
  const auto report = run_scaling(ScenarioId::FractalLines1D, p);
  REQUIRE(report.rows.size() == 3);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    if (i > 0) CHECK(row.lambda > report.rows[i - 1].lambda);
    CHECK(row.ratio == doctest::Approx(row.norm / row.sobolev).epsilon(1e-14));
    CHECK(row.k == p.k_min + static_cast<int>(i));
  }
  CHECK(report.theoretical_slope == doctest::Approx(theoretical_exponent(ScenarioId::FractalLines1D, p)));

  // Rescaling every amplitude leaves the ratio, and so the slope, unchanged.
  std::vector<std::pair<double, double>> scaled;
  for (int k = p.k_min; k <= p.k_max; ++k) {
    auto inst = build_scenario(ScenarioId::FractalLines1D, p, k);
    inst.problem.profile = inst.problem.profile.scaled(7.5);
    const double ratio = witness_norm(inst) / sobolev_norm(inst.problem.profile, p.s);
    scaled.emplace_back(std::log(inst.lambda), std::log(ratio));
  }
  CHECK(fit_exponent(scaled).slope == doctest::Approx(report.fitted_slope).epsilon(1e-9));

  p.k_max = 3;
  CHECK(code_of([&] { run_scaling(ScenarioId::FractalLines1D, p); }) == ErrorCode::DegenerateLadder);
}

TEST_CASE("parameter validation and JSON") {
  auto p = fractal_params();
  p.r = 0.5;
  CHECK(code_of([&] { validate_params(ScenarioId::FractalLines1D, p); }) == ErrorCode::InvalidParams);
  p = fractal_params();
  p.kappa = 1.2;
  CHECK(code_of([&] { validate_params(ScenarioId::TangentialRow3, p); }) == ErrorCode::InvalidParams);
  p = fractal_params();
  p.m = 1.0;
  CHECK(code_of([&] { validate_params(ScenarioId::FractalLines1D, p); }) == ErrorCode::InvalidParams);
  p = fractal_params();
  p.r = 1.0 / 3.0;
  p.k_max = 6;
  CHECK(code_of([&] { validate_params(ScenarioId::FractalLines2DLow, p); }) == ErrorCode::InvalidParams);

  p = fractal_params();
  p.seed = 123456789012345ULL;
  p.directions = DirectionMode::Point;
  p.t_grid.refine_levels = 5;
  const auto back = params_from_json(params_to_json(p));
  CHECK(params_to_json(back) == params_to_json(p));
  CHECK(back.seed == p.seed);
  CHECK(back.directions == DirectionMode::Point);
  const auto partial = params_from_json(nlohmann::json{{"q", 3.0}});
  CHECK(partial.q == 3.0);
  CHECK(partial.m == ScenarioParams{}.m);
}

TEST_CASE("sufficiency probe rungs are seeded") {
  ScenarioParams p;
  p.q = 4.0;
  p.alpha = 1.0;
  p.trials = 3;
  p.seed = 42;
  const auto a = build_scenario(ScenarioId::SufficiencyProbe, p, 6);
  const auto b = build_scenario(ScenarioId::SufficiencyProbe, p, 6);
  REQUIRE(a.trial_profiles.size() == 3);
  for (std::size_t i = 0; i < a.trial_profiles.size(); ++i) {
    CHECK(profile_to_json(a.trial_profiles[i]) == profile_to_json(b.trial_profiles[i]));
    CHECK(a.trial_profiles[i].bands().size() == 64);
    for (const auto& band : a.trial_profiles[i].bands()) {
      CHECK(band.amplitude >= 0.0);
      CHECK(band.amplitude <= 1.0);
      CHECK(band.lo[0] >= 32.0 - 1e-12);
      CHECK(band.hi[0] <= 128.0 + 1e-12);
    }
  }
  p.seed = 43;
  const auto c = build_scenario(ScenarioId::SufficiencyProbe, p, 6);
  CHECK(profile_to_json(c.trial_profiles[0]) != profile_to_json(a.trial_profiles[0]));
}
