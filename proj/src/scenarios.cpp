#include "oscimax/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "oscimax/error.hpp"
#include "oscimax/fit.hpp"
#include "oscimax/random.hpp"

namespace oscimax {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCertificateLimit = 0.5;
// e^{-1/x} underflows below x ≈ 1/708; the exponential witness time is clamped here.
constexpr double kExpClampExponent = 700.0;
constexpr int kSufficiencyBands = 64;

constexpr std::array<std::pair<ScenarioId, std::string_view>, 9> kNames{{
    {ScenarioId::TangentialRow1, "tangential-row1"},
    {ScenarioId::TangentialRow2, "tangential-row2"},
    {ScenarioId::TangentialRow3, "tangential-row3"},
    {ScenarioId::ExpTangential, "exp-tangential"},
    {ScenarioId::FractalLines1D, "fractal-lines-1d"},
    {ScenarioId::FractalLines2DLow, "fractal-lines-2d-low"},
    {ScenarioId::FractalLines2DHigh, "fractal-lines-2d-high"},
    {ScenarioId::AlphaFractalRemark, "alpha-fractal-remark"},
    {ScenarioId::SufficiencyProbe, "sufficiency-probe"},
}};

bool uses_cantor_ladder(ScenarioId id) {
  return id == ScenarioId::FractalLines1D || id == ScenarioId::FractalLines2DLow ||
         id == ScenarioId::FractalLines2DHigh || id == ScenarioId::AlphaFractalRemark;
}

bool is_2d(ScenarioId id) { return id == ScenarioId::FractalLines2DLow || id == ScenarioId::FractalLines2DHigh; }

double s_star(const ScenarioParams& p) { return std::min(0.25, p.alpha / p.q); }

MixedNormSpec base_spec(const ScenarioParams& p) {
  MixedNormSpec spec;
  spec.q = p.q;
  spec.measure = AlphaMeasure{p.alpha};
  spec.x_nodes = p.x_nodes;
  spec.t_grid = p.t_grid;
  spec.interval_samples = p.interval_samples;
  spec.threads = p.threads;
  return spec;
}

double solve_increasing(const std::function<double(double)>& f, double lo, double hi) {
  for (int iter = 0; iter < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Witness time for the first table row: the stationary point of the phase at the
// band center, or the table relation x = t^κ + mλ^{2m−2}t when no sign change exists.
double row1_time(double x, double lambda, const ScenarioParams& p) {
  const double center = lambda + 0.5 / lambda;
  auto stationary = [&](double t) { return x - std::pow(t, p.kappa) + p.m * t * std::pow(center, p.m - 1.0); };
  double prev_t = 0.0, prev_g = stationary(0.0);
  for (int i = 0; i <= 240; ++i) {
    const double t = std::pow(10.0, -12.0 + i * 0.05);
    const double g = stationary(t);
    if ((g < 0.0) != (prev_g < 0.0)) {
      double lo = prev_t, hi = t;
      const bool rising = g > prev_g;
      for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        ((stationary(mid) < 0.0) == rising ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev_t = t;
    prev_g = g;
  }
  auto table = [&](double t) {
    return std::pow(t, p.kappa) + p.m * std::pow(lambda, 2.0 * p.m - 2.0) * t - x;
  };
  return solve_increasing(table, 0.0, std::min(1.0, std::pow(x, 1.0 / p.kappa)));
}

// Points at which the witness phase is certified: quadrature nodes plus every cell's
// endpoints and midpoint along each axis.
std::vector<Point> certificate_points(const MixedNormSpec& spec) {
  std::vector<Point> pts;
  for (const NormNode& n : quadrature_nodes(spec.x_domain, spec.measure, spec.x_nodes)) pts.push_back(n.x);
  for (const XCell& c : spec.x_domain.cells) {
    const std::array<double, 3> a0{c.lo[0], 0.5 * (c.lo[0] + c.hi[0]), c.hi[0]};
    if (spec.x_domain.dimension == 1) {
      for (double u : a0) pts.push_back({u, 0.0});
      continue;
    }
    const std::array<double, 3> a1{c.lo[1], 0.5 * (c.lo[1] + c.hi[1]), c.hi[1]};
    for (double u : a0)
      for (double v : a1) pts.push_back({u, v});
  }
  return pts;
}

SpectralProfile sufficiency_profile(double lambda, std::uint64_t seed, int trial) {
  const CounterStream stream(seed, static_cast<std::uint64_t>(trial));
  const double lo = 0.5 * lambda, width = 1.5 * lambda / kSufficiencyBands;
  std::vector<Band> bands;
  for (int j = 0; j < kSufficiencyBands; ++j) {
    const double a = lo + j * width;
    const double b = j + 1 == kSufficiencyBands ? 2.0 * lambda : lo + (j + 1) * width;
    bands.push_back(Band::interval(a, b, stream.uniform(static_cast<std::uint64_t>(j))));
  }
  return make_profile(1, std::move(bands));
}

// Geometric partition of [−1,1] refined toward 0, finest cell about 1/(8λ).
XDomain graded_domain(double lambda) {
  const int levels = std::max(1, static_cast<int>(std::ceil(std::log2(8.0 * lambda))));
  std::vector<double> edges;
  for (int j = 0; j <= levels; ++j) edges.push_back(std::ldexp(1.0, -j));
  XDomain d;
  for (int j = 0; j < levels; ++j) d.cells.push_back({{-edges[j], 0.0}, {-edges[j + 1], 0.0}});
  d.cells.push_back({{-edges[levels], 0.0}, {edges[levels], 0.0}});
  for (int j = levels; j > 0; --j) d.cells.push_back({{edges[j], 0.0}, {edges[j - 1], 0.0}});
  return d;
}

double log_correction(ScenarioId id, const ScenarioParams& p, double lambda) {
  return id == ScenarioId::ExpTangential ? std::pow(std::log(lambda), 0.5 * p.alpha) : 1.0;
}

}  // namespace

std::string_view scenario_name(ScenarioId id) noexcept {
  for (const auto& [key, name] : kNames)
    if (key == id) return name;
  return "unknown";
}

ScenarioId parse_scenario(std::string_view name) {
  for (const auto& [key, n] : kNames)
    if (n == name) return key;
  throw Error(ErrorCode::InvalidParams, "unknown scenario '" + std::string(name) + "'");
}

std::string_view direction_mode_name(DirectionMode mode) noexcept {
  switch (mode) {
    case DirectionMode::Cantor: return "cantor";
    case DirectionMode::Point: return "point";
    case DirectionMode::Interval: return "interval";
  }
  return "cantor";
}

DirectionMode parse_direction_mode(std::string_view name) {
  if (name == "cantor") return DirectionMode::Cantor;
  if (name == "point") return DirectionMode::Point;
  if (name == "interval") return DirectionMode::Interval;
  throw Error(ErrorCode::InvalidParams, "unknown direction mode '" + std::string(name) + "'");
}

double cantor_dimension(double r) { return std::log(2.0) / std::log(1.0 / r); }

void validate_params(ScenarioId id, const ScenarioParams& p) {
  if (!(p.m > 1.0) || !std::isfinite(p.m)) throw Error(ErrorCode::InvalidParams, "m must exceed 1");
  if (!(p.kappa > 0.0 && p.kappa <= 1.0)) throw Error(ErrorCode::InvalidParams, "κ must lie in (0, 1]");
  if (!(p.q >= 1.0 && p.q <= 64.0)) throw Error(ErrorCode::SpecOutOfRange, "q must lie in [1, 64]");
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw Error(ErrorCode::InvalidParams, "α must lie in (0, 1]");
  if (!std::isfinite(p.s)) throw Error(ErrorCode::InvalidParams, "s must be finite");
  if (!(p.r > 0.0 && p.r < 0.5)) throw Error(ErrorCode::InvalidParams, "r must lie in (0, 1/2)");
  if (!(p.c > 0.0) || !std::isfinite(p.c)) throw Error(ErrorCode::InvalidParams, "band constant c must be positive");
  if (p.k_min < 0 || p.k_max < p.k_min) throw Error(ErrorCode::InvalidParams, "ladder needs 0 ≤ k_min ≤ k_max");
  if (p.trials < 1) throw Error(ErrorCode::InvalidParams, "trials must be positive");
  if (p.x_nodes < 1 || p.x_nodes > 64) throw Error(ErrorCode::InvalidParams, "x_nodes must lie in [1, 64]");
  if (p.interval_samples < 1) throw Error(ErrorCode::InvalidParams, "interval_samples must be positive");
  if (uses_cantor_ladder(id) && p.k_max > kMaxCantorGeneration)
    throw Error(ErrorCode::TooManyIntervals, "Cantor generation beyond 24");
  if (!uses_cantor_ladder(id) && p.k_max > 60) throw Error(ErrorCode::InvalidParams, "λ = 2^k needs k ≤ 60");
  if (id == ScenarioId::ExpTangential && p.k_min < 2)
    throw Error(ErrorCode::InvalidParams, "exponential path needs λ ≥ 4 so that (log λ)^{-1} < 1");
  if (is_2d(id) && ladder_lambda(id, p, p.k_max) > 243.0 * (1.0 + 1e-12))
    throw Error(ErrorCode::InvalidParams, "dimension-2 ladders are capped at λ ≤ 3^5");
}

nlohmann::json params_to_json(const ScenarioParams& p) {
  return nlohmann::json{{"m", p.m},
                        {"kappa", p.kappa},
                        {"q", p.q},
                        {"alpha", p.alpha},
                        {"s", p.s},
                        {"r", p.r},
                        {"k_min", p.k_min},
                        {"k_max", p.k_max},
                        {"c", p.c},
                        {"directions", std::string(direction_mode_name(p.directions))},
                        {"seed", p.seed},
                        {"trials", p.trials},
                        {"x_nodes", p.x_nodes},
                        {"t_coarse", p.t_grid.coarse_size},
                        {"t_refine_levels", p.t_grid.refine_levels},
                        {"t_refine_factor", p.t_grid.refine_factor},
                        {"t_log_floor", p.t_grid.log_floor},
                        {"interval_samples", p.interval_samples}};
}

ScenarioParams params_from_json(const nlohmann::json& j) {
  ScenarioParams p;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("m", p.m);
  get("kappa", p.kappa);
  get("q", p.q);
  get("alpha", p.alpha);
  get("s", p.s);
  get("r", p.r);
  get("k_min", p.k_min);
  get("k_max", p.k_max);
  get("c", p.c);
  if (j.contains("directions")) p.directions = parse_direction_mode(j.at("directions").get<std::string>());
  get("seed", p.seed);
  get("trials", p.trials);
  get("x_nodes", p.x_nodes);
  get("t_coarse", p.t_grid.coarse_size);
  get("t_refine_levels", p.t_grid.refine_levels);
  get("t_refine_factor", p.t_grid.refine_factor);
  get("t_log_floor", p.t_grid.log_floor);
  get("interval_samples", p.interval_samples);
  return p;
}

double ladder_lambda(ScenarioId id, const ScenarioParams& p, int k) {
  return uses_cantor_ladder(id) ? std::pow(p.r, -k) : std::ldexp(1.0, k);
}

double theoretical_exponent(ScenarioId id, const ScenarioParams& p) {
  const double beta = cantor_dimension(p.r);
  switch (id) {
    case ScenarioId::TangentialRow1: return 0.25 - p.s;
    case ScenarioId::TangentialRow2: return (0.5 - p.alpha / p.q - p.s) / p.m;
    case ScenarioId::TangentialRow3: return 0.5 / p.m - p.alpha * p.kappa / p.q - p.s / p.m;
    case ScenarioId::ExpTangential: return 1.0 / p.m - (p.s + 0.5) / p.m;
    case ScenarioId::FractalLines1D: {
      const double b = p.directions == DirectionMode::Cantor ? beta : p.directions == DirectionMode::Point ? 0.0 : 1.0;
      return 0.5 - 1.0 / p.q + b / p.q - p.s;
    }
    case ScenarioId::FractalLines2DLow: return 1.0 - 2.0 / p.q + beta / p.q - p.s;
    case ScenarioId::FractalLines2DHigh: return 1.0 - 2.0 / p.q + (1.0 + beta) / p.q - p.s;
    case ScenarioId::AlphaFractalRemark: return 0.5 + (beta - 1.0) / p.q - p.s;
    case ScenarioId::SufficiencyProbe: return 0.5 - s_star(p) - p.s;
  }
  return 0.0;
}

ScenarioInstance build_scenario(ScenarioId id, const ScenarioParams& p, int k) {
  validate_params(id, p);
  ScenarioInstance inst;
  inst.id = id;
  inst.k = k;
  const double lambda = ladder_lambda(id, p, k);
  inst.lambda = lambda;
  MaximalProblem& prob = inst.problem;
  prob.m = p.m;
  prob.spec = base_spec(p);
  MixedNormSpec& spec = prob.spec;
  bool certify = true;

  switch (id) {
    case ScenarioId::TangentialRow1: {
      prob.profile = make_profile(1, {Band::interval(lambda, lambda + 1.0 / lambda, 1.0 / lambda)});
      prob.path = PowerCurve{p.kappa};
      spec.x_domain = XDomain::interval(0.0, 1.0 / (100.0 * (p.m - 1.0)));
      spec.t_window = {0.0, 1.0};
      prob.witness = [lambda, p](const Point& x) { return std::vector<Witness>{{row1_time(x[0], lambda, p), {}}}; };
      certify = false;
      break;
    }
    case ScenarioId::TangentialRow2: {
      prob.profile = make_profile(1, {Band::interval(0.0, std::pow(lambda, 1.0 / p.m) / 100.0)});
      prob.path = PowerCurve{p.kappa};
      spec.x_domain = XDomain::interval(0.0, std::pow(lambda, -1.0 / p.m) / 100.0);
      spec.t_window = {0.0, 0.01 / lambda};
      const double t = 0.005 / lambda;
      prob.witness = [t](const Point&) { return std::vector<Witness>{{t, {}}}; };
      break;
    }
    case ScenarioId::TangentialRow3: {
      // At the table's edge the witness phase is 100^{-1/κ-m}λ^{1−1/(mκ)}, unbounded along the ladder.
      if (p.m * p.kappa > 1.0)
        throw Error(ErrorCode::PhaseCertificateFailed, "witness phase grows like λ^{1−1/(mκ)} when mκ > 1");
      prob.profile = make_profile(1, {Band::interval(0.0, std::pow(lambda, 1.0 / p.m) / 100.0)});
      prob.path = PowerCurve{p.kappa};
      const double table = std::pow(lambda, -1.0 / p.m) / 100.0;
      const double widened = std::pow(std::pow(100.0, p.m) / (4.0 * lambda), p.kappa);
      const double upper = std::min(1.0, std::max(table, widened));
      spec.x_domain = XDomain::interval(0.0, upper);
      spec.t_window = {0.0, std::pow(upper, 1.0 / p.kappa)};
      const double inv = 1.0 / p.kappa;
      prob.witness = [inv](const Point& x) { return std::vector<Witness>{{std::pow(x[0], inv), {}}}; };
      break;
    }
    case ScenarioId::ExpTangential: {
      prob.profile = make_profile(1, {Band::interval(0.0, std::pow(lambda, 1.0 / p.m) / 100.0)});
      prob.path = ExpTangential{};
      const double upper = 1.0 / std::log(lambda);
      XDomain d;
      constexpr int kCells = 4;
      for (int i = 0; i < kCells; ++i) d.cells.push_back({{upper * i / kCells, 0.0}, {upper * (i + 1) / kCells, 0.0}});
      spec.x_domain = d;
      spec.t_window = {std::exp(-kExpClampExponent), 1.0 / lambda};
      prob.witness = [](const Point& x) {
        const double e = x[0] > 1.0 / kExpClampExponent ? 1.0 / x[0] : kExpClampExponent;
        return std::vector<Witness>{{std::exp(-e), {}}};
      };
      break;
    }
    case ScenarioId::FractalLines1D:
    case ScenarioId::AlphaFractalRemark: {
      const double band = p.c * lambda;
      prob.profile = make_profile(1, {Band::interval(0.0, band, 1.0, NegativeDispersion{p.m})});
      const double tau = 0.5 * std::pow(lambda, -p.m);
      spec.t_window = {1.0 - std::pow(lambda, -p.m), 1.0};
      const DirectionMode mode = id == ScenarioId::AlphaFractalRemark ? DirectionMode::Cantor : p.directions;
      if (mode == DirectionMode::Cantor) {
        const CantorSet set = cantor_intervals(p.r, k);
        prob.path = LineField{DirectionSet{{CantorDirections{p.r, k}}}};
        spec.x_domain = XDomain::cantor(set, -1.0);
        prob.witness = [set, tau](const Point& x) {
          return std::vector<Witness>{{1.0 - tau, {nearest_cantor_endpoint(-x[0], set), 0.0}}};
        };
      } else if (mode == DirectionMode::Point) {
        prob.path = LineField{DirectionSet{{Singleton{0.0}}}};
        spec.x_domain = XDomain::interval(-1.0 / lambda, 0.0);
        prob.witness = [tau](const Point&) { return std::vector<Witness>{{1.0 - tau, {0.0, 0.0}}}; };
      } else {
        prob.path = LineField{DirectionSet{{IntervalDirections{0.0, 1.0}}}};
        spec.x_domain = XDomain::interval(-1.0, 0.0);
        prob.witness = [tau](const Point& x) { return std::vector<Witness>{{1.0 - tau, {-x[0], 0.0}}}; };
      }
      break;
    }
    case ScenarioId::FractalLines2DLow:
    case ScenarioId::FractalLines2DHigh: {
      const double band = p.c * lambda;
      prob.profile = make_profile(2, {Band::rectangle({0.0, 0.0}, {band, band}, 1.0, NegativeDispersion{p.m})});
      const double tau = 0.5 * std::pow(lambda, -p.m);
      spec.t_window = {1.0 - std::pow(lambda, -p.m), 1.0};
      const CantorSet set = cantor_intervals(p.r, k);
      const bool high = id == ScenarioId::FractalLines2DHigh;
      if (high) {
        prob.path = LineField{DirectionSet{{CantorDirections{p.r, k}, IntervalDirections{0.0, 1.0}}}};
        spec.x_domain = XDomain::with_second_axis(XDomain::cantor(set, -1.0), -1.0, 0.0);
      } else {
        prob.path = LineField{DirectionSet{{CantorDirections{p.r, k}, Singleton{0.0}}}};
        spec.x_domain = XDomain::with_second_axis(XDomain::cantor(set, -1.0), -1.0 / lambda, 0.0);
      }
      prob.witness = [set, tau, high](const Point& x) {
        return std::vector<Witness>{{1.0 - tau, {nearest_cantor_endpoint(-x[0], set), high ? -x[1] : 0.0}}};
      };
      break;
    }
    case ScenarioId::SufficiencyProbe: {
      for (int trial = 0; trial < p.trials; ++trial) inst.trial_profiles.push_back(sufficiency_profile(lambda, p.seed, trial));
      prob.profile = inst.trial_profiles.front();
      const double width = std::pow(lambda, -p.q * s_star(p) / p.alpha);
      prob.path = LineField{DirectionSet{{IntervalDirections{0.0, width}}}};
      spec.x_domain = graded_domain(lambda);
      spec.t_window = {-1.0, 1.0};
      // below |t| ~ λ^{-m} the dispersive phase is negligible, so the log grid stops there
      spec.t_grid.log_floor = std::pow(lambda, -p.m) / 16.0;
      certify = false;
      break;
    }
  }

  if (certify) {
    const double phase = witness_phase(inst);
    inst.certified_phase = phase;
    if (!(phase <= kCertificateLimit))
      throw Error(ErrorCode::PhaseCertificateFailed,
                  "witness phase " + std::to_string(phase) + " exceeds 1/2 at λ = " + std::to_string(lambda));
    const int d = prob.profile.dimension();
    inst.guaranteed_lower_bound = std::cos(kCertificateLimit) * prob.profile.total_mass() / std::pow(kTwoPi, d) *
                                  std::pow(domain_measure(spec.x_domain, spec.measure), 1.0 / p.q);
  }
  return inst;
}

double witness_phase(const ScenarioInstance& inst) {
  const MaximalProblem& prob = inst.problem;
  if (!prob.witness) return 0.0;
  const int d = prob.profile.dimension();
  const bool line = std::holds_alternative<LineField>(prob.path);
  EvalRequest req;
  req.profile = prob.profile;
  req.m = prob.m;
  req.allow_large_2d = prob.allow_large_2d;
  double worst = 0.0;
  for (const Point& x : certificate_points(prob.spec)) {
    for (const Witness& w : prob.witness(x)) {
      req.position = path_point(prob.path, x, d, w.t, line ? std::optional<Point>(w.theta) : std::nullopt);
      req.t = w.t;
      worst = std::max(worst, phase_bound(req));
    }
  }
  return worst;
}

double witness_norm(const ScenarioInstance& instance) { return mixed_norm(instance.problem); }

ScalingReport run_scaling(ScenarioId id, const ScenarioParams& p) {
  validate_params(id, p);
  if (p.k_max - p.k_min < 2) throw Error(ErrorCode::DegenerateLadder, "a ladder needs at least three rungs");
  ScalingReport report;
  report.id = id;
  report.params = p;
  std::vector<std::pair<double, double>> ratio_points, norm_points;
  for (int k = p.k_min; k <= p.k_max; ++k) {
    ScenarioInstance inst = build_scenario(id, p, k);
    ScalingRow row;
    row.lambda = inst.lambda;
    row.k = k;
    if (inst.trial_profiles.empty()) {
      row.norm = witness_norm(inst);
      row.sobolev = sobolev_norm(inst.problem.profile, p.s);
      row.ratio = row.norm / row.sobolev;
    } else {
      const std::vector<MixedNormResult> norms = mixed_norm_family(inst.problem, inst.trial_profiles);
      for (std::size_t i = 0; i < norms.size(); ++i) {
        const double sob = sobolev_norm(inst.trial_profiles[i], p.s);
        if (norms[i].norm / sob > row.ratio) {
          row.norm = norms[i].norm;
          row.sobolev = sob;
          row.ratio = norms[i].norm / sob;
        }
      }
    }
    const double corr = log_correction(id, p, inst.lambda);
    ratio_points.emplace_back(std::log(inst.lambda), std::log(row.ratio * corr));
    norm_points.emplace_back(std::log(inst.lambda), std::log(row.norm * corr));
    report.rows.push_back(row);
  }
  const ExponentFit ratio_fit = fit_exponent(ratio_points);
  report.fitted_slope = ratio_fit.slope;
  report.stderr_slope = ratio_fit.stderr_slope;
  report.norm_slope = fit_exponent(norm_points).slope;
  report.theoretical_slope = theoretical_exponent(id, p);
  return report;
}

}  // namespace oscimax
