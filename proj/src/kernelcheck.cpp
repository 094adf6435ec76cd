#include "oscimax/kernelcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "oscimax/error.hpp"
#include "oscimax/fit.hpp"
#include "oscimax/gauss.hpp"
#include "oscimax/geometry.hpp"
#include "oscimax/parallel.hpp"
#include "oscimax/propagator.hpp"
#include "oscimax/random.hpp"

namespace oscimax {
namespace {

constexpr double kPsiCentre = 1.25;
constexpr double kPsiHalfWidth = 0.75;
// Cap on λ^m|t − t′| for drawn samples; the panel count grows linearly with it.
constexpr double kPhaseBudget = 2048.0;

double psi_squared(double xi) noexcept {
  const double p = psi(xi);
  return p * p;
}

void check_exponents(double alpha, double q) {
  if (!(q >= 2.0) || !std::isfinite(q)) throw Error(ErrorCode::InvalidExponents, "q must be at least 2");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidExponents, "alpha must lie in (0, 1]");
}

double omega_length(double lambda, double q, double alpha) {
  return std::pow(lambda, -q * s_star(alpha, q) / alpha);
}

// Second antiderivative of the pair kernel, so that the cell-pair integral is a
// second difference.
double kernel_antiderivative2(const InequalityMode& mode, double z) {
  if (const auto* y = std::get_if<YoungMode>(&mode)) {
    const double a = y->a, b = y->b;
    if (z <= a) return a * z;
    if (z <= b) return 0.5 * (z * z + a * a);
    return b * z + 0.5 * (a * a - b * b);
  }
  const double rho = std::get<HlsMode>(mode).rho;
  return std::pow(std::abs(z), 2.0 - rho) / ((1.0 - rho) * (2.0 - rho));
}

}  // namespace

void validate_sample(const KernelSample& s) {
  if (!(s.lambda >= 1.0) || !std::isfinite(s.lambda)) throw Error(ErrorCode::InvalidRequest, "lambda must be >= 1");
  if (!(s.m > 1.0) || !std::isfinite(s.m)) throw Error(ErrorCode::InvalidRequest, "m must exceed 1");
  for (double v : {s.x, s.t, s.theta, s.xp, s.tp, s.thetap})
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidRequest, "sample coordinates must be finite");
}

KernelSample swapped(const KernelSample& s) noexcept {
  KernelSample out = s;
  std::swap(out.x, out.xp);
  std::swap(out.t, out.tp);
  std::swap(out.theta, out.thetap);
  return out;
}

double rho_difference(const KernelSample& s) noexcept { return (s.x + s.t * s.theta) - (s.xp + s.tp * s.thetap); }

double psi(double xi) noexcept {
  const double u = (std::abs(xi) - kPsiCentre) / kPsiHalfWidth;
  if (!(std::abs(u) < 1.0)) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double psi_squared_integral() {
  static const double value = 2.0 * integrate_smooth(psi_squared, 0.5, 2.0, 1e-15, 16);
  return value;
}

std::complex<double> kernel_eval(const KernelSample& s, double rel_tol) {
  validate_sample(s);
  const double drho = rho_difference(s);
  const double dt = s.t - s.tp;
  if (drho == 0.0 && dt == 0.0) return {s.lambda * psi_squared_integral(), 0.0};
  PhaseModel pm;
  pm.add_linear(Point{s.lambda * drho, 0.0});
  if (dt != 0.0) pm.add_power(dt * std::pow(s.lambda, s.m), s.m);
  std::array<OscillatorySegment, 2> segments;
  segments[0].lo = -2.0;
  segments[0].hi = -0.5;
  segments[1].lo = 0.5;
  segments[1].hi = 2.0;
  for (auto& seg : segments) {
    seg.phase = pm;
    seg.weight = psi_squared;
    seg.max_panel_width = 0.1875;
  }
  return s.lambda * integrate_oscillatory(segments, rel_tol, std::size_t{1} << 24);
}

double s_star(double alpha, double q) noexcept { return std::min(0.25, alpha / q); }

std::string_view region_name(KernelRegion region) noexcept {
  switch (region) {
    case KernelRegion::V1: return "V1";
    case KernelRegion::V2: return "V2";
    case KernelRegion::V3: return "V3";
  }
  return "?";
}

KernelRegion classify_region(const KernelSample& s, double q, double alpha) {
  check_exponents(alpha, q);
  const double dx = std::abs(s.x - s.xp);
  if (dx <= 2.0 * omega_length(s.lambda, q, alpha)) return KernelRegion::V1;
  return dx <= 4.0 * std::abs(s.t - s.tp) ? KernelRegion::V2 : KernelRegion::V3;
}

bool in_u1(const KernelSample& s, double xi) noexcept {
  return std::abs(s.x - s.xp) >
         8.0 * s.m * std::pow(s.lambda, s.m - 1.0) * std::abs(s.t - s.tp) * std::pow(std::abs(xi), s.m - 1.0);
}

std::vector<KernelSample> kernel_samples(int count, std::uint64_t seed, double lambda, double m, double q,
                                         double alpha) {
  check_exponents(alpha, q);
  if (count < 0) throw Error(ErrorCode::InvalidParams, "sample count must be nonnegative");
  const double delta = omega_length(lambda, q, alpha);
  const double tcap = std::min(1.0, kPhaseBudget / std::pow(lambda, m));
  std::vector<KernelSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const CounterStream rng(seed, static_cast<std::uint64_t>(i));
    KernelSample s;
    s.lambda = lambda;
    s.m = m;
    s.theta = rng.uniform(0, 0.0, delta);
    s.thetap = rng.uniform(1, 0.0, delta);
    s.xp = rng.uniform(2, -1.0, 1.0);
    s.tp = rng.uniform(3, -1.0, 1.0);
    // Offset of x from x′, with the sign chosen to stay inside 𝕀.
    auto place = [&](double gap) {
      const double sign = rng.uniform(4) < 0.5 ? -1.0 : 1.0;
      double x = s.xp + sign * gap;
      if (std::abs(x) > 1.0) x = s.xp - sign * gap;
      return x;
    };
    switch (i % 4) {
      case 0:
        s.x = rng.uniform(5, -1.0, 1.0);
        s.tp = rng.uniform(3, -1.0 + tcap, 1.0 - tcap);
        s.t = s.tp + rng.uniform(6, -tcap, tcap);
        break;
      case 1:
        s.x = place(std::exp(rng.uniform(5, std::log(1e-6), std::log(2.0 * delta))));
        s.tp = rng.uniform(3, -1.0 + tcap, 1.0 - tcap);
        s.t = s.tp + rng.uniform(6, -1.0, 1.0) * std::min(1e-3, tcap);
        break;
      case 2: {
        const double top = std::max(2.1 * delta, std::min(1.0, 4.0 * tcap));
        const double gap = std::exp(rng.uniform(5, std::log(2.1 * delta), std::log(top)));
        s.x = place(gap);
        const double dt = rng.uniform(6, 0.26 * gap, std::min(1.0, std::max(0.26 * gap, tcap)));
        s.tp = rng.uniform(3, -1.0, 1.0 - dt);
        s.t = s.tp + dt;
        break;
      }
      default: {
        const double gap = std::exp(rng.uniform(5, std::log(4.0 * delta), 0.0));
        s.x = place(gap);
        const double xi0 = rng.uniform(6, 0.6, 1.9);
        // t − t′ placing the stationary point of φ(λξ) at ξ = ξ0.
        const double dt = -((s.x - s.xp) + s.tp * (s.theta - s.thetap)) /
                          (m * std::pow(lambda, m - 1.0) * std::pow(xi0, m - 1.0) + s.theta);
        s.t = s.tp + dt;
        if (std::abs(s.t) > 1.0) {
          s.tp -= dt;
          s.t = s.tp + dt;
        }
        break;
      }
    }
    out.push_back(s);
  }
  return out;
}

KernelReport kernel_sweep(double alpha, double q, double m, const std::vector<double>& lambdas, int samples,
                          std::uint64_t seed, int threads) {
  check_exponents(alpha, q);
  KernelReport report;
  for (double lambda : lambdas) {
    const std::vector<KernelSample> batch = kernel_samples(samples, seed, lambda, m, q, alpha);
    std::vector<std::complex<double>> forward(batch.size()), backward(batch.size());
    parallel_for(batch.size(), threads, [&](std::size_t i) {
      forward[i] = kernel_eval(batch[i]);
      backward[i] = kernel_eval(swapped(batch[i]));
    });
    KernelRow row;
    row.lambda = lambda;
    row.samples = static_cast<int>(batch.size());
    const double bound = lambda * psi_squared_integral();
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const KernelSample& s = batch[i];
      const double mod = std::abs(forward[i]);
      if (mod > bound + 1e-9) ++row.violations;
      row.hermitian_error = std::max(row.hermitian_error, std::abs(forward[i] - std::conj(backward[i])) / bound);
      switch (classify_region(s, q, alpha)) {
        case KernelRegion::V1: ++row.v1; break;
        case KernelRegion::V2: ++row.v2; break;
        case KernelRegion::V3: ++row.v3; break;
      }
      if (classify_region(s, q, alpha) != KernelRegion::V1)
        row.constant = std::max(row.constant, mod * std::sqrt(std::abs(s.x - s.xp) / lambda));
    }
    report.violations += row.violations;
    report.hermitian_error = std::max(report.hermitian_error, row.hermitian_error);
    report.rows.push_back(row);
  }
  if (!report.rows.empty()) {
    double lo = report.rows.front().constant, hi = lo;
    for (const KernelRow& r : report.rows) {
      lo = std::min(lo, r.constant);
      hi = std::max(hi, r.constant);
    }
    report.max_constant = hi;
    report.constant_spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
  }
  return report;
}

std::string_view vdc_phase_name(VdcPhase phase) noexcept {
  switch (phase) {
    case VdcPhase::Quadratic: return "quadratic";
    case VdcPhase::MonotoneLinear: return "monotone_linearized";
    case VdcPhase::Fractional: return "fractional";
  }
  return "?";
}

VdcPhase parse_vdc_phase(std::string_view name) {
  for (VdcPhase p : {VdcPhase::Quadratic, VdcPhase::MonotoneLinear, VdcPhase::Fractional})
    if (vdc_phase_name(p) == name) return p;
  throw Error(ErrorCode::InvalidParams, "unknown phase family '" + std::string(name) + "'");
}

int vdc_order(VdcPhase phase) noexcept { return phase == VdcPhase::MonotoneLinear ? 1 : 2; }

std::complex<double> vdc_integral(VdcPhase phase, double lambda, double m) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidParams, "lambda must be positive");
  OscillatorySegment seg;
  seg.max_panel_width = 0.125;
  switch (phase) {
    case VdcPhase::Quadratic:
      seg.lo = -1.0;
      seg.hi = 1.0;
      seg.phase.add_power(0.5 * lambda, 2.0);
      seg.weight = [](double xi) { return std::cos(0.5 * std::numbers::pi * xi); };
      break;
    case VdcPhase::MonotoneLinear:
      seg.lo = 0.0;
      seg.hi = 1.0;
      seg.phase.add_linear(Point{lambda, 0.0});
      seg.weight = [](double xi) { return std::cos(0.5 * std::numbers::pi * xi); };
      break;
    case VdcPhase::Fractional: {
      if (!(m > 1.0)) throw Error(ErrorCode::InvalidParams, "m must exceed 1");
      const double c = m * (m - 1.0) * std::min(std::pow(0.5, m - 2.0), std::pow(2.0, m - 2.0));
      seg.lo = 0.5;
      seg.hi = 2.0;
      seg.phase.add_power(lambda / c, m);
      seg.phase.add_linear(Point{-lambda * m * std::pow(kPsiCentre, m - 1.0) / c, 0.0});
      seg.weight = psi;
      break;
    }
  }
  return integrate_oscillatory(std::span<const OscillatorySegment>(&seg, 1), 1e-12, std::size_t{1} << 24);
}

VdcReport vdc_decay_fit(VdcPhase phase, const std::vector<double>& ladder, double m) {
  if (ladder.size() < 5) throw Error(ErrorCode::DegenerateLadder, "the ladder needs at least five rungs");
  const auto [lo, hi] = std::minmax_element(ladder.begin(), ladder.end());
  if (!(*lo > 0.0) || *hi < 10.0 * *lo) throw Error(ErrorCode::DegenerateLadder, "the ladder must span a decade");
  VdcReport report;
  report.phase = phase;
  report.k = vdc_order(phase);
  std::vector<std::pair<double, double>> points;
  for (double lambda : ladder) {
    VdcRow row;
    row.lambda = lambda;
    row.modulus = std::abs(vdc_integral(phase, lambda, m));
    row.scaled = std::pow(lambda, 1.0 / report.k) * row.modulus;
    report.constant = std::max(report.constant, row.scaled);
    points.emplace_back(std::log(lambda), std::log(row.modulus));
    report.rows.push_back(row);
  }
  const ExponentFit fit = fit_exponent(points);
  report.slope = fit.slope;
  report.stderr_slope = fit.stderr_slope;
  double top_lo = 0.0, top_hi = 0.0;
  bool first = true;
  for (const VdcRow& r : report.rows) {
    if (r.lambda < *hi / 10.0) continue;
    top_lo = first ? r.scaled : std::min(top_lo, r.scaled);
    top_hi = first ? r.scaled : std::max(top_hi, r.scaled);
    first = false;
  }
  report.top_decade_spread = top_hi > 0.0 ? (top_hi - top_lo) / top_hi : 0.0;
  return report;
}

std::vector<double> dyadic_ladder(double lambda_min, double lambda_max) {
  if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min))
    throw Error(ErrorCode::DegenerateLadder, "need 0 < lambda_min <= lambda_max");
  std::vector<double> out;
  for (double l = lambda_min; l <= lambda_max * (1.0 + 1e-12); l *= 2.0) out.push_back(l);
  return out;
}

StepFunction constant_step_function(int resolution, double value) {
  if (resolution < 1) throw Error(ErrorCode::InvalidParams, "resolution must be positive");
  StepFunction f;
  f.resolution = resolution;
  f.values.assign(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution), value);
  return f;
}

StepFunction random_step_function(int resolution, std::uint64_t seed, std::uint64_t stream) {
  constexpr int kBlocks = 64;
  StepFunction f = constant_step_function(resolution, 0.0);
  const CounterStream rng(seed, stream);
  const double centre = rng.uniform(0, -1.0, 1.0);
  const double width = std::exp2(rng.uniform(1, -6.0, 1.0));
  const double h = 2.0 / resolution;
  auto block = [&](double c) { return std::min(kBlocks - 1, static_cast<int>((c + 1.0) * 0.5 * kBlocks)); };
  for (int i = 0; i < resolution; ++i) {
    const double cx = -1.0 + (i + 0.5) * h;
    if (std::abs(cx - centre) >= 0.5 * width) continue;
    const int bi = block(cx);
    for (int j = 0; j < resolution; ++j) {
      const int bj = block(-1.0 + (j + 0.5) * h);
      f.values[static_cast<std::size_t>(i) * resolution + j] =
          rng.uniform(2 + static_cast<std::uint64_t>(bi) * kBlocks + static_cast<std::uint64_t>(bj));
    }
  }
  return f;
}

void validate_inequality(double alpha, double q, const InequalityMode& mode) {
  check_exponents(alpha, q);
  if (const auto* y = std::get_if<YoungMode>(&mode)) {
    if (!(y->a < y->b) || !std::isfinite(y->a) || !std::isfinite(y->b))
      throw Error(ErrorCode::InvalidExponents, "the Young interval needs a < b");
  } else {
    const double rho = std::get<HlsMode>(mode).rho;
    if (!(rho > 0.0) || !(0.5 * q * rho < alpha))
      throw Error(ErrorCode::InvalidExponents, "HLS needs 0 < q*rho/2 < alpha");
  }
}

double inequality_ratio(double alpha, double q, const InequalityMode& mode, const StepFunction& g,
                        const StepFunction& h) {
  validate_inequality(alpha, q, mode);
  if (g.resolution != h.resolution || g.resolution < 1)
    throw Error(ErrorCode::InvalidParams, "step functions must share a positive resolution");
  const int n = g.resolution;
  const double cell = 2.0 / n;
  const AlphaMeasure mu{alpha};
  std::vector<double> mass(n);
  for (int i = 0; i < n; ++i) mass[i] = alpha_measure_of(mu, -1.0 + i * cell, -1.0 + (i + 1) * cell);
  // Average of the kernel over a pair of x cells offset by d cells.
  std::vector<double> average(2 * n - 1);
  for (int d = -(n - 1); d <= n - 1; ++d) {
    const double z = d * cell;
    average[d + n - 1] = (kernel_antiderivative2(mode, z + cell) - 2.0 * kernel_antiderivative2(mode, z) +
                          kernel_antiderivative2(mode, z - cell)) /
                         (cell * cell);
  }
  const double qp = q / (q - 1.0);
  auto reduce = [&](const StepFunction& f, std::vector<double>& weighted) {
    weighted.assign(n, 0.0);
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
      double l1 = 0.0;
      for (int j = 0; j < n; ++j) l1 += f.values[static_cast<std::size_t>(i) * n + j];
      l1 *= cell;
      weighted[i] = l1 * mass[i];
      norm += mass[i] * std::pow(l1, qp);
    }
    return std::pow(norm, 1.0 / qp);
  };
  std::vector<double> gw, hw;
  const double gn = reduce(g, gw);
  const double hn = reduce(h, hw);
  if (gn == 0.0 || hn == 0.0) return 0.0;
  double lhs = 0.0;
  for (int i = 0; i < n; ++i) {
    if (gw[i] == 0.0) continue;
    double inner = 0.0;
    for (int j = 0; j < n; ++j) inner += average[i - j + n - 1] * hw[j];
    lhs += gw[i] * inner;
  }
  double denominator = gn * hn;
  if (const auto* y = std::get_if<YoungMode>(&mode)) denominator *= std::pow(y->b - y->a, 2.0 * alpha / q);
  return lhs / denominator;
}

InequalityReport young_hls_check(double alpha, double q, const InequalityMode& mode, int trials,
                                 const std::vector<int>& resolutions, std::uint64_t seed, int threads) {
  validate_inequality(alpha, q, mode);
  if (trials < 1) throw Error(ErrorCode::InvalidParams, "at least one trial is required");
  if (resolutions.empty()) throw Error(ErrorCode::InvalidParams, "at least one resolution is required");
  InequalityReport report;
  for (int res : resolutions) {
    std::vector<double> ratios(static_cast<std::size_t>(trials));
    parallel_for(ratios.size(), threads, [&](std::size_t i) {
      const StepFunction g = random_step_function(res, seed, 2 * i);
      const StepFunction h = random_step_function(res, seed, 2 * i + 1);
      ratios[i] = inequality_ratio(alpha, q, mode, g, h);
    });
    InequalityRow row{res, *std::max_element(ratios.begin(), ratios.end())};
    report.max_ratio = std::max(report.max_ratio, row.max_ratio);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace oscimax
