#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "oscimax/error.hpp"
#include "oscimax/kernelcheck.hpp"

using namespace oscimax;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidParams;
}

// 2^20-node midpoint sum of ψ² over its support 1/2 < |ξ| < 2.
double psi_squared_oracle() {
  const std::size_t n = std::size_t{1} << 20;
  const double lo = 0.5, hi = 2.0, h = (hi - lo) / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double u = (lo + (static_cast<double>(j) + 0.5) * h - 1.25) / 0.75;
    const double v = std::exp(1.0 - 1.0 / (1.0 - u * u));
    sum += v * v;
  }
  return 2.0 * sum * h;
}

KernelSample sample(double x, double t, double theta, double xp, double tp, double thetap, double lambda) {
  return KernelSample{x, t, theta, xp, tp, thetap, lambda, 2.0};
}

}  // namespace

TEST_CASE("bump and its square integral") {
  CHECK(psi(1.25) == doctest::Approx(1.0));
  CHECK(psi(-1.25) == doctest::Approx(1.0));
  CHECK(psi(0.5) == 0.0);
  CHECK(psi(2.0) == 0.0);
  CHECK(psi(0.1) == 0.0);
  CHECK(psi(3.0) == 0.0);
  CHECK(psi_squared_integral() == doctest::Approx(psi_squared_oracle()).epsilon(1e-9));
}

TEST_CASE("kernel on the diagonal") {
  for (double lambda : {1.0, 256.0, 4096.0}) {
    const auto k = kernel_eval(sample(0.3, -0.2, 0.01, 0.3, -0.2, 0.01, lambda));
    CHECK(k.real() == doctest::Approx(lambda * psi_squared_integral()).epsilon(1e-10));
    CHECK(std::abs(k.imag()) <= 1e-10 * lambda);
  }
}

TEST_CASE("kernel is Hermitian and bounded") {
  const auto samples = kernel_samples(200, 17, 1024.0, 2.0, 2.0, 0.5);
  const double cap = 1024.0 * psi_squared_integral();
  for (const auto& s : samples) {
    const auto a = kernel_eval(s);
    const auto b = kernel_eval(swapped(s));
    CHECK(std::abs(a - std::conj(b)) <= 1e-8 * cap);
    CHECK(std::abs(a) <= cap + 1e-9);
  }
}

TEST_CASE("region examples") {
  const double lambda = 4096.0, q = 2.0, alpha = 0.5;
  const double delta = std::pow(lambda, -q * s_star(alpha, q) / alpha);
  CHECK(s_star(0.5, 2.0) == 0.25);
  CHECK(s_star(0.5, 4.0) == 0.125);
  CHECK(s_star(1.0, 4.0) == 0.25);
  CHECK(classify_region(sample(0.2, 0.1, 0, 0.2, 0.7, 0, lambda), q, alpha) == KernelRegion::V1);
  CHECK(classify_region(sample(0.2, 0.1, 0, 0.2 + 3 * delta, 0.1 + 3 * delta, 0, lambda), q, alpha) ==
        KernelRegion::V2);
  CHECK(classify_region(sample(0.2, 0.1, 0, 0.2 + 3 * delta, 0.1, 0, lambda), q, alpha) == KernelRegion::V3);
  CHECK(region_name(KernelRegion::V2) == "V2");
  CHECK(code_of([&] { classify_region(sample(0, 0, 0, 0, 0, 0, lambda), 1.5, alpha); }) ==
        ErrorCode::InvalidExponents);
  CHECK(code_of([&] { classify_region(sample(0, 0, 0, 0, 0, 0, lambda), 2.0, 1.5); }) ==
        ErrorCode::InvalidExponents);
}

TEST_CASE("regions partition the samples and V3 keeps the line field comparable") {
  for (double lambda : {256.0, 16384.0}) {
    const double q = 2.0, alpha = 0.5;
    const double delta = std::pow(lambda, -q * s_star(alpha, q) / alpha);
    const auto samples = kernel_samples(400, 5, lambda, 2.0, q, alpha);
    int counts[3] = {0, 0, 0};
    for (const auto& s : samples) {
      const double dx = std::abs(s.x - s.xp), dt = std::abs(s.t - s.tp);
      const bool v1 = dx <= 2 * delta, v2 = !v1 && dx <= 4 * dt, v3 = !v1 && dx > 4 * dt;
      CHECK(v1 + v2 + v3 == 1);
      const auto region = classify_region(s, q, alpha);
      CHECK(region == (v1 ? KernelRegion::V1 : v2 ? KernelRegion::V2 : KernelRegion::V3));
      ++counts[static_cast<int>(region)];
      CHECK(s.theta >= 0.0);
      CHECK(s.theta <= delta);
      CHECK(s.thetap >= 0.0);
      CHECK(s.thetap <= delta);
      if (region == KernelRegion::V3) {
        const double rho = std::abs(rho_difference(s));
        CHECK(rho >= dx / 4);
        CHECK(rho <= 4 * dx);
      }
    }
    CHECK(counts[0] > 0);
    CHECK(counts[1] > 0);
    CHECK(counts[2] > 0);
  }
}

TEST_CASE("frequency split predicate") {
  const auto s = sample(0.5, 0.0, 0, 0.0, 0.001, 0, 1024.0);
  // 8mλ^{m−1}|t−t′||ξ|^{m−1} = 16.384|ξ|.
  CHECK(in_u1(s, 0.03));
  CHECK_FALSE(in_u1(s, 0.031));
}

TEST_CASE("sampling is seeded") {
  const auto a = kernel_samples(50, 9, 512.0, 2.0, 2.0, 0.5);
  const auto b = kernel_samples(50, 9, 512.0, 2.0, 2.0, 0.5);
  const auto c = kernel_samples(50, 10, 512.0, 2.0, 2.0, 0.5);
  REQUIRE(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].tp == b[i].tp);
  }
  CHECK(a[0].x != c[0].x);
}

TEST_CASE("small kernel sweep") {
  const auto report = kernel_sweep(0.5, 2.0, 2.0, {256.0, 512.0, 1024.0}, 60, 3, 1);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.violations == 0);
  CHECK(report.hermitian_error <= 1e-8);
  CHECK(report.max_constant > 0.0);
  CHECK(report.max_constant <= 10.0);
  for (const auto& row : report.rows) CHECK(row.v1 + row.v2 + row.v3 == row.samples);
  const auto threaded = kernel_sweep(0.5, 2.0, 2.0, {256.0, 512.0, 1024.0}, 60, 3, 2);
  CHECK(threaded.max_constant == report.max_constant);
}

TEST_CASE("van der Corput decay") {
  const auto ladder = dyadic_ladder(64.0, 262144.0);
  CHECK(ladder.size() == 13);
  const auto quad = vdc_decay_fit(VdcPhase::Quadratic, ladder);
  CHECK(quad.k == 2);
  CHECK(std::abs(quad.slope + 0.5) <= 0.05);
  CHECK(quad.top_decade_spread <= 0.10);
  const auto lin = vdc_decay_fit(VdcPhase::MonotoneLinear, ladder);
  CHECK(lin.k == 1);
  CHECK(std::abs(lin.slope + 1.0) <= 0.05);
  CHECK(lin.top_decade_spread <= 0.10);
  for (double m : {1.5, 2.0, 3.0}) {
    const auto frac = vdc_decay_fit(VdcPhase::Fractional, ladder, m);
    CHECK(std::abs(frac.slope + 0.5) <= 0.05);
    CHECK(std::isfinite(frac.constant));
  }
  // Closed form of the linear family: ∫_0^1 e^{iλξ}cos(πξ/2)dξ.
  for (double lambda : {64.0, 1000.0}) {
    const double w = std::numbers::pi / 2;
    const std::complex<double> i{0.0, 1.0};
    const auto term = [&](double k) { return (std::exp(i * k) - 1.0) / (i * k); };
    const auto exact = 0.5 * (term(lambda + w) + term(lambda - w));
    CHECK(std::abs(vdc_integral(VdcPhase::MonotoneLinear, lambda) - exact) <= 1e-10);
  }
  CHECK(parse_vdc_phase("monotone_linearized") == VdcPhase::MonotoneLinear);
  CHECK(vdc_phase_name(VdcPhase::Fractional) == "fractional");
  CHECK(code_of([] { vdc_decay_fit(VdcPhase::Quadratic, {64, 128, 256, 512}); }) == ErrorCode::DegenerateLadder);
  CHECK(code_of([] { vdc_decay_fit(VdcPhase::Quadratic, {64, 70, 80, 90, 100, 110}); }) == ErrorCode::DegenerateLadder);
}

TEST_CASE("Young and HLS closed forms for constant functions") {
  for (int res : {8, 64, 256}) {
    const auto one = constant_step_function(res, 1.0);
    CHECK(inequality_ratio(1.0, 2.0, YoungMode{-1.0, 1.0}, one, one) == doctest::Approx(0.75).epsilon(1e-6));
    for (double rho : {0.2, 0.6, 0.9}) {
      const double lhs = 8.0 * (2.0 * std::pow(2.0, 1.0 - rho) / (1.0 - rho) - std::pow(2.0, 2.0 - rho) / (2.0 - rho));
      CHECK(inequality_ratio(1.0, 2.0, HlsMode{rho}, one, one) == doctest::Approx(lhs / 8.0).epsilon(1e-6));
    }
    const auto three = constant_step_function(res, 3.0);
    CHECK(inequality_ratio(1.0, 2.0, YoungMode{-1.0, 1.0}, three, one) == doctest::Approx(0.75).epsilon(1e-6));
  }
}

TEST_CASE("inequality validation") {
  CHECK(code_of([] { validate_inequality(0.5, 2.0, HlsMode{0.5}); }) == ErrorCode::InvalidExponents);
  CHECK(code_of([] { validate_inequality(0.5, 2.0, HlsMode{0.0}); }) == ErrorCode::InvalidExponents);
  CHECK(code_of([] { validate_inequality(0.5, 2.0, YoungMode{1.0, 1.0}); }) == ErrorCode::InvalidExponents);
  CHECK(code_of([] { validate_inequality(0.5, 1.5, YoungMode{}); }) == ErrorCode::InvalidExponents);
  CHECK_NOTHROW(validate_inequality(0.5, 2.0, HlsMode{0.4}));
  const auto one = constant_step_function(16, 1.0);
  CHECK(code_of([&] { inequality_ratio(0.5, 4.0, HlsMode{0.3}, one, one); }) == ErrorCode::InvalidExponents);
}

TEST_CASE("random step functions refine the same function") {
  const auto coarse = random_step_function(64, 8, 3);
  const auto fine = random_step_function(256, 8, 3);
  // Cells sample at their centres, so only the two x rows holding the window edges may differ.
  std::set<int> rows;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j)
      if (coarse.values[static_cast<std::size_t>(i) * 64 + j] !=
          fine.values[static_cast<std::size_t>(4 * i + 1) * 256 + 4 * j + 2])
        rows.insert(i);
  CHECK(rows.size() <= 2);
  double total = 0.0;
  for (double v : fine.values) {
    CHECK(v >= 0.0);
    total += v;
  }
  CHECK(total > 0.0);
}

TEST_CASE("small Young/HLS sweep") {
  const auto report = young_hls_check(0.5, 2.0, HlsMode{0.4}, 10, {64, 128}, 1, 1);
  REQUIRE(report.rows.size() == 2);
  CHECK(std::isfinite(report.max_ratio));
  CHECK(report.max_ratio > 0.0);
  const auto again = young_hls_check(0.5, 2.0, HlsMode{0.4}, 10, {64, 128}, 1, 3);
  CHECK(again.max_ratio == report.max_ratio);
}
