#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oscimax/error.hpp"
#include "oscimax/geometry.hpp"

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

}  // namespace

TEST_CASE("path points") {
  CHECK(path_point(Vertical{}, {0.4, 0}, 1, 0.9)[0] == 0.4);
  CHECK(path_point(PowerCurve{1.0}, {0.5, 0}, 1, 0.25)[0] == doctest::Approx(0.25));
  CHECK(path_point(PowerCurve{0.5}, {0.5, 0}, 1, 0.25)[0] == doctest::Approx(0.0));
  CHECK(std::abs(path_point(ExpTangential{}, {0.1, 0}, 1, std::exp(-10.0))[0]) <= 1e-15);

  const auto set = cantor_intervals(0.2, 3);
  const double y = set.intervals()[5].lo;
  const LineField field{{{CantorDirections{0.2, 3}}}};
  CHECK(path_point(field, {-y, 0}, 1, 1.0, Point{y, 0})[0] == 0.0);

  const LineField plane{{{Singleton{0.5}, IntervalDirections{0, 1}}}};
  const auto p = path_point(plane, {0.1, 0.2}, 2, 0.5, Point{0.5, 0.25});
  CHECK(p[0] == doctest::Approx(0.35));
  CHECK(p[1] == doctest::Approx(0.325));

  CHECK(code_of([&] { path_point(field, {0, 0}, 1, 0.5); }) == ErrorCode::MissingDirection);
  CHECK(code_of([] { path_point(ExpTangential{}, {0.1, 0}, 1, 1.0); }) == ErrorCode::InvalidTime);
  CHECK(code_of([] { path_point(ExpTangential{}, {0.1, 0}, 1, 0.0); }) == ErrorCode::InvalidTime);
  CHECK_THROWS_AS(validate_path(PowerCurve{1.5}), Error);
  CHECK_THROWS_AS(validate_path(PowerCurve{0.0}), Error);
  CHECK_THROWS_AS(validate_path(LineField{{{CantorDirections{0.5, 2}}}}), Error);
}

TEST_CASE("cantor intervals") {
  const auto one = cantor_intervals(1.0 / 3.0, 1);
  REQUIRE(one.intervals().size() == 2);
  CHECK(one.intervals()[0].lo == 0.0);
  CHECK(one.intervals()[0].hi == doctest::Approx(1.0 / 3.0));
  CHECK(one.intervals()[1].lo == doctest::Approx(2.0 / 3.0));
  CHECK(one.intervals()[1].hi == doctest::Approx(1.0));

  const auto two = cantor_intervals(0.2, 2);
  const double expected[4][2] = {{0.0, 0.04}, {0.16, 0.20}, {0.80, 0.84}, {0.96, 1.00}};
  REQUIRE(two.intervals().size() == 4);
  for (int j = 0; j < 4; ++j) {
    CHECK(two.intervals()[j].lo == doctest::Approx(expected[j][0]).epsilon(1e-12));
    CHECK(two.intervals()[j].hi == doctest::Approx(expected[j][1]).epsilon(1e-12));
  }

  CHECK(cantor_intervals(0.3, 0).intervals().size() == 1);
  CHECK(code_of([] { cantor_intervals(0.3, 25); }) == ErrorCode::TooManyIntervals);
  CHECK_THROWS_AS(cantor_intervals(0.5, 2), Error);
  CHECK_THROWS_AS(cantor_intervals(0.0, 2), Error);
}

TEST_CASE("cantor invariants") {
  for (double r : {0.1, 0.2, 1.0 / 3.0, 0.45}) {
    for (int k = 0; k <= 10; ++k) {
      const auto set = cantor_intervals(r, k);
      const auto& iv = set.intervals();
      REQUIRE(iv.size() == (std::size_t{1} << k));
      double total = 0.0;
      for (std::size_t j = 0; j < iv.size(); ++j) {
        CHECK(std::abs(iv[j].length() - std::pow(r, k)) <= 1e-12);
        CHECK(iv[j].lo >= 0.0);
        CHECK(iv[j].hi <= 1.0);
        if (j > 0) CHECK(iv[j - 1].hi < iv[j].lo);
        total += iv[j].length();
      }
      CHECK(total == doctest::Approx(std::pow(2 * r, k)).epsilon(1e-12));
      if (k > 0) {
        const auto parent = cantor_intervals(r, k - 1);
        for (std::size_t j = 0; j < iv.size(); ++j) {
          const auto& p = parent.intervals()[j / 2];
          CHECK(iv[j].lo >= p.lo - 1e-15);
          CHECK(iv[j].hi <= p.hi + 1e-15);
        }
      }
    }
  }
}

TEST_CASE("nearest cantor endpoint") {
  const auto set = cantor_intervals(0.2, 4);
  const double len = set.piece_length();
  for (const auto& iv : set.intervals()) {
    CHECK(nearest_cantor_endpoint(iv.lo, set) == iv.lo);
    CHECK(nearest_cantor_endpoint(iv.hi, set) == iv.hi);
    const double mid = 0.5 * (iv.lo + iv.hi);
    const double e = nearest_cantor_endpoint(mid, set);
    CHECK((e == iv.lo || e == iv.hi));
    CHECK(std::abs(nearest_cantor_endpoint(mid, set) - mid) == doctest::Approx(len / 2));
    CHECK(nearest_cantor_endpoint(iv.lo + 0.9 * len, set) == iv.hi);
  }
  // Dyadic endpoints make the midpoint exact, so the tie goes left.
  const auto quarter = cantor_intervals(0.25, 3);
  for (const auto& iv : quarter.intervals()) {
    CHECK(nearest_cantor_endpoint(0.5 * (iv.lo + iv.hi), quarter) == iv.lo);
  }
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<std::size_t> pick(0, set.intervals().size() - 1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const auto& iv = set.intervals()[pick(gen)];
    const double y = iv.lo + u(gen) * len;
    CHECK(std::abs(nearest_cantor_endpoint(y, set) - y) <= len / 2 + 1e-15);
  }
  CHECK(code_of([&] { nearest_cantor_endpoint(0.5, set); }) == ErrorCode::NotInSet);
  CHECK(code_of([&] { nearest_cantor_endpoint(-0.1, set); }) == ErrorCode::NotInSet);
}

TEST_CASE("minkowski dimension") {
  CHECK(std::abs(minkowski_dim_estimate(1.0 / 3.0, 10) - std::log(2.0) / std::log(3.0)) <= 0.02);
  CHECK(std::abs(minkowski_dim_estimate(0.2, 10) - std::log(2.0) / std::log(5.0)) <= 0.02);
  for (double r : {0.2, 1.0 / 3.0}) {
    const auto table = minkowski_dim_table(r, 10);
    REQUIRE(table.rows.size() == 10);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      if (i > 0) CHECK(table.rows[i].delta < table.rows[i - 1].delta);
      if (i > 0) CHECK(table.rows[i].count >= table.rows[i - 1].count);
    }
    for (int k = 1; k <= 10; ++k) {
      const auto set = cantor_intervals(r, k);
      CHECK(box_count(set.intervals(), std::pow(r, k)) == (std::size_t{1} << k));
    }
  }
  CHECK_THROWS_AS(minkowski_dim_estimate(0.2, 3), Error);
}

TEST_CASE("alpha measure integrals") {
  const auto one = [](double) { return 1.0; };
  for (double alpha : {0.1, 0.25, 0.5, 0.75, 1.0}) {
    const AlphaMeasure mu{alpha};
    CHECK(alpha_measure_integral(one, mu, 0.0, 1.0) == doctest::Approx(1.0 / alpha).epsilon(1e-10));
    for (double b : {1e-6, 0.05, 0.3, 1.0}) {
      CHECK(alpha_measure_integral(one, mu, 0.0, b) == doctest::Approx(std::pow(b, alpha) / alpha).epsilon(1e-10));
    }
    for (double lambda : {1e2, 1e4, 1e8}) {
      const double b = 1.0 / std::log(lambda);
      CHECK(alpha_measure_integral(one, mu, 0.0, b) == doctest::Approx(std::pow(b, alpha) / alpha).epsilon(1e-10));
    }
  }
  // Smooth g against the singular weight: ∫_0^1 cos(x)x^{−1/2} dx by a fine substitution sum.
  const AlphaMeasure half{0.5};
  const auto g = [](double x) { return std::cos(x); };
  double oracle = 0.0;
  const int n = 1 << 20;
  for (int i = 0; i < n; ++i) {
    const double u = (i + 0.5) / n;  // x = u², dμ = 2 du
    oracle += 2.0 * std::cos(u * u) / n;
  }
  CHECK(alpha_measure_integral(g, half, 0.0, 1.0) == doctest::Approx(oracle).epsilon(1e-8));
  // Symmetric interval through the singularity.
  CHECK(alpha_measure_integral(one, half, -0.25, 0.25) == doctest::Approx(2.0).epsilon(1e-10));

  // Intervals [y, y + 1/λ] with y a left endpoint in [0,1] carry mass ≳ 1/λ.
  const auto set = cantor_intervals(0.2, 5);
  const double lambda = std::pow(5.0, 5);
  for (double alpha : {0.25, 0.75}) {
    for (const auto& iv : set.intervals()) {
      const double mass = alpha_measure_integral(one, AlphaMeasure{alpha}, iv.lo, iv.lo + 1.0 / lambda);
      CHECK(mass >= 1.0 / lambda);
    }
  }
}

TEST_CASE("frostman ratio") {
  for (double alpha : {0.25, 0.5, 1.0}) {
    const AlphaMeasure mu{alpha};
    for (double r : {1e-3, 0.1, 1.0, 10.0}) {
      CHECK(frostman_ratio(mu, {{0.0, r}}) == doctest::Approx(2.0 / alpha).epsilon(1e-12));
    }
  }
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), ur(1e-4, 1.0);
  std::vector<BallSample> samples;
  for (int i = 0; i < 10000; ++i) samples.push_back({ux(gen), ur(gen)});
  CHECK(frostman_ratio(AlphaMeasure{0.5}, samples) <= 4.01);
  samples.push_back({0.0, 0.5});
  CHECK(frostman_ratio(AlphaMeasure{0.5}, samples) == doctest::Approx(4.0).epsilon(1e-12));
  for (const auto& s : std::vector<BallSample>(samples.begin(), samples.begin() + 100)) {
    CHECK(frostman_ratio(AlphaMeasure{1.0}, {s}) == doctest::Approx(2.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(frostman_ratio(AlphaMeasure{0.5}, {{0.0, 0.0}}), Error);
}

TEST_CASE("direction samples") {
  const auto c = direction_samples(DirectionSet{{CantorDirections{0.2, 3}}}, 33);
  CHECK(c.size() == 16);
  const auto i = direction_samples(DirectionSet{{IntervalDirections{0, 1}}}, 33);
  CHECK(i.size() == 33);
  CHECK(i.front()[0] == 0.0);
  CHECK(i.back()[0] == 1.0);
  const auto p = direction_samples(DirectionSet{{CantorDirections{1.0 / 3.0, 2}, IntervalDirections{0, 1}}}, 5);
  CHECK(p.size() == 8 * 5);
  const auto s = direction_samples(DirectionSet{{Singleton{0.0}}}, 33);
  CHECK(s.size() == 1);
}
