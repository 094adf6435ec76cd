#include "oscimax/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "oscimax/error.hpp"
#include "oscimax/gauss.hpp"

namespace oscimax {
namespace {

bool overlaps(const Band& a, const Band& b, int dimension) {
  for (int axis = 0; axis < dimension; ++axis) {
    if (!(a.lo[axis] < b.hi[axis] && b.lo[axis] < a.hi[axis])) return false;
  }
  return true;
}

// Composite Gauss–Legendre on n equal panels per axis of (1+|ξ|²)^s over a band.
double weight_integral(const Band& band, int dimension, double s, int panels) {
  const GaussRule& rule = gauss_legendre(kPanelOrder);
  if (dimension == 1) {
    const double h = (band.hi[0] - band.lo[0]) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double a = band.lo[0] + p * h;
      double sum = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const double xi = a + 0.5 * h * (rule.nodes[i] + 1.0);
        sum += rule.weights[i] * std::pow(1.0 + xi * xi, s);
      }
      total += 0.5 * h * sum;
    }
    return total;
  }
  const double h0 = (band.hi[0] - band.lo[0]) / panels;
  const double h1 = (band.hi[1] - band.lo[1]) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    for (int q = 0; q < panels; ++q) {
      const double a0 = band.lo[0] + p * h0;
      const double a1 = band.lo[1] + q * h1;
      double sum = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const double x0 = a0 + 0.5 * h0 * (rule.nodes[i] + 1.0);
        for (std::size_t j = 0; j < rule.size(); ++j) {
          const double x1 = a1 + 0.5 * h1 * (rule.nodes[j] + 1.0);
          sum += rule.weights[i] * rule.weights[j] * std::pow(1.0 + x0 * x0 + x1 * x1, s);
        }
      }
      total += 0.25 * h0 * h1 * sum;
    }
  }
  return total;
}

double adaptive_weight_integral(const Band& band, int dimension, double s) {
  if (s == 0.0) return band_measure(band, dimension);
  const int max_panels = dimension == 1 ? (1 << 16) : (1 << 8);
  int panels = 1;
  double previous = weight_integral(band, dimension, s, panels);
  while (panels < max_panels) {
    panels *= 2;
    const double current = weight_integral(band, dimension, s, panels);
    if (std::abs(current - previous) <= 1e-12 * std::abs(current)) return current;
    previous = current;
  }
  return previous;
}

}  // namespace

double band_measure(const Band& band, int dimension) noexcept {
  double measure = band.hi[0] - band.lo[0];
  if (dimension == 2) measure *= band.hi[1] - band.lo[1];
  return measure;
}

double SpectralProfile::total_mass() const noexcept {
  double mass = 0.0;
  for (const Band& b : bands()) mass += b.amplitude * band_measure(b, dimension_);
  return mass;
}

double SpectralProfile::max_frequency() const noexcept {
  double best = 0.0;
  for (const Band& b : bands()) {
    if (dimension_ == 1) {
      best = std::max({best, std::abs(b.lo[0]), std::abs(b.hi[0])});
    } else {
      const double r0 = std::max(std::abs(b.lo[0]), std::abs(b.hi[0]));
      const double r1 = std::max(std::abs(b.lo[1]), std::abs(b.hi[1]));
      best = std::max(best, std::hypot(r0, r1));
    }
  }
  return best;
}

SpectralProfile SpectralProfile::scaled(double a) const {
  if (!(a >= 0.0) || !std::isfinite(a))
    throw Error(ErrorCode::InvalidProfile, "amplitude scale must be finite and non-negative");
  std::vector<Band> copy(bands().begin(), bands().end());
  for (Band& b : copy) b.amplitude *= a;
  return make_profile(dimension_, std::move(copy));
}

SpectralProfile make_profile(int dimension, std::vector<Band> bands) {
  if (dimension != 1 && dimension != 2)
    throw Error(ErrorCode::InvalidProfile, "dimension must be 1 or 2");
  if (bands.empty()) throw Error(ErrorCode::EmptyProfile, "profile has no bands");
  for (const Band& b : bands) {
    for (int axis = 0; axis < dimension; ++axis) {
      if (!std::isfinite(b.lo[axis]) || !std::isfinite(b.hi[axis]) || !(b.lo[axis] < b.hi[axis]))
        throw Error(ErrorCode::InvertedInterval,
                    "band requires lo < hi on axis " + std::to_string(axis));
    }
    if (!std::isfinite(b.amplitude) || b.amplitude < 0.0)
      throw Error(ErrorCode::InvalidProfile, "amplitude must be finite and non-negative");
    if (const auto* nd = std::get_if<NegativeDispersion>(&b.phase); nd && !(nd->m > 1.0))
      throw Error(ErrorCode::InvalidProfile, "negative dispersion exponent must exceed 1");
    if (const auto* lin = std::get_if<LinearTwist>(&b.phase); lin && !std::isfinite(lin->c))
      throw Error(ErrorCode::InvalidProfile, "linear twist must be finite");
  }
  if (dimension == 1) {
    std::vector<const Band*> order;
    for (const Band& b : bands) order.push_back(&b);
    std::sort(order.begin(), order.end(), [](const Band* a, const Band* b) { return a->lo[0] < b->lo[0]; });
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (order[i]->lo[0] < order[i - 1]->hi[0])
        throw Error(ErrorCode::OverlappingBands, "bands overlap near xi = " + std::to_string(order[i]->lo[0]));
    }
  } else {
    for (std::size_t i = 0; i < bands.size(); ++i)
      for (std::size_t j = i + 1; j < bands.size(); ++j)
        if (overlaps(bands[i], bands[j], dimension))
          throw Error(ErrorCode::OverlappingBands, "rectangles " + std::to_string(i) + " and " + std::to_string(j));
  }
  SpectralProfile profile;
  profile.dimension_ = dimension;
  profile.bands_ = std::make_shared<const std::vector<Band>>(std::move(bands));
  return profile;
}

double sobolev_norm(const SpectralProfile& profile, double s) {
  const int d = profile.dimension();
  double integral = 0.0;
  for (const Band& b : profile.bands()) {
    if (b.amplitude == 0.0) continue;
    integral += b.amplitude * b.amplitude * adaptive_weight_integral(b, d, s);
  }
  return std::pow(2.0 * std::numbers::pi, -0.5 * d) * std::sqrt(integral);
}

namespace {

PhaseTwist twist_from_json(const nlohmann::json& j) {
  if (j.is_null()) return NoTwist{};
  const std::string kind = j.value("kind", "none");
  if (kind == "none") return NoTwist{};
  if (kind == "negative_dispersion") return NegativeDispersion{j.at("m").get<double>()};
  if (kind == "linear") return LinearTwist{j.at("c").get<double>()};
  throw Error(ErrorCode::InvalidProfile, "unknown phase kind '" + kind + "'");
}

nlohmann::json twist_to_json(const PhaseTwist& twist) {
  return std::visit(
      [](const auto& t) -> nlohmann::json {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, NoTwist>) return {{"kind", "none"}};
        else if constexpr (std::is_same_v<T, NegativeDispersion>) return {{"kind", "negative_dispersion"}, {"m", t.m}};
        else return {{"kind", "linear"}, {"c", t.c}};
      },
      twist);
}

std::array<double, 2> axis_pair(const nlohmann::json& v) {
  if (v.is_array()) return {v.at(0).get<double>(), v.at(1).get<double>()};
  return {v.get<double>(), 0.0};
}

}  // namespace

SpectralProfile profile_from_json(const nlohmann::json& j) {
  try {
    const int dimension = j.at("dimension").get<int>();
    std::vector<Band> bands;
    for (const auto& jb : j.at("bands")) {
      Band b;
      b.lo = axis_pair(jb.at("lo"));
      b.hi = axis_pair(jb.at("hi"));
      b.amplitude = jb.value("amplitude", 1.0);
      b.phase = twist_from_json(jb.value("phase", nlohmann::json()));
      bands.push_back(b);
    }
    return make_profile(dimension, std::move(bands));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidProfile, std::string("malformed profile JSON: ") + e.what());
  }
}

nlohmann::json profile_to_json(const SpectralProfile& profile) {
  nlohmann::json bands = nlohmann::json::array();
  for (const Band& b : profile.bands()) {
    nlohmann::json jb;
    if (profile.dimension() == 1) {
      jb["lo"] = b.lo[0];
      jb["hi"] = b.hi[0];
    } else {
      jb["lo"] = {b.lo[0], b.lo[1]};
      jb["hi"] = {b.hi[0], b.hi[1]};
    }
    jb["amplitude"] = b.amplitude;
    jb["phase"] = twist_to_json(b.phase);
    bands.push_back(std::move(jb));
  }
  return {{"dimension", profile.dimension()}, {"bands", std::move(bands)}};
}

}  // namespace oscimax
