#include "oscimax/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "oscimax/error.hpp"
#include "oscimax/gauss.hpp"

namespace oscimax {
namespace {

constexpr double kQuarterTurn = 0.5 * std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double power(double rho, double e) noexcept {
  if (e == 2.0) return rho * rho;
  if (e == 3.0) return rho * rho * rho;
  return std::pow(rho, e);
}

// ρ^e from ρ², avoiding the square root where possible.
inline double power_from_square(double rho2, double e) noexcept {
  if (e == 2.0) return rho2;
  return std::pow(rho2, 0.5 * e);
}

inline std::complex<double> unit_phase(double phi) noexcept { return {std::cos(phi), std::sin(phi)}; }

void check_request(const EvalRequest& req) {
  if (!(req.m > 1.0) || !std::isfinite(req.m)) throw Error(ErrorCode::InvalidRequest, "dispersion order m must exceed 1");
  if (!(req.rel_tol > 0.0 && req.rel_tol <= 1e-2))
    throw Error(ErrorCode::InvalidRequest, "rel_tol must lie in (0, 1e-2]");
  if (!std::isfinite(req.t)) throw Error(ErrorCode::InvalidRequest, "time must be finite");
  const int d = req.profile.dimension();
  if (req.profile.bands().empty()) throw Error(ErrorCode::EmptyProfile, "request carries no profile");
  for (int axis = 0; axis < d; ++axis)
    if (!std::isfinite(req.position[axis])) throw Error(ErrorCode::InvalidRequest, "position must be finite");
  if (d == 2 && !req.allow_large_2d && req.profile.max_frequency() > kDefault2dFrequencyCap)
    throw Error(ErrorCode::InvalidRequest, "dimension-2 frequencies beyond 2^8 need allow_large_2d");
}

// Breakpoints of [lo, hi] such that the phase varies by at most π/2 on each panel.
// Pieces on either side of ξ = 0 are walked outward so |ξ| grows along the walk and
// the slope bound at the far end of a trial step bounds the whole step.
void phase_cuts(const PhaseModel& pm, double lo, double hi, double cap, std::size_t budget,
                std::vector<double>& cuts) {
  cuts.clear();
  const double lin = std::abs(pm.linear[0]);
  auto slope = [&](double rho) { return lin + pm.radial_slope_bound(rho); };
  auto step = [&](double rho, double remaining) {
    double w = remaining;
    if (cap > 0.0) w = std::min(w, cap);
    const double d0 = slope(rho);
    if (d0 > 0.0) w = std::min(w, kQuarterTurn / d0);
    const double d1 = slope(rho + w);
    if (d1 > 0.0) w = std::min(w, kQuarterTurn / d1);
    return w;
  };
  auto guard = [&] {
    if (cuts.size() > budget) throw Error(ErrorCode::ToleranceNotReached, "phase panel budget exceeded");
  };

  if (lo < 0.0) {
    const double b = std::min(hi, 0.0);
    std::vector<double> left{b};
    double x = b;
    while (x > lo) {
      const double w = step(-x, x - lo);
      x = (x - w <= lo + 1e-15 * std::abs(lo)) ? lo : x - w;
      left.push_back(x);
      if (left.size() > budget) throw Error(ErrorCode::ToleranceNotReached, "phase panel budget exceeded");
    }
    cuts.assign(left.rbegin(), left.rend());
  }
  if (hi > 0.0) {
    const double a = std::max(lo, 0.0);
    if (cuts.empty()) cuts.push_back(a);
    double x = a;
    while (x < hi) {
      const double w = step(x, hi - x);
      x = (x + w >= hi - 1e-15 * std::abs(hi)) ? hi : x + w;
      cuts.push_back(x);
      guard();
    }
  }
}

struct PreparedSegment {
  const OscillatorySegment* segment;
  std::vector<double> cuts;
};

std::complex<double> segment_sum(const PreparedSegment& prep, int level) {
  const OscillatorySegment& seg = *prep.segment;
  const GaussRule& rule = gauss_legendre(kPanelOrder);
  const int sub = 1 << level;
  std::complex<double> total{0.0, 0.0};
  for (std::size_t p = 0; p + 1 < prep.cuts.size(); ++p) {
    const double a = prep.cuts[p];
    const double h = (prep.cuts[p + 1] - a) / sub;
    for (int s = 0; s < sub; ++s) {
      const double left = a + s * h;
      std::complex<double> panel{0.0, 0.0};
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const double xi = left + 0.5 * h * (rule.nodes[i] + 1.0);
        double w = rule.weights[i];
        if (seg.weight) w *= seg.weight(xi);
        panel += w * unit_phase(seg.phase.value(xi));
      }
      total += 0.5 * h * panel;
    }
  }
  return seg.amplitude * total;
}

double segment_mass(const PreparedSegment& prep) {
  const OscillatorySegment& seg = *prep.segment;
  if (!seg.weight) return std::abs(seg.amplitude) * (seg.hi - seg.lo);
  const GaussRule& rule = gauss_legendre(kPanelOrder);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < prep.cuts.size(); ++p) {
    const double a = prep.cuts[p];
    const double h = prep.cuts[p + 1] - a;
    for (std::size_t i = 0; i < rule.size(); ++i)
      total += 0.5 * h * rule.weights[i] * std::abs(seg.weight(a + 0.5 * h * (rule.nodes[i] + 1.0)));
  }
  return std::abs(seg.amplitude) * total;
}

// Rectangle of a dimension-2 band with its uniform base panel counts.
struct PreparedRectangle {
  PhaseModel phase;
  Band band;
  std::array<std::size_t, 2> panels{1, 1};
};

// With only quadratic radial terms the phase splits into one-dimensional pieces and the
// tensor rule factors into a product of two composite sums.
bool separable(const PhaseModel& pm) {
  for (int k = 0; k < pm.radial_count; ++k)
    if (pm.radial[k].exponent != 2.0) return false;
  return true;
}

std::complex<double> axis_sum(const PhaseModel& pm, double lo, double h, std::size_t panels, int axis) {
  const GaussRule& rule = gauss_legendre(kPanelOrder);
  double quad = 0.0;
  for (int k = 0; k < pm.radial_count; ++k) quad += pm.radial[k].coef;
  std::complex<double> total{0.0, 0.0};
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = lo + static_cast<double>(p) * h;
    std::complex<double> panel{0.0, 0.0};
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double xi = a + 0.5 * h * (rule.nodes[i] + 1.0);
      panel += rule.weights[i] * unit_phase(pm.linear[axis] * xi + quad * xi * xi);
    }
    total += 0.5 * h * panel;
  }
  return total;
}

std::complex<double> rectangle_sum(const PreparedRectangle& rect, int level) {
  const GaussRule& rule = gauss_legendre(kPanelOrder);
  const std::size_t n0 = rect.panels[0] << level;
  const std::size_t n1 = rect.panels[1] << level;
  const double h0 = (rect.band.hi[0] - rect.band.lo[0]) / static_cast<double>(n0);
  const double h1 = (rect.band.hi[1] - rect.band.lo[1]) / static_cast<double>(n1);
  if (separable(rect.phase))
    return rect.band.amplitude * axis_sum(rect.phase, rect.band.lo[0], h0, n0, 0) *
           axis_sum(rect.phase, rect.band.lo[1], h1, n1, 1);
  const std::size_t order = rule.size();
  std::vector<double> x0(order), x1(order);
  std::complex<double> total{0.0, 0.0};
  for (std::size_t p = 0; p < n0; ++p) {
    const double a0 = rect.band.lo[0] + static_cast<double>(p) * h0;
    for (std::size_t i = 0; i < order; ++i) x0[i] = a0 + 0.5 * h0 * (rule.nodes[i] + 1.0);
    for (std::size_t q = 0; q < n1; ++q) {
      const double a1 = rect.band.lo[1] + static_cast<double>(q) * h1;
      for (std::size_t j = 0; j < order; ++j) x1[j] = a1 + 0.5 * h1 * (rule.nodes[j] + 1.0);
      std::complex<double> panel{0.0, 0.0};
      for (std::size_t i = 0; i < order; ++i) {
        std::complex<double> row{0.0, 0.0};
        for (std::size_t j = 0; j < order; ++j)
          row += rule.weights[j] * unit_phase(rect.phase.value(Point{x0[i], x1[j]}));
        panel += rule.weights[i] * row;
      }
      total += 0.25 * h0 * h1 * panel;
    }
  }
  return rect.band.amplitude * total;
}

double corner_radius(const Band& b) {
  const double r0 = std::max(std::abs(b.lo[0]), std::abs(b.hi[0]));
  const double r1 = std::max(std::abs(b.lo[1]), std::abs(b.hi[1]));
  return std::hypot(r0, r1);
}

std::size_t base_panels_2d(const PhaseModel& pm, const Band& b, int axis) {
  const double slope = std::abs(pm.linear[axis]) + pm.radial_slope_bound(corner_radius(b));
  const double variation = slope * (b.hi[axis] - b.lo[axis]);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(variation / kQuarterTurn)));
}

std::complex<double> evaluate_2d(const EvalRequest& req) {
  std::vector<PreparedRectangle> rects;
  double mass = 0.0;
  std::size_t base = 0;
  for (const Band& b : req.profile.bands()) {
    if (b.amplitude == 0.0) continue;
    PreparedRectangle r{band_phase(b, 2, req.position, req.t, req.m), b, {1, 1}};
    r.panels = {base_panels_2d(r.phase, b, 0), base_panels_2d(r.phase, b, 1)};
    base += r.panels[0] * r.panels[1];
    mass += b.amplitude * band_measure(b, 2);
    rects.push_back(r);
  }
  if (rects.empty()) return {0.0, 0.0};
  auto level_sum = [&](int level) {
    if ((base << (2 * level)) > req.panel_budget)
      throw Error(ErrorCode::ToleranceNotReached, "panel budget exceeded in dimension 2");
    std::complex<double> s{0.0, 0.0};
    for (const auto& r : rects) s += rectangle_sum(r, level);
    return s;
  };
  std::complex<double> previous = level_sum(0);
  for (int level = 1;; ++level) {
    const std::complex<double> current = level_sum(level);
    if (std::abs(current - previous) <= req.rel_tol * std::max(std::abs(current), mass)) return current;
    previous = current;
  }
}

double bisect_root(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int iter = 0; iter < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b)); ++iter) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

double phase_bound_1d(const EvalRequest& req) {
  double best = 0.0;
  std::vector<double> cuts;
  for (const Band& b : req.profile.bands()) {
    const PhaseModel pm = band_phase(b, 1, req.position, req.t, req.m);
    phase_cuts(pm, b.lo[0], b.hi[0], (b.hi[0] - b.lo[0]) / 64.0, req.panel_budget, cuts);
    auto dphi = [&](double xi) { return pm.derivative(xi); };
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      best = std::max(best, std::abs(pm.value(cuts[i])));
      if (i + 1 == cuts.size()) break;
      const double da = dphi(cuts[i]);
      const double db = dphi(cuts[i + 1]);
      if ((da < 0.0) != (db < 0.0) && da != 0.0 && db != 0.0) {
        const double root = bisect_root(dphi, cuts[i], cuts[i + 1]);
        best = std::max(best, std::abs(pm.value(root)));
      }
    }
  }
  return best;
}

double phase_bound_2d(const EvalRequest& req) {
  double best = 0.0;
  for (const Band& b : req.profile.bands()) {
    const PhaseModel pm = band_phase(b, 2, req.position, req.t, req.m);
    std::array<std::vector<double>, 2> lattice;
    for (int axis = 0; axis < 2; ++axis) {
      const std::size_t n = std::clamp<std::size_t>(base_panels_2d(pm, b, axis), 16, 2048);
      for (std::size_t i = 0; i <= n; ++i)
        lattice[axis].push_back(b.lo[axis] + (b.hi[axis] - b.lo[axis]) * static_cast<double>(i) / static_cast<double>(n));
    }
    for (double u : lattice[0])
      for (double v : lattice[1]) best = std::max(best, std::abs(pm.value(Point{u, v})));
    // critical points along lattice lines
    for (int axis = 0; axis < 2; ++axis) {
      const int other = 1 - axis;
      for (double fixed : lattice[other]) {
        auto along = [&](double s) {
          Point xi{};
          xi[axis] = s;
          xi[other] = fixed;
          return xi;
        };
        auto d = [&](double s) { return pm.partial(along(s), axis); };
        const auto& line = lattice[axis];
        for (std::size_t i = 0; i + 1 < line.size(); ++i) {
          const double da = d(line[i]);
          const double db = d(line[i + 1]);
          if ((da < 0.0) != (db < 0.0) && da != 0.0 && db != 0.0)
            best = std::max(best, std::abs(pm.value(along(bisect_root(d, line[i], line[i + 1])))));
        }
      }
    }
    // interior critical points lie on the line through the origin parallel to the linear part
    const double plen = std::hypot(pm.linear[0], pm.linear[1]);
    if (plen > 0.0 && pm.radial_count > 0) {
      const double rho_max = corner_radius(b);
      for (double sign : {-1.0, 1.0}) {
        const Point u{sign * pm.linear[0] / plen, sign * pm.linear[1] / plen};
        auto g = [&](double rho) {
          double slope = sign * plen;
          for (int k = 0; k < pm.radial_count; ++k)
            slope += pm.radial[k].coef * pm.radial[k].exponent * power(rho, pm.radial[k].exponent - 1.0);
          return slope;
        };
        constexpr int kPieces = 64;
        for (int i = 0; i < kPieces; ++i) {
          const double r0 = rho_max * i / kPieces;
          const double r1 = rho_max * (i + 1) / kPieces;
          const double g0 = g(r0), g1 = g(r1);
          if ((g0 < 0.0) == (g1 < 0.0) || g0 == 0.0 || g1 == 0.0) continue;
          const double rho = bisect_root(g, r0, r1);
          const Point xi{rho * u[0], rho * u[1]};
          if (xi[0] >= b.lo[0] && xi[0] <= b.hi[0] && xi[1] >= b.lo[1] && xi[1] <= b.hi[1])
            best = std::max(best, std::abs(pm.value(xi)));
        }
      }
    }
  }
  return best;
}

// ∫ over one half-line piece of a 1-D band when Φ′ is monotone and sign-definite.
double nonstationary_piece_bound(const PhaseModel& pm, double a, double b) {
  const double da = pm.derivative(a);
  const double db = pm.derivative(b);
  if ((da < 0.0) != (db < 0.0) || da == 0.0 || db == 0.0) return b - a;
  const double g = std::min(std::abs(da), std::abs(db));
  return std::min(b - a, 2.0 / g);
}

double band_bound_1d(const Band& band, const PhaseModel& pm) {
  const double len = band.hi[0] - band.lo[0];
  if (!pm.radial_single_signed()) return band.amplitude * len;
  double bound = 0.0;
  if (band.lo[0] < 0.0) bound += nonstationary_piece_bound(pm, band.lo[0], std::min(band.hi[0], 0.0));
  if (band.hi[0] > 0.0) bound += nonstationary_piece_bound(pm, std::max(band.lo[0], 0.0), band.hi[0]);
  return band.amplitude * std::min(bound, len);
}

double band_bound_2d(const Band& band, const PhaseModel& pm) {
  const double mass = band_measure(band, 2);
  if (!pm.radial_single_signed()) return band.amplitude * mass;
  for (int axis = 0; axis < 2; ++axis)
    if (band.lo[axis] < 0.0 && band.hi[axis] > 0.0) return band.amplitude * mass;
  double best = mass;
  for (int axis = 0; axis < 2; ++axis) {
    const int other = 1 - axis;
    // ∂_axis Φ is monotone in each coordinate on a closed quadrant, so its extremes sit at corners.
    double lo_abs = std::numeric_limits<double>::infinity();
    bool negative = false, positive = false;
    for (double u : {band.lo[0], band.hi[0]})
      for (double v : {band.lo[1], band.hi[1]}) {
        const double d = pm.partial(Point{u, v}, axis);
        negative |= d <= 0.0;
        positive |= d >= 0.0;
        lo_abs = std::min(lo_abs, std::abs(d));
      }
    if (negative && positive) continue;
    const double len = band.hi[axis] - band.lo[axis];
    const double width = band.hi[other] - band.lo[other];
    best = std::min(best, width * std::min(len, 2.0 / lo_abs));
  }
  return band.amplitude * best;
}

}  // namespace

void PhaseModel::add_linear(const Point& b) noexcept {
  linear[0] += b[0];
  linear[1] += b[1];
}

void PhaseModel::add_power(double coef, double exponent) noexcept {
  if (coef == 0.0) return;
  for (int k = 0; k < radial_count; ++k) {
    if (radial[k].exponent == exponent) {
      radial[k].coef += coef;
      if (radial[k].coef == 0.0) {
        radial[k] = radial[radial_count - 1];
        --radial_count;
      }
      return;
    }
  }
  radial[radial_count++] = PowerTerm{coef, exponent};
}

double PhaseModel::value(double xi) const noexcept {
  double phi = linear[0] * xi;
  const double rho = std::abs(xi);
  for (int k = 0; k < radial_count; ++k) phi += radial[k].coef * power(rho, radial[k].exponent);
  return phi;
}

double PhaseModel::value(const Point& xi) const noexcept {
  double phi = linear[0] * xi[0] + linear[1] * xi[1];
  const double rho2 = xi[0] * xi[0] + xi[1] * xi[1];
  for (int k = 0; k < radial_count; ++k) phi += radial[k].coef * power_from_square(rho2, radial[k].exponent);
  return phi;
}

double PhaseModel::derivative(double xi) const noexcept {
  double d = linear[0];
  const double rho = std::abs(xi);
  const double sign = xi < 0.0 ? -1.0 : 1.0;
  for (int k = 0; k < radial_count; ++k)
    d += sign * radial[k].coef * radial[k].exponent * power(rho, radial[k].exponent - 1.0);
  return d;
}

double PhaseModel::partial(const Point& xi, int axis) const noexcept {
  double d = linear[axis];
  const double rho2 = xi[0] * xi[0] + xi[1] * xi[1];
  if (rho2 == 0.0) return d;
  for (int k = 0; k < radial_count; ++k)
    d += radial[k].coef * radial[k].exponent * power_from_square(rho2, radial[k].exponent - 2.0) * xi[axis];
  return d;
}

double PhaseModel::radial_slope_bound(double rho) const noexcept {
  double s = 0.0;
  for (int k = 0; k < radial_count; ++k)
    s += std::abs(radial[k].coef) * radial[k].exponent * power(rho, radial[k].exponent - 1.0);
  return s;
}

bool PhaseModel::radial_single_signed() const noexcept {
  bool pos = false, neg = false;
  for (int k = 0; k < radial_count; ++k) {
    pos |= radial[k].coef > 0.0;
    neg |= radial[k].coef < 0.0;
  }
  return !(pos && neg);
}

PhaseModel PhaseModel::negated() const noexcept {
  PhaseModel out = *this;
  out.linear = {-linear[0], -linear[1]};
  for (int k = 0; k < radial_count; ++k) out.radial[k].coef = -radial[k].coef;
  return out;
}

PhaseModel band_phase(const Band& band, int dimension, const Point& position, double t, double m) {
  PhaseModel pm;
  pm.dimension = dimension;
  pm.add_linear(dimension == 1 ? Point{position[0], 0.0} : position);
  pm.add_power(t, m);
  std::visit(
      [&](const auto& twist) {
        using T = std::decay_t<decltype(twist)>;
        if constexpr (std::is_same_v<T, NegativeDispersion>) {
          pm.add_power(-1.0, twist.m);
        } else if constexpr (std::is_same_v<T, LinearTwist>) {
          pm.add_linear(dimension == 1 ? Point{twist.c, 0.0} : Point{twist.c, twist.c});
        }
      },
      band.phase);
  return pm;
}

std::complex<double> integrate_oscillatory(std::span<const OscillatorySegment> segments, double rel_tol,
                                           std::size_t panel_budget) {
  std::vector<PreparedSegment> prepared;
  prepared.reserve(segments.size());
  std::size_t base = 0;
  double mass = 0.0;
  for (const OscillatorySegment& seg : segments) {
    if (seg.amplitude == 0.0 || !(seg.lo < seg.hi)) continue;
    PreparedSegment prep{&seg, {}};
    phase_cuts(seg.phase, seg.lo, seg.hi, seg.max_panel_width, panel_budget, prep.cuts);
    base += prep.cuts.size() - 1;
    mass += segment_mass(prep);
    prepared.push_back(std::move(prep));
  }
  if (prepared.empty()) return {0.0, 0.0};
  auto level_sum = [&](int level) {
    if ((base << level) > panel_budget) throw Error(ErrorCode::ToleranceNotReached, "panel budget exceeded");
    std::complex<double> s{0.0, 0.0};
    for (const auto& p : prepared) s += segment_sum(p, level);
    return s;
  };
  std::complex<double> previous = level_sum(0);
  for (int level = 1;; ++level) {
    const std::complex<double> current = level_sum(level);
    if (std::abs(current - previous) <= rel_tol * std::max(std::abs(current), mass)) return current;
    previous = current;
  }
}

std::complex<double> evaluate(const EvalRequest& req) {
  check_request(req);
  const int d = req.profile.dimension();
  if (d == 2) return evaluate_2d(req) / (kTwoPi * kTwoPi);
  std::vector<OscillatorySegment> segments;
  segments.reserve(req.profile.bands().size());
  for (const Band& b : req.profile.bands()) {
    OscillatorySegment seg;
    seg.phase = band_phase(b, 1, req.position, req.t, req.m);
    seg.lo = b.lo[0];
    seg.hi = b.hi[0];
    seg.amplitude = b.amplitude;
    segments.push_back(std::move(seg));
  }
  return integrate_oscillatory(segments, req.rel_tol, req.panel_budget) / kTwoPi;
}

std::complex<double> evaluate_oracle(const EvalRequest& req, std::size_t nodes) {
  check_request(req);
  if (nodes < (std::size_t{1} << 10)) throw Error(ErrorCode::InvalidRequest, "oracle needs at least 2^10 nodes");
  const int d = req.profile.dimension();
  std::complex<double> total{0.0, 0.0};
  const double n = static_cast<double>(nodes);
  for (const Band& b : req.profile.bands()) {
    const PhaseModel pm = band_phase(b, d, req.position, req.t, req.m);
    if (d == 1) {
      const double h = (b.hi[0] - b.lo[0]) / n;
      std::complex<double> sum{0.0, 0.0};
      for (std::size_t j = 0; j < nodes; ++j)
        sum += unit_phase(pm.value(b.lo[0] + (static_cast<double>(j) + 0.5) * h));
      total += b.amplitude * h * sum;
    } else {
      const double h0 = (b.hi[0] - b.lo[0]) / n;
      const double h1 = (b.hi[1] - b.lo[1]) / n;
      std::complex<double> sum{0.0, 0.0};
      for (std::size_t i = 0; i < nodes; ++i) {
        const double u = b.lo[0] + (static_cast<double>(i) + 0.5) * h0;
        for (std::size_t j = 0; j < nodes; ++j)
          sum += unit_phase(pm.value(Point{u, b.lo[1] + (static_cast<double>(j) + 0.5) * h1}));
      }
      total += b.amplitude * h0 * h1 * sum;
    }
  }
  return total / std::pow(kTwoPi, d);
}

double phase_bound(const EvalRequest& req) {
  check_request(req);
  return req.profile.dimension() == 1 ? phase_bound_1d(req) : phase_bound_2d(req);
}

double magnitude_trivial_bound(const SpectralProfile& profile) {
  return profile.total_mass() / std::pow(kTwoPi, profile.dimension());
}

double magnitude_upper_bound(const EvalRequest& req) {
  const int d = req.profile.dimension();
  double bound = 0.0;
  for (const Band& b : req.profile.bands()) {
    if (b.amplitude == 0.0) continue;
    const PhaseModel pm = band_phase(b, d, req.position, req.t, req.m);
    bound += d == 1 ? band_bound_1d(b, pm) : band_bound_2d(b, pm);
  }
  return bound / std::pow(kTwoPi, d);
}

std::vector<std::complex<double>> evaluate_bands(const EvalRequest& req) {
  check_request(req);
  if (req.profile.dimension() != 1) throw Error(ErrorCode::InvalidRequest, "band decomposition is one-dimensional");
  std::vector<std::complex<double>> out;
  out.reserve(req.profile.bands().size());
  for (const Band& b : req.profile.bands()) {
    OscillatorySegment seg;
    seg.phase = band_phase(b, 1, req.position, req.t, req.m);
    seg.lo = b.lo[0];
    seg.hi = b.hi[0];
    out.push_back(integrate_oscillatory(std::span<const OscillatorySegment>(&seg, 1), req.rel_tol, req.panel_budget) /
                  kTwoPi);
  }
  return out;
}

std::vector<double> band_bounds(const EvalRequest& req) {
  const int d = req.profile.dimension();
  const double scale = 1.0 / std::pow(kTwoPi, d);
  std::vector<double> out;
  out.reserve(req.profile.bands().size());
  for (Band b : req.profile.bands()) {
    b.amplitude = 1.0;
    const PhaseModel pm = band_phase(b, d, req.position, req.t, req.m);
    out.push_back(scale * (d == 1 ? band_bound_1d(b, pm) : band_bound_2d(b, pm)));
  }
  return out;
}

}  // namespace oscimax
