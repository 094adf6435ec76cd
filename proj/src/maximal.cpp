#include "oscimax/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>

#include "oscimax/error.hpp"
#include "oscimax/gauss.hpp"
#include "oscimax/parallel.hpp"

namespace oscimax {
namespace {

struct AxisNode {
  double x;
  double w;
};

// Nodes for ∫_a^b g dμ along one axis; α < 1 uses u = |x|^α so constants are exact.
void axis_nodes(double a, double b, double alpha, int n, std::vector<AxisNode>& out) {
  const GaussRule& rule = gauss_legendre(n);
  if (alpha == 1.0) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < rule.size(); ++i) out.push_back({mid + half * rule.nodes[i], half * rule.weights[i]});
    return;
  }
  if (a < 0.0 && b > 0.0) {
    axis_nodes(a, 0.0, alpha, n, out);
    axis_nodes(0.0, b, alpha, n, out);
    return;
  }
  const double sign = b <= 0.0 ? -1.0 : 1.0;
  const double lo = std::min(std::abs(a), std::abs(b));
  const double hi = std::max(std::abs(a), std::abs(b));
  const double u0 = std::pow(lo, alpha), u1 = std::pow(hi, alpha);
  const double mid = 0.5 * (u0 + u1), half = 0.5 * (u1 - u0);
  std::vector<AxisNode> local;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double u = mid + half * rule.nodes[i];
    local.push_back({sign * std::pow(u, 1.0 / alpha), half * rule.weights[i] / alpha});
  }
  if (sign < 0.0) std::reverse(local.begin(), local.end());
  out.insert(out.end(), local.begin(), local.end());
}

std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace

XDomain XDomain::interval(double a, double b) {
  XDomain d;
  d.cells.push_back({{a, 0.0}, {b, 0.0}});
  return d;
}

XDomain XDomain::cantor(const CantorSet& set, double sign) {
  XDomain d;
  const auto& ivs = set.intervals();
  d.cells.reserve(ivs.size());
  if (sign < 0.0) {
    for (auto it = ivs.rbegin(); it != ivs.rend(); ++it) d.cells.push_back({{-it->hi, 0.0}, {-it->lo, 0.0}});
  } else {
    for (const auto& iv : ivs) d.cells.push_back({{iv.lo, 0.0}, {iv.hi, 0.0}});
  }
  return d;
}

XDomain XDomain::with_second_axis(const XDomain& first, double a, double b) {
  XDomain d;
  d.dimension = 2;
  for (const XCell& c : first.cells) d.cells.push_back({{c.lo[0], a}, {c.hi[0], b}});
  return d;
}

void validate_spec(const MixedNormSpec& spec) {
  if (!(spec.q >= 1.0 && spec.q <= 64.0)) throw Error(ErrorCode::SpecOutOfRange, "q must lie in [1, 64]");
  validate_measure(spec.measure);
  if (spec.t_grid.coarse_size < 64) throw Error(ErrorCode::SpecOutOfRange, "coarse time grid needs ≥ 64 points");
  if (spec.t_grid.refine_levels < 0 || spec.t_grid.refine_factor < 2)
    throw Error(ErrorCode::SpecOutOfRange, "refinement needs levels ≥ 0 and factor ≥ 2");
  if (!(spec.t_grid.log_floor > 0.0 && spec.t_grid.log_floor < 1.0))
    throw Error(ErrorCode::SpecOutOfRange, "log floor must lie in (0, 1)");
  if (spec.x_nodes < 1 || spec.x_nodes > 64) throw Error(ErrorCode::SpecOutOfRange, "x_nodes must lie in [1, 64]");
  if (!(spec.t_window.lo <= spec.t_window.hi)) throw Error(ErrorCode::InvertedInterval, "time window has lo > hi");
  if (spec.x_domain.cells.empty()) throw Error(ErrorCode::InvalidParams, "empty spatial domain");
  if (spec.x_domain.dimension != 1 && spec.x_domain.dimension != 2)
    throw Error(ErrorCode::InvalidParams, "spatial dimension must be 1 or 2");
  for (const XCell& c : spec.x_domain.cells)
    for (int axis = 0; axis < spec.x_domain.dimension; ++axis)
      if (!(c.lo[axis] <= c.hi[axis])) throw Error(ErrorCode::InvertedInterval, "spatial cell has lo > hi");
}

std::vector<double> coarse_time_grid(const TimeWindow& window, const TimeGrid& grid) {
  const double lo = window.lo, hi = window.hi;
  if (lo == hi) return {lo};
  const int n = grid.coarse_size;
  if (lo > 0.0) return geometric(lo, hi, n);
  if (hi < 0.0) {
    auto g = geometric(-hi, -lo, n);
    for (double& v : g) v = -v;
    std::reverse(g.begin(), g.end());
    return g;
  }
  std::vector<double> out;
  const int half = lo < 0.0 && hi > 0.0 ? (n - 1) / 2 : n - 1;
  if (lo < 0.0) {
    auto g = geometric(-lo * grid.log_floor, -lo, half);
    for (auto it = g.rbegin(); it != g.rend(); ++it) out.push_back(-*it);
  }
  out.push_back(0.0);
  if (hi > 0.0) {
    auto g = geometric(hi * grid.log_floor, hi, half);
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

namespace {

// Grid supremum for several outputs that share every probe point. bound(req, out) and
// value(req, out) fill one entry per output; a point is skipped only when no output
// could improve on its running maximum.
template <typename BoundFn, typename ValueFn>
std::vector<double> grid_sup(const MaximalProblem& problem, const Point& x, std::size_t outputs, BoundFn&& bound,
                             ValueFn&& value) {
  const MixedNormSpec& spec = problem.spec;
  const int d = problem.profile.dimension();
  const bool line = std::holds_alternative<LineField>(problem.path);
  std::vector<std::optional<Point>> thetas;
  if (line) {
    for (const Point& p : direction_samples(std::get<LineField>(problem.path).directions, spec.interval_samples))
      thetas.emplace_back(p);
  } else {
    thetas.emplace_back(std::nullopt);
  }

  EvalRequest req;
  req.profile = problem.profile;
  req.m = problem.m;
  req.rel_tol = spec.rel_tol;
  req.panel_budget = spec.panel_budget;
  req.allow_large_2d = problem.allow_large_2d;

  std::vector<double> best(outputs, 0.0), scratch(outputs, 0.0);
  std::vector<std::optional<std::pair<std::size_t, double>>> argmax(outputs);
  auto prepare = [&](const std::optional<Point>& theta, double t) {
    req.position = path_point(problem.path, x, d, t, theta);
    req.t = t;
  };
  auto dominated = [&](const double* bounds) {
    for (std::size_t i = 0; i < outputs; ++i)
      if (best[i] == 0.0 || bounds[i] > best[i]) return false;
    return true;
  };
  // Evaluates the prepared point; grid points record their argmax.
  auto take = [&](double t, std::optional<std::size_t> slot) {
    value(req, scratch);
    for (std::size_t i = 0; i < outputs; ++i) {
      if (scratch[i] > best[i]) {
        best[i] = scratch[i];
        if (slot) argmax[i] = std::pair{*slot, t};
      }
    }
  };
  auto probe = [&](const std::optional<Point>& theta, double t, std::optional<std::size_t> slot) {
    prepare(theta, t);
    bound(req, scratch);
    if (!dominated(scratch.data())) take(t, slot);
  };

  if (problem.witness) {
    for (const Witness& w : problem.witness(x))
      probe(line ? std::optional<Point>(w.theta) : std::nullopt, w.t, std::nullopt);
  }

  // Coarse points go in order of decreasing bound so that the running maximum
  // rises early and prunes the rest; the grid maximum does not depend on the order.
  const std::vector<double> grid = coarse_time_grid(spec.t_window, spec.t_grid);
  const std::size_t count = thetas.size() * grid.size();
  std::vector<double> bounds(count * outputs);
  std::vector<std::pair<double, std::size_t>> order(count);
  for (std::size_t n = 0; n < count; ++n) {
    prepare(thetas[n / grid.size()], grid[n % grid.size()]);
    bound(req, scratch);
    std::copy(scratch.begin(), scratch.end(), bounds.begin() + static_cast<std::ptrdiff_t>(n * outputs));
    order[n] = {-*std::max_element(scratch.begin(), scratch.end()), n};
  }
  std::sort(order.begin(), order.end());
  for (const auto& [key, n] : order) {
    if (dominated(&bounds[n * outputs])) continue;
    const std::size_t ti = n / grid.size();
    const double t = grid[n % grid.size()];
    prepare(thetas[ti], t);
    take(t, ti);
  }

  std::map<std::size_t, std::vector<double>> refined;
  for (int level = 0; level < spec.t_grid.refine_levels && grid.size() > 1; ++level) {
    std::vector<std::pair<std::size_t, double>> centers;
    for (const auto& a : argmax)
      if (a && std::find(centers.begin(), centers.end(), *a) == centers.end()) centers.push_back(*a);
    if (centers.empty()) break;
    for (const auto& [ti, tstar] : centers) {
      std::vector<double> times = grid;
      auto& extra = refined[ti];
      times.insert(times.end(), extra.begin(), extra.end());
      std::sort(times.begin(), times.end());
      const auto it = std::lower_bound(times.begin(), times.end(), tstar);
      const double left = it == times.begin() ? *it : *std::prev(it);
      const auto next = std::next(it);
      const double right = next == times.end() ? *it : *next;
      const int pieces = 2 * spec.t_grid.refine_factor;
      for (int j = 1; j < pieces; ++j) {
        const double t = left + (right - left) * j / pieces;
        if (std::binary_search(times.begin(), times.end(), t)) continue;
        extra.push_back(t);
        probe(thetas[ti], t, ti);
      }
    }
  }
  return best;
}

void check_family(std::span<const SpectralProfile> family) {
  if (family.empty()) throw Error(ErrorCode::EmptyProfile, "empty profile family");
  const auto head = family.front().bands();
  if (family.front().dimension() != 1) throw Error(ErrorCode::InvalidParams, "profile families are one-dimensional");
  for (const SpectralProfile& p : family) {
    const auto bands = p.bands();
    if (p.dimension() != 1 || bands.size() != head.size())
      throw Error(ErrorCode::InvalidParams, "profile family members must share band supports");
    for (std::size_t j = 0; j < bands.size(); ++j)
      if (bands[j].lo != head[j].lo || bands[j].hi != head[j].hi || bands[j].phase.index() != head[j].phase.index())
        throw Error(ErrorCode::InvalidParams, "profile family members must share band supports");
  }
}

double reduce_norm(const std::vector<NormNode>& nodes, double q) {
  double scale = 0.0;
  for (const NormNode& n : nodes) scale = std::max(scale, std::abs(n.value));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (const NormNode& n : nodes) sum += n.weight * std::pow(std::abs(n.value) / scale, q);
  return scale * std::pow(sum, 1.0 / q);
}

void check_problem(const MaximalProblem& problem) {
  validate_spec(problem.spec);
  validate_path(problem.path);
  if (problem.spec.x_domain.dimension != problem.profile.dimension())
    throw Error(ErrorCode::InvalidParams, "spatial domain and profile dimensions differ");
}

}  // namespace

double maximal_in_time(const MaximalProblem& problem, const Point& x) {
  auto bound = [](const EvalRequest& req, std::vector<double>& out) { out[0] = magnitude_upper_bound(req); };
  auto value = [](const EvalRequest& req, std::vector<double>& out) { out[0] = std::abs(evaluate(req)); };
  return grid_sup(problem, x, 1, bound, value).front();
}

std::vector<double> maximal_in_time_family(const MaximalProblem& problem, std::span<const SpectralProfile> family,
                                           const Point& x) {
  check_family(family);
  const std::size_t bands = family.front().bands().size();
  std::vector<double> amps(family.size() * bands);
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = 0; j < bands; ++j) amps[i * bands + j] = family[i].bands()[j].amplitude;
  MaximalProblem shared = problem;
  shared.profile = family.front();
  auto bound = [&](const EvalRequest& req, std::vector<double>& out) {
    const std::vector<double> b = band_bounds(req);
    for (std::size_t i = 0; i < family.size(); ++i) {
      double total = 0.0;
      for (std::size_t j = 0; j < bands; ++j) total += amps[i * bands + j] * b[j];
      out[i] = total;
    }
  };
  auto value = [&](const EvalRequest& req, std::vector<double>& out) {
    const std::vector<std::complex<double>> pieces = evaluate_bands(req);
    for (std::size_t i = 0; i < family.size(); ++i) {
      std::complex<double> total{0.0, 0.0};
      for (std::size_t j = 0; j < bands; ++j) total += amps[i * bands + j] * pieces[j];
      out[i] = std::abs(total);
    }
  };
  return grid_sup(shared, x, family.size(), bound, value);
}

std::vector<NormNode> quadrature_nodes(const XDomain& domain, const AlphaMeasure& measure, int x_nodes) {
  validate_measure(measure);
  if (x_nodes < 1 || x_nodes > 64) throw Error(ErrorCode::SpecOutOfRange, "x_nodes must lie in [1, 64]");
  std::vector<NormNode> nodes;
  std::vector<AxisNode> first, second;
  for (const XCell& c : domain.cells) {
    first.clear();
    axis_nodes(c.lo[0], c.hi[0], measure.alpha, x_nodes, first);
    if (domain.dimension == 1) {
      for (const AxisNode& n : first) nodes.push_back({{n.x, 0.0}, n.w, 0.0});
      continue;
    }
    second.clear();
    axis_nodes(c.lo[1], c.hi[1], 1.0, x_nodes, second);
    for (const AxisNode& a : first)
      for (const AxisNode& b : second) nodes.push_back({{a.x, b.x}, a.w * b.w, 0.0});
  }
  return nodes;
}

MixedNormResult mixed_norm_of(const XDomain& domain, const AlphaMeasure& measure, double q, int x_nodes,
                              const std::function<double(const Point&)>& integrand, int threads) {
  if (!(q >= 1.0 && q <= 64.0)) throw Error(ErrorCode::SpecOutOfRange, "q must lie in [1, 64]");
  MixedNormResult result;
  result.nodes = quadrature_nodes(domain, measure, x_nodes);
  parallel_for(result.nodes.size(), threads, [&](std::size_t i) { result.nodes[i].value = integrand(result.nodes[i].x); });
  result.norm = reduce_norm(result.nodes, q);
  return result;
}

MixedNormResult mixed_norm_detail(const MaximalProblem& problem) {
  check_problem(problem);
  return mixed_norm_of(problem.spec.x_domain, problem.spec.measure, problem.spec.q, problem.spec.x_nodes,
                       [&](const Point& x) { return maximal_in_time(problem, x); }, problem.spec.threads);
}

std::vector<MixedNormResult> mixed_norm_family(const MaximalProblem& problem, std::span<const SpectralProfile> family) {
  check_family(family);
  MaximalProblem shared = problem;
  shared.profile = family.front();
  check_problem(shared);
  const MixedNormSpec& spec = problem.spec;
  const std::vector<NormNode> nodes = quadrature_nodes(spec.x_domain, spec.measure, spec.x_nodes);
  std::vector<std::vector<double>> values(nodes.size());
  parallel_for(nodes.size(), spec.threads,
               [&](std::size_t i) { values[i] = maximal_in_time_family(shared, family, nodes[i].x); });
  std::vector<MixedNormResult> out(family.size());
  for (std::size_t f = 0; f < family.size(); ++f) {
    out[f].nodes = nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i) out[f].nodes[i].value = values[i][f];
    out[f].norm = reduce_norm(out[f].nodes, spec.q);
  }
  return out;
}

double mixed_norm(const MaximalProblem& problem) { return mixed_norm_detail(problem).norm; }

double domain_measure(const XDomain& domain, const AlphaMeasure& measure) {
  double total = 0.0;
  for (const XCell& c : domain.cells) {
    double m = alpha_measure_of(measure, c.lo[0], c.hi[0]);
    if (domain.dimension == 2) m *= c.hi[1] - c.lo[1];
    total += m;
  }
  return total;
}

}  // namespace oscimax
