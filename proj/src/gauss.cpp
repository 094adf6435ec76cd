#include "oscimax/gauss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace oscimax {
namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  if (n == 1) {
    rule.weights[0] = 2.0;
    return rule;
  }
  // Legendre P_n and its derivative at x via the three-term recurrence.
  auto legendre = [n](double x, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  for (int i = 0; i < n / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    double dp = 0.0;
    legendre(0.0, dp);
    rule.weights[n / 2] = 2.0 / (dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 64) throw std::out_of_range("gauss_legendre: order must be in [1, 64]");
  static std::array<GaussRule, 65> rules;
  static std::array<std::once_flag, 65> flags;
  std::call_once(flags[order], [order] { rules[order] = build_rule(order); });
  return rules[order];
}

double integrate_smooth(const std::function<double(double)>& f, double a, double b, double rel_tol,
                        int max_level) {
  if (!(b > a)) return 0.0;
  const GaussRule& rule = gauss_legendre(kPanelOrder);
  auto level_sum = [&](int level, double& mass) {
    const int panels = 1 << level;
    const double h = (b - a) / panels;
    double total = 0.0;
    mass = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double left = a + p * h;
      double panel = 0.0, panel_mass = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const double v = f(left + 0.5 * h * (rule.nodes[i] + 1.0));
        panel += rule.weights[i] * v;
        panel_mass += rule.weights[i] * std::abs(v);
      }
      total += 0.5 * h * panel;
      mass += 0.5 * h * panel_mass;
    }
    return total;
  };
  double mass = 0.0;
  double previous = level_sum(0, mass);
  for (int level = 1; level <= max_level; ++level) {
    const double current = level_sum(level, mass);
    if (std::abs(current - previous) <= rel_tol * std::max(std::abs(current), mass)) return current;
    previous = current;
  }
  return previous;
}

}  // namespace oscimax
