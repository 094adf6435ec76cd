#pragma once

#include <functional>
#include <vector>

namespace oscimax {

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Rules are computed once per order by Newton iteration on P_n and cached.
/// Orders 1..64 are supported.
const GaussRule& gauss_legendre(int order);

/// Order used by every oscillatory panel in the propagator.
inline constexpr int kPanelOrder = 16;

/// Composite order-16 rule on [a,b] with 2^level equal panels, doubling until two
/// successive levels agree to rel_tol relative to ∫|f|. Meant for smooth integrands.
double integrate_smooth(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-13,
                        int max_level = 14);

}  // namespace oscimax
