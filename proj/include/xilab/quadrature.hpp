#ifndef XILAB_QUADRATURE_HPP
#define XILAB_QUADRATURE_HPP

// Gauss-Legendre rules at arbitrary precision, computed by Newton iteration
// on the Legendre recurrence and cached per (order, precision).

#include "xilab/complex.hpp"
#include "xilab/precision.hpp"

#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace xilab {

// Nodes and weights on [-1, 1], nodes ascending.
struct GaussRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
  std::size_t size() const noexcept { return nodes.size(); }
};

namespace detail {

// P_n(x) and P_n'(x).
inline std::pair<Real, Real> legendre_with_derivative(int n, const Real& x) {
  Real p0 = 1;
  Real p1 = x;
  for (int k = 2; k <= n; ++k) {
    Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = std::move(p1);
    p1 = std::move(p2);
  }
  Real dp = n * (x * p1 - p0) / (x * x - 1);
  return {p1, dp};
}

inline GaussRule compute_gauss_legendre(int n, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const Real tol = pow(Real(10), -(ctx.working_digits() + 2));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi's initial guess for the i-th largest root.
    Real x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    Real dp;
    for (int iter = 0; iter < 100; ++iter) {
      auto [p, d] = legendre_with_derivative(n, x);
      Real dx = p / d;
      x -= dx;
      dp = std::move(d);
      if (abs(dx) < tol) break;
    }
    dp = legendre_with_derivative(n, x).second;
    Real w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0;
  return rule;
}

}  // namespace detail

inline const GaussRule& gauss_legendre(int n, const PrecisionContext& ctx) {
  thread_local std::map<std::pair<int, int>, GaussRule> cache;
  const auto key = std::make_pair(n, ctx.working_digits());
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, detail::compute_gauss_legendre(n, ctx)).first;
  return it->second;
}

// Gauss order used for panels on which the integrand varies by O(1) at most
// a few times over the panel (sub-period oscillation, analytic width well
// beyond the panel).
inline int panel_gauss_order(const PrecisionContext& ctx) {
  return static_cast<int>(std::ceil(0.6 * ctx.working_digits())) + 4;
}

// Gauss order for integrating xi along panels of length <= 1/4, where xi
// behaves like exp(a w) with |a| of order log|s|.
inline int path_gauss_order(const PrecisionContext& ctx) {
  return static_cast<int>(std::ceil(0.3 * ctx.working_digits())) + 4;
}

// Composite Gauss-Legendre on a straight complex segment [a, b] split into
// `panels` equal pieces; f maps a point on the segment to a complex value.
template <class F>
Complex integrate_segment(F&& f, const Complex& a, const Complex& b,
                          int panels, const GaussRule& rule) {
  const Complex h = (b - a) / Real(panels);
  const Complex half = h / Real(2);
  Complex total;
  for (int p = 0; p < panels; ++p) {
    const Complex mid = a + h * Real(p) + half;
    Complex acc;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      acc += f(mid + half * rule.nodes[k]) * rule.weights[k];
    }
    total += acc;
  }
  return total * half;
}

// Real-line composite rule on [a, b].
template <class F>
Real integrate_interval(F&& f, const Real& a, const Real& b, int panels,
                        const GaussRule& rule) {
  const Real h = (b - a) / panels;
  const Real half = h / 2;
  Real total = 0;
  for (int p = 0; p < panels; ++p) {
    const Real mid = a + h * p + half;
    Real acc = 0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      acc += f(Real(mid + half * rule.nodes[k])) * rule.weights[k];
    }
    total += acc;
  }
  return total * half;
}

}  // namespace xilab

#endif  // XILAB_QUADRATURE_HPP
