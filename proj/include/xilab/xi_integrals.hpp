#ifndef XILAB_XI_INTEGRALS_HPP
#define XILAB_XI_INTEGRALS_HPP

// The Fourier-integral family
//
//   Xi_lambda^(m)(z) = 2 int_0^inf e^{lambda u^2} w_m(u) Phi(u) osc_m(zu) du
//
// with (w_m, osc_m) = (u^{2n}, (-1)^n cos) for m = 2n and
// (u^{2n-1}, (-1)^n sin) for m = 2n - 1, so m = -1 is the integral member
// with weight 1/u.  Each member is the z-derivative of the previous one.
//
// Also the path integral xi^(-1)(s) = alpha0 + int_{1/2}^s xi(w) dw, the
// Taylor coefficients c_{2j} and the limit constant A0 = pi Phi(0).

#include "xilab/complex.hpp"
#include "xilab/precision.hpp"
#include "xilab/quadrature.hpp"
#include "xilab/special_functions.hpp"
#include "xilab/xi_core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace xilab {

inline constexpr int kMaxTaylorIndex = 64;

// Largest |Im z| accepted by the Fourier route (e).
inline constexpr double kFourierImLimit = 2.718281828459045;

struct QuadraturePlan {
  Real u_max;
  std::vector<std::pair<Real, Real>> panels;
  int nodes_per_panel = 0;
  Real tail_bound;

  // Equal panels over [0, u_max]; the count is a power of two so that plans
  // for nearby |z| coincide and can be shared.
  static QuadraturePlan make(const PhiKernel& kernel, double z_abs,
                             const PrecisionContext& ctx) {
    PrecisionScope scope(ctx);
    QuadraturePlan plan;
    plan.u_max = Real(kernel.u_max);
    double width = 1.0 / (8 + std::abs(kernel.m));
    if (z_abs > 1) width = std::min(width, M_PI / z_abs);
    const int needed = static_cast<int>(std::ceil(kernel.u_max / width));
    int count = 1;
    while (count < needed) count *= 2;
    const Real h = plan.u_max / count;
    plan.panels.reserve(count);
    for (int p = 0; p < count; ++p)
      plan.panels.emplace_back(h * p, p + 1 == count ? plan.u_max : h * (p + 1));
    plan.nodes_per_panel = panel_gauss_order(ctx);
    plan.tail_bound = pow(Real(10), -(ctx.digits() + 10));
    return plan;
  }

  int panel_count() const { return static_cast<int>(panels.size()); }
};

// Kernel values at the quadrature nodes for one (m, lambda, plan); evaluating
// a member at z is then a weighted exponential sum.
class FamilyEvaluator {
 public:
  FamilyEvaluator(int m, const Real& lambda, double z_abs_max, double im_bound,
                  const PrecisionContext& ctx)
      : m_(m), ctx_(ctx) {
    if (m < -1) throw DomainError("xi_family: m must be >= -1");
    PrecisionScope scope(ctx);
    lambda_ = at_precision(lambda, ctx);
    kernel_ = PhiKernel::make(lambda_, m, im_bound, ctx);
    plan_ = QuadraturePlan::make(kernel_, z_abs_max, ctx);
    const GaussRule& rule = gauss_legendre(plan_.nodes_per_panel, ctx);
    const int count = plan_.panel_count();
    const int n = static_cast<int>(rule.size());
    h_ = plan_.u_max / count;
    const Real half = h_ / 2;
    offsets_.resize(n);
    for (int k = 0; k < n; ++k) offsets_[k] = half * rule.nodes[k];
    // (-1)^{ceil(m/2)}
    const int sign = ((m + 1) / 2) % 2 == 0 ? 1 : -1;
    weights_.resize(static_cast<std::size_t>(count) * n);
    for (int p = 0; p < count; ++p) {
      const Real mid = h_ * p + half;
      for (int k = 0; k < n; ++k) {
        const Real u = mid + offsets_[k];
        Real w = 2 * sign * half * rule.weights[k] * phi(u, ctx);
        if (lambda_ != 0) w *= exp(lambda_ * u * u);
        if (m == -1) {
          w /= u;
        } else if (m > 0) {
          w *= pow(u, m);
        }
        weights_[static_cast<std::size_t>(p) * n + k] = std::move(w);
      }
    }
  }

  // Member m at z.  The oscillatory factor is assembled from
  // e^{i z u} = e^{i z mid_p} e^{i z offset_k}, the first by recurrence over
  // panels and the second once per node offset.
  Complex operator()(const ComplexPoint& z_in) const {
    PrecisionScope scope(ctx_);
    const Complex z(at_precision(z_in.re, ctx_), at_precision(z_in.im, ctx_));
    const bool real_z = z.im == 0;
    const Complex plus = sum_exp(z);
    if (real_z) {
      // e^{-izu} = conj(e^{izu})
      return m_ % 2 == 0 ? Complex(plus.re) : Complex(plus.im);
    }
    const Complex minus = sum_exp(-z);
    if (m_ % 2 == 0) return (plus + minus) / Real(2);
    // (A - B) / 2i
    const Complex d = (plus - minus) / Real(2);
    return Complex(d.im, -d.re);
  }

  const QuadraturePlan& plan() const { return plan_; }
  const PhiKernel& kernel() const { return kernel_; }

 private:
  // sum_{p,k} K_pk e^{i z u_pk}
  Complex sum_exp(const Complex& z) const {
    const int count = plan_.panel_count();
    const int n = static_cast<int>(offsets_.size());
    const Complex iz = times_i(z);
    std::vector<Complex> inner(n);
    const Complex step = exp(iz * h_);
    Complex e_mid;
    for (int p = 0; p < count; ++p) {
      // Restart the recurrence now and then to cap rounding growth.
      if (p % 64 == 0) {
        e_mid = exp(iz * (h_ * p + h_ / 2));
      } else {
        e_mid *= step;
      }
      const Real* row = &weights_[static_cast<std::size_t>(p) * n];
      for (int k = 0; k < n; ++k) {
        inner[k].re += row[k] * e_mid.re;
        inner[k].im += row[k] * e_mid.im;
      }
    }
    Complex total;
    for (int k = 0; k < n; ++k) total += inner[k] * exp(iz * offsets_[k]);
    return total;
  }

  int m_;
  PrecisionContext ctx_;
  Real lambda_;
  PhiKernel kernel_;
  QuadraturePlan plan_;
  Real h_;
  std::vector<Real> offsets_;
  std::vector<Real> weights_;
};

namespace detail {

inline double im_bucket(const Real& im) {
  return std::ceil(std::abs(to_double(im)) * 4) / 4;
}

inline double z_abs_bucket(const Complex& z) {
  // Round |z| up to a power of two so plans are shared across nearby z.
  const double a = to_double(abs(z));
  if (a <= 1) return 1;
  return std::exp2(std::ceil(std::log2(a)));
}

inline std::shared_ptr<const FamilyEvaluator> family_evaluator(
    int m, const Real& lambda, double z_abs, double im_bound,
    const PrecisionContext& ctx) {
  using Key = std::tuple<int, std::string, int, int, double, double>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const FamilyEvaluator>> cache;
  const Key key{m, lambda.str(0, std::ios_base::scientific),
                ctx.working_digits(), ctx.quad_tol_exponent(), z_abs,
                im_bound};
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto made =
      std::make_shared<const FamilyEvaluator>(m, lambda, z_abs, im_bound, ctx);
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(key, std::move(made)).first->second;
}

}  // namespace detail

// Xi_lambda^(m)(z) for m >= -1 and |Im z| < e.
inline Complex xi_family(int m, const Real& lambda, const ComplexPoint& z,
                         const PrecisionContext& ctx) {
  if (m < -1) throw DomainError("xi_family: m must be >= -1");
  if (!(abs(z.im) < kFourierImLimit)) {
    throw DomainError(
        "xi_family: |Im z| must be below e; use xi_inv_path off the strip");
  }
  auto eval = detail::family_evaluator(m, lambda, detail::z_abs_bucket(z),
                                       detail::im_bucket(z.im), ctx);
  return (*eval)(z);
}

// A0 = pi Phi(0).
inline Real a0(const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  return pi_of(ctx) * phi(Real(0), ctx);
}

// A0 = (pi/2) (4 theta''(1) + 6 theta'(1)).
inline Real a0_theta_route(const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const Real one(1);
  return pi_of(ctx) / 2 * (4 * theta(one, 2, ctx) + 6 * theta(one, 1, ctx));
}

// |Xi_lambda^(-1)(t) - A0|
inline Real limit_residual(const Real& lambda, const Real& t,
                           const PrecisionContext& ctx) {
  if (t < 3) throw DomainError("limit_residual: t must be >= 3");
  PrecisionScope scope(ctx);
  return abs(xi_family(-1, lambda, Complex(t), ctx).re - a0(ctx));
}

// c_{2j} = 2 int_0^inf u^{2j} Phi(u) du, the Taylor coefficients of xi
// about 1/2 in powers of (s - 1/2)^{2j} / (2j)!.
inline Real taylor_coeff(int j, const PrecisionContext& ctx) {
  if (j < 0 || j > kMaxTaylorIndex)
    throw DomainError("taylor_coeff: j must lie in [0, 64]");
  PrecisionScope scope(ctx);
  const Real v = xi_family(2 * j, Real(0), Complex(0), ctx).re;
  return j % 2 == 0 ? v : Real(-v);
}

// int_a^b xi(w) dw over a straight segment with a fixed panel count.
inline Complex xi_segment_integral(const ComplexPoint& a, const ComplexPoint& b,
                                   int panels, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const GaussRule& rule = gauss_legendre(path_gauss_order(ctx), ctx);
  return integrate_segment([&](const Complex& w) { return xi(w, ctx); }, a, b,
                           panels, rule);
}

// int_a^b xi(w) dw with max(32, ceil(8 |b - a|)) panels, doubled until two
// successive results agree to quad_tol times the magnitude scale at b.
inline Complex xi_integral(const ComplexPoint& a, const ComplexPoint& b,
                           const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const Complex ai(at_precision(a.re, ctx), at_precision(a.im, ctx));
  const Complex bi(at_precision(b.re, ctx), at_precision(b.im, ctx));
  if (ai == bi) return Complex();
  const double len = to_double(abs(bi - ai));
  int panels = std::max(32, static_cast<int>(std::ceil(8 * len)));
  const Real tol = ctx.quad_tol() * magnitude_scale(bi, ctx);
  Complex prev = xi_segment_integral(ai, bi, panels, ctx);
  for (int round = 0; round < 6; ++round) {
    panels *= 2;
    Complex next = xi_segment_integral(ai, bi, panels, ctx);
    if (abs(next - prev) <= tol) return next;
    prev = std::move(next);
  }
  throw ConvergenceError("xi_integral: panel doubling did not settle");
}

// xi^(-1)(s; alpha0) = alpha0 + int_{1/2}^s xi(w) dw along the straight path.
inline Complex xi_inv_path(const ComplexPoint& s, const Complex& alpha0,
                           const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  return Complex(at_precision(alpha0.re, ctx), at_precision(alpha0.im, ctx)) +
         xi_integral(Complex(Real(1) / 2, Real(0)), s, ctx);
}

// Same integral along the polyline 1/2 -> vertices[0] -> vertices[1] -> ...
inline Complex xi_inv_polyline(const std::vector<ComplexPoint>& vertices,
                               const Complex& alpha0,
                               const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  Complex total(at_precision(alpha0.re, ctx), at_precision(alpha0.im, ctx));
  Complex from(Real(1) / 2, Real(0));
  for (const auto& v : vertices) {
    total += xi_integral(from, v, ctx);
    from = v;
  }
  return total;
}

// Horizontal leg along the real axis, then vertical.
inline Complex xi_inv_l_path(const ComplexPoint& s, const Complex& alpha0,
                             const PrecisionContext& ctx) {
  return xi_inv_polyline({Complex(s.re, Real(0)), s}, alpha0, ctx);
}

}  // namespace xilab

#endif  // XILAB_XI_INTEGRALS_HPP
