#ifndef XILAB_XI_CORE_HPP
#define XILAB_XI_CORE_HPP

// xi(s) = 1/2 s (s - 1) pi^{-s/2} Gamma(s/2) zeta(s), its critical-line form
// Xi(z) = xi(1/2 + iz), the Stirling magnitude estimate F(sigma, t) and the
// argument-variation diagnostic along horizontal segments.

#include "xilab/complex.hpp"
#include "xilab/precision.hpp"
#include "xilab/special_functions.hpp"

#include <cmath>
#include <functional>

namespace xilab {

// Entire; points with Re s < 1/2 are reflected through xi(s) = xi(1 - s).
// The factor (s - 1) zeta(s) is evaluated as one regular function, so s = 1
// and s = 0 need no special handling.
inline Complex xi(const ComplexPoint& s_in, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  Complex s(at_precision(s_in.re, ctx), at_precision(s_in.im, ctx));
  if (s.re * 2 < 1) s = Complex(1) - s;
  const Real log_pi = log(pi_of(ctx));
  const Complex half_s = s / Real(2);
  const Complex lg = log_gamma(half_s, ctx);
  const Complex gamma_part = exp(lg - half_s * log_pi);
  return half_s * gamma_part * zeta_pole_free(s, ctx);
}

inline Complex big_xi(const ComplexPoint& z, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  return xi(s_from_z(z), ctx);
}

// F(sigma, t) = sqrt(pi) (2 pi e)^{-sigma/2} (sigma^2 + t^2)^{(sigma+3)/4}
//               exp(-(t/2) arctan(t/sigma))
inline Real f_estimate(const Real& sigma_in, const Real& t_in,
                       const PrecisionContext& ctx) {
  if (sigma_in < 0) throw DomainError("f_estimate: sigma must be >= 0");
  PrecisionScope scope(ctx);
  const Real sigma = at_precision(sigma_in, ctx);
  const Real t = at_precision(t_in, ctx);
  const Real pi = pi_of(ctx);
  const Real r2 = sigma * sigma + t * t;
  if (r2 == 0) return Real(0);
  const Real angle = atan2(t, sigma);  // sign(t) pi/2 at sigma = 0
  const Real log_f = log(pi) / 2 - sigma / 2 * log(2 * pi * exp(Real(1))) +
                     (sigma + 3) / 4 * log(r2) - t / 2 * angle;
  return exp(log_f);
}

// Magnitude scale used for error budgets anywhere in the plane: F mirrored
// through the critical line, floored at 1.
inline Real magnitude_scale(const ComplexPoint& s, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  Real sigma = s.re * 2 < 1 ? Real(1 - s.re) : Real(s.re);
  const Real f = f_estimate(sigma, abs(s.im), ctx);
  return f > 1 ? f : Real(1);
}

namespace detail {

// Principal value of arg(b / a).
inline Real arg_step(const Complex& a, const Complex& b) {
  return arg(b * conj(a));
}

// Total variation of arg f over [a, b] on a horizontal line; a step is
// accepted once both halves agree with it and stay below pi/2.
inline Real arg_variation_segment(
    const std::function<Complex(const Real&)>& f, const Real& a,
    const Real& b, const Complex& fa, const Complex& fb, const Real& pi,
    int depth) {
  const Real whole = arg_step(fa, fb);
  const Real mid = (a + b) / 2;
  const Complex fm = f(mid);
  if (norm(fm) == 0) throw ConvergenceError("arg_variation: zero on segment");
  const Real left = arg_step(fa, fm);
  const Real right = arg_step(fm, fb);
  const bool small = abs(left) < pi / 2 && abs(right) < pi / 2;
  if (small && abs(left + right - whole) < pi / 1000) {
    return abs(left) + abs(right);
  }
  if (depth >= 20) {
    throw ConvergenceError(
        "arg_variation: phase step did not fall below pi after 20 halvings "
        "(zero of xi next to the segment?)");
  }
  return arg_variation_segment(f, a, mid, fa, fm, pi, depth + 1) +
         arg_variation_segment(f, mid, b, fm, fb, pi, depth + 1);
}

}  // namespace detail

// Sum of |Delta arg xi(sigma + it)| over `steps` equal pieces of
// [sigma0, sigma0 + 2], each piece unwrapped by adaptive halving.
inline Real arg_variation(const Real& sigma0, const Real& t,
                          const PrecisionContext& ctx, int steps = 64) {
  if (!(sigma0 > 1)) throw DomainError("arg_variation: sigma0 must exceed 1");
  if (steps < 1) throw DomainError("arg_variation: steps must be positive");
  PrecisionScope scope(ctx);
  const Real tt = at_precision(t, ctx);
  auto f = [&](const Real& sigma) { return xi(Complex(sigma, tt), ctx); };
  const Real h = Real(2) / steps;
  Real a = at_precision(sigma0, ctx);
  Complex fa = f(a);
  const Real pi = pi_of(ctx);
  Real total = 0;
  for (int k = 1; k <= steps; ++k) {
    const Real b = at_precision(sigma0, ctx) + h * k;
    const Complex fb = f(b);
    total += detail::arg_variation_segment(f, a, b, fa, fb, pi, 0);
    a = b;
    fa = fb;
  }
  return total;
}

}  // namespace xilab

#endif  // XILAB_XI_CORE_HPP
