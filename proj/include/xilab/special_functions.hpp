#ifndef XILAB_SPECIAL_FUNCTIONS_HPP
#define XILAB_SPECIAL_FUNCTIONS_HPP

// Building blocks: the Jacobi theta function theta(x) = sum_n exp(-pi n^2 x)
// on the positive real axis and its first two derivatives, the kernel
//
//   Phi(u) = sum_{n>=1} (4 pi^2 n^4 e^{9u/2} - 6 pi n^2 e^{5u/2}) exp(-pi n^2 e^{2u})
//
// whose Fourier cosine transform is Xi(z) = xi(1/2 + iz), the complex log
// gamma function and the Riemann zeta function right of the critical line.
//
// Everything here is precision-generic: truncation points are chosen from
// explicit next-term bounds at the context's working precision.

#include "xilab/complex.hpp"
#include "xilab/precision.hpp"

#include <boost/multiprecision/gmp.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace xilab {

namespace detail {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

// B_0, B_2, B_4, ... as exact rationals, extended on demand.
inline Rational bernoulli_b2n_exact(int k) {
  static std::mutex mutex;
  static std::vector<Rational> table{Rational(1)};
  std::lock_guard<std::mutex> lock(mutex);
  while (static_cast<int>(table.size()) <= k) {
    // sum_{j=0}^{m} C(2m+1, 2j) B_{2j} = (2m+1)/2
    const int m = static_cast<int>(table.size());
    Rational acc = 0;
    Integer binom = 1;  // C(2m+1, 0)
    for (int j = 0; j < m; ++j) {
      acc += Rational(binom) * table[j];
      // C(2m+1, 2j) -> C(2m+1, 2j+2)
      binom = binom * (2 * m + 1 - 2 * j) * (2 * m - 2 * j) /
              ((2 * j + 1) * (2 * j + 2));
    }
    Rational rhs(2 * m + 1, 2);
    table.push_back((rhs - acc) / (2 * m + 1));
  }
  return table[k];
}

inline Real rational_to_real(const Rational& q) {
  Real num(boost::multiprecision::numerator(q).str());
  Real den(boost::multiprecision::denominator(q).str());
  return num / den;
}

struct BernoulliCache {
  std::vector<Real> b2n;             // B_{2k}
  std::vector<Real> b2n_over_fact;   // B_{2k} / (2k)!
};

inline const BernoulliCache& bernoulli_cache(int k_needed,
                                             const PrecisionContext& ctx) {
  thread_local std::map<int, BernoulliCache> caches;
  auto& c = caches[ctx.working_digits()];
  if (static_cast<int>(c.b2n.size()) <= k_needed) {
    PrecisionScope scope(ctx);
    Real fact = 1;
    for (int k = 0; k < static_cast<int>(c.b2n.size()); ++k) {
      if (k > 0) fact *= Real(2 * k - 1) * (2 * k);
    }
    for (int k = static_cast<int>(c.b2n.size()); k <= k_needed + 16; ++k) {
      if (k > 0) fact *= Real(2 * k - 1) * (2 * k);
      Real b = rational_to_real(bernoulli_b2n_exact(k));
      c.b2n_over_fact.push_back(b / fact);
      c.b2n.push_back(std::move(b));
    }
  }
  return c;
}

inline Real ln10_times(double digits) { return Real(digits * std::log(10.0)); }

// log p for small integers, cached per precision.
inline const Real& log_int(int n, const PrecisionContext& ctx) {
  thread_local std::map<int, std::vector<Real>> caches;
  auto& v = caches[ctx.working_digits()];
  if (static_cast<int>(v.size()) <= n) {
    PrecisionScope scope(ctx);
    const std::size_t old = v.size();
    v.resize(static_cast<std::size_t>(n) + 64);
    for (std::size_t i = old; i < v.size(); ++i)
      v[i] = i == 0 ? Real(0) : Real(log(Real(static_cast<unsigned>(i))));
  }
  return v[static_cast<std::size_t>(n)];
}

// theta^{(k)}(x) by direct summation; converges well for x >= 1.
inline Real theta_series(const Real& x, int k, const PrecisionContext& ctx) {
  const Real pi = pi_of(ctx);
  const Real tol = ctx.eps() / 10;
  const Real q = exp(-pi * x);
  const Real q2 = q * q;
  Real qn2 = q;          // q^{n^2}
  Real step = q * q2;    // q^{2n+1}
  Real sum = 0;
  for (int n = 1;; ++n) {
    const Real n2 = Real(n) * n;
    Real term = qn2;
    if (k == 1) term *= -pi * n2;
    if (k == 2) term *= pi * pi * n2 * n2;
    sum += term;
    if (abs(term) < tol && n2 * pi * x > k) break;
    qn2 *= step;
    step *= q2;
  }
  return (k == 0 ? Real(1) : Real(0)) + 2 * sum;
}

}  // namespace detail

// theta(x), theta'(x) or theta''(x) for x > 0.  Arguments below 1 go through
// theta(x) = x^{-1/2} theta(1/x) and its derivatives.
inline Real theta(const Real& x_in, int k, const PrecisionContext& ctx) {
  if (k < 0 || k > 2)
    throw DomainError("theta: derivative order must be 0, 1 or 2");
  if (x_in <= 0) throw DomainError("theta: argument must be positive");
  PrecisionScope scope(ctx);
  const Real x = at_precision(x_in, ctx);
  if (x >= 1) return detail::theta_series(x, k, ctx);

  const Real y = 1 / x;
  const Real rs = sqrt(y);  // x^{-1/2}
  const Real t0 = detail::theta_series(y, 0, ctx);
  if (k == 0) return rs * t0;
  const Real t1 = detail::theta_series(y, 1, ctx);
  if (k == 1) return -rs * y * t0 / 2 - rs * y * y * t1;
  const Real t2 = detail::theta_series(y, 2, ctx);
  const Real y2 = y * y;
  return rs * y2 * (Real(3) / 4 * t0 + 3 * y * t1 + y2 * t2);
}

// Phi(u), even in u, summed from its defining series.
inline Real phi(const Real& u_in, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const Real u = abs(at_precision(u_in, ctx));
  const Real pi = pi_of(ctx);
  const Real tol = ctx.eps() / 10;
  const Real x = exp(2 * u);
  const Real e_half = exp(u / 2);
  const Real q = exp(-pi * x);
  const Real q2 = q * q;
  Real qn2 = q;
  Real step = q * q2;
  Real sum = 0;
  for (int n = 1;; ++n) {
    const Real a = pi * n * n * x;  // pi n^2 e^{2u}
    Real term = (4 * a * a - 6 * a) * qn2;
    sum += term;
    if (n > 1 && abs(term) * e_half < tol) break;
    qn2 *= step;
    step *= q2;
  }
  return e_half * sum;
}

// Phi(u) = 3 x^{5/4} theta'(x) + 2 x^{9/4} theta''(x) with x = e^{2u}.
// For u < 0 the theta derivatives are taken through the functional
// equation, which makes this an independent route to phi().
inline Real phi_theta_form(const Real& u_in, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const Real u = at_precision(u_in, ctx);
  const Real x = exp(2 * u);
  const Real x14 = exp(u / 2);  // x^{1/4}
  return 3 * x * x14 * theta(x, 1, ctx) + 2 * x * x * x14 * theta(x, 2, ctx);
}

// Phi(u) = 1/2 (d^2/du^2 - 1/4) (e^{u/2} theta(e^{2u})), differentiated term
// by term.  Writing e^{u/2} theta(e^{2u}) = e^{u/2} + 2 sum_n exp(a_n(u)) with
// a_n(u) = u/2 - pi n^2 e^{2u}, the operator annihilates e^{u/2} and maps
// exp(a_n) to exp(a_n) (a_n'^2 + a_n'' - 1/4).  Summed as is, without using
// evenness, so negative u converges more slowly but stays correct.
inline Real phi_polya_form(const Real& u_in, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const Real u = at_precision(u_in, ctx);
  const Real pi = pi_of(ctx);
  const Real tol = ctx.eps() / 100;
  const Real x = exp(2 * u);
  const Real e_half = exp(u / 2);
  const Real q = exp(-pi * x);
  const Real q2 = q * q;
  Real qn2 = q;
  Real step = q * q2;
  const Real quarter = Real(1) / 4;
  Real sum = 0;
  for (int n = 1;; ++n) {
    const Real c = pi * n * n * x;  // pi n^2 e^{2u}
    const Real da = Real(1) / 2 - 2 * c;   // a_n'
    const Real dda = -4 * c;               // a_n''
    Real term = e_half * qn2 * (da * da + dda - quarter);
    sum += term;
    // Terms grow until pi n^2 x ~ 2, then decay doubly exponentially.
    if (c > 4 && abs(term) < tol) break;
    qn2 *= step;
    step *= q2;
  }
  return sum;  // 1/2 * 2 * sum
}

// Truncation parameters for the weighted kernel e^{lambda u^2} u^m Phi(u).
struct PhiKernel {
  int n_max = 0;       // theta-series terms needed at u = 0
  double u_max = 0;    // integration cutoff
  double lambda = 0;
  int m = 0;
  double log_peak = 0; // log of the largest |e^{lambda u^2} u^m Phi(u)|

  // im_bound bounds |Im z| for the oscillatory factor e^{|Im z| u}.
  static PhiKernel make(const Real& lambda, int m, double im_bound,
                        const PrecisionContext& ctx) {
    PhiKernel k;
    k.lambda = to_double(lambda);
    k.m = m;
    const double ln10 = std::log(10.0);
    const double log_tol = -ctx.quad_tol_exponent() * ln10;
    const double pi = M_PI;
    for (k.n_max = 1;; ++k.n_max) {
      const double n = k.n_max + 1;  // first omitted term
      if (std::log(4 * pi * pi) + 4 * std::log(n) - pi * n * n < log_tol)
        break;
    }
    // log of the n = 1 term, which dominates for u >= 1/2
    auto log_phi = [pi](double u) {
      const double x = std::exp(2 * u);
      return 0.5 * u + std::log(4 * pi * pi * x * x - 6 * pi * x) - pi * x;
    };
    auto log_integrand = [&](double u) {
      return k.lambda * u * u + std::abs(m) * std::log(std::max(1.0, u)) +
             log_phi(u) + im_bound * u;
    };
    const double target = -(ctx.digits() + 10) * ln10;
    k.u_max = 0;
    for (double u = 0.5; u <= 12.0; u += 1.0 / 256) {
      if (log_integrand(u) < target) {
        k.u_max = u;
        break;
      }
    }
    if (k.u_max == 0) {
      throw TruncationError(
          "kernel does not decay within u <= 12 at this precision "
          "(lambda too large)");
    }
    k.log_peak = -1e300;
    for (double u = 0; u <= k.u_max; u += 1.0 / 256) {
      const double w = m > 0 && u > 0 ? m * std::log(u) : 0.0;
      const double lp = u < 0.5 ? std::log(0.9) : log_phi(u);
      k.log_peak = std::max(k.log_peak, k.lambda * u * u + w + lp);
    }
    return k;
  }
};

// Principal-branch log Gamma via Stirling's series after shifting the
// argument to |s| >= r0 with r0 tied to the working precision.
inline Complex log_gamma(const ComplexPoint& s_in, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  Complex s(at_precision(s_in.re, ctx), at_precision(s_in.im, ctx));
  if (s.im == 0 && s.re <= 0 && s.re == floor(s.re))
    throw PoleError("log_gamma: pole at non-positive integer");

  const double r0 = std::max(10.0, 0.5 * ctx.working_digits());
  Complex shift_product(1);
  double arg_sum = 0;
  int shift = 0;
  while (to_double(s.re) + shift < 1.0 ||
         to_double(abs(Complex(s.re + shift, s.im))) < r0) {
    Complex w(s.re + shift, s.im);
    arg_sum += std::atan2(to_double(w.im), to_double(w.re));
    shift_product *= w;
    ++shift;
  }
  const Complex w(s.re + shift, s.im);
  const Real pi = pi_of(ctx);
  const Complex lw = log(w);
  Complex result = (w - Complex(Real(1) / 2)) * lw - w;
  result.re += log(2 * pi) / 2;

  const Real tol = ctx.eps() / 100;
  const Complex inv = Complex(1) / w;
  const Complex inv2 = inv * inv;
  Complex power = inv;  // w^{-(2k-1)}
  for (int k = 1;; ++k) {
    const auto& bc = detail::bernoulli_cache(k, ctx);
    const Complex term = power * (bc.b2n[k] / (Real(2 * k) * (2 * k - 1)));
    result += term;
    if (abs(term) < tol) break;
    if (k > 4 * ctx.working_digits())
      throw ConvergenceError("log_gamma: Stirling series did not converge");
    power *= inv2;
  }

  if (shift > 0) {
    Complex lp = log(shift_product);
    const double turns =
        std::round((arg_sum - to_double(lp.im)) / (2 * M_PI));
    lp.im += 2 * pi * turns;
    result -= lp;
  }
  return result;
}

namespace detail {

// Euler-Maclaurin evaluation of zeta(s), or of (s - 1) zeta(s) when
// pole_free is set; the latter is regular at s = 1 where it equals 1.
inline Complex zeta_em(const Complex& s, bool pole_free,
                       const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const double sigma = to_double(s.re);
  const double mod = to_double(abs(s));
  const double wd = ctx.working_digits();
  const double ln10 = std::log(10.0);

  long n_em = static_cast<long>(std::ceil((mod + wd * ln10) / (2 * M_PI))) + 1;
  long n_floor = static_cast<long>(std::ceil(mod / (2 * M_PI))) + 2;
  long n_terms = n_em;
  if (sigma > 1.5) {
    const double n_dir = std::pow(10.0, wd / (sigma - 1.0));
    if (n_dir < static_cast<double>(n_em))
      n_terms = std::max(n_floor, static_cast<long>(std::ceil(n_dir)));
  }
  n_terms = std::max(n_terms, 3L);

  const Complex sm1 = s - Complex(1);
  const Real tol = ctx.eps() / 10;

  for (int attempt = 0; attempt < 8; ++attempt, n_terms *= 2) {
    const long N = n_terms;
    // n^{-s} for n = 1..N, completely multiplicative.
    std::vector<int> spf(static_cast<std::size_t>(N) + 1, 0);
    for (long i = 2; i <= N; ++i) {
      if (spf[i] == 0)
        for (long j = i; j <= N; j += i)
          if (spf[j] == 0) spf[j] = static_cast<int>(i);
    }
    std::vector<Complex> pw(static_cast<std::size_t>(N) + 1);
    pw[1] = Complex(1);
    Complex sum(1);
    for (long n = 2; n <= N; ++n) {
      const int p = spf[n];
      if (p == n) {
        const Real& lp = log_int(static_cast<int>(n), ctx);
        Real sn, cs;
        sin_cos(Real(s.im * lp), sn, cs);
        const Real mag = exp(-s.re * lp);
        pw[n] = Complex(mag * cs, -mag * sn);
      } else {
        pw[n] = pw[p] * pw[n / p];
      }
      if (n < N) sum += pw[n];
    }
    const Complex& n_s = pw[N];  // N^{-s}
    const Real Nr(static_cast<double>(N));
    Complex tail = n_s / Real(2);

    Complex factor = n_s / Nr;  // N^{-s-1}
    Complex poch = s;           // s (s+1) ... (s+2k-2)
    const Complex s2 = s * s;
    const Real invN2 = 1 / (Nr * Nr);
    const Real ref = std::max(Real(1), Real(norm(sum)));
    const Real tol2 = tol * tol * ref;
    const auto& bc = bernoulli_cache(ctx.working_digits() / 2, ctx);
    bool converged = false;
    Real last = -1;
    int growing = 0;
    for (int k = 1; k < 4 * ctx.working_digits() + 40; ++k) {
      if (k >= static_cast<int>(bc.b2n_over_fact.size())) bernoulli_cache(k, ctx);
      Complex term = poch * factor;
      term *= bc.b2n_over_fact[k];
      tail += term;
      const Real mag = norm(term);
      if (mag < tol2) {
        converged = true;
        break;
      }
      if (last >= 0 && mag > last) {
        if (++growing > 2) break;
      }
      last = mag;
      // (s + 2k - 1)(s + 2k) = s^2 + (4k - 1) s + (2k - 1) 2k
      const int a = 4 * k - 1;
      const long c = static_cast<long>(2 * k - 1) * (2 * k);
      poch *= Complex(Real(s2.re + a * s.re + c), Real(s2.im + a * s.im));
      factor *= invN2;
    }
    if (!converged) continue;

    const Complex n_1ms = n_s * Nr;  // N^{1-s}
    if (pole_free) return sm1 * (sum + tail) + n_1ms;
    return sum + tail + n_1ms / sm1;
  }
  throw ConvergenceError("zeta: Euler-Maclaurin did not converge");
}

}  // namespace detail

// zeta(s) for Re s >= 1/2, s != 1.
inline Complex zeta(const ComplexPoint& s, const PrecisionContext& ctx) {
  if (s.re * 2 < 1)
    throw DomainError("zeta: only evaluated for Re s >= 1/2");
  if (s.re == 1 && s.im == 0) throw PoleError("zeta: pole at s = 1");
  PrecisionScope scope(ctx);
  return detail::zeta_em(
      Complex(at_precision(s.re, ctx), at_precision(s.im, ctx)), false, ctx);
}

// (s - 1) zeta(s) for Re s >= 1/2, including s = 1.
inline Complex zeta_pole_free(const ComplexPoint& s,
                              const PrecisionContext& ctx) {
  if (s.re * 2 < 1)
    throw DomainError("zeta: only evaluated for Re s >= 1/2");
  PrecisionScope scope(ctx);
  return detail::zeta_em(
      Complex(at_precision(s.re, ctx), at_precision(s.im, ctx)), true, ctx);
}

}  // namespace xilab

#endif  // XILAB_SPECIAL_FUNCTIONS_HPP
