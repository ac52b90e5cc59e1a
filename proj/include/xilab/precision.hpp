#ifndef XILAB_PRECISION_HPP
#define XILAB_PRECISION_HPP

// Working-precision plumbing shared by every numeric routine.
//
// All arithmetic is carried out in `Real`, a runtime-precision MPFR float.
// A PrecisionContext fixes the user-visible number of decimal digits; the
// arithmetic itself runs with a few guard digits on top so that the stated
// tolerances (eps, quad_tol) are met after rounding accumulates.
//
// MPFR numbers in boost::multiprecision carry their own precision, and new
// temporaries take the global default precision.  PrecisionScope installs the
// context's working precision for the duration of a call; it only writes the
// global when the value actually changes, so concurrent callers that share
// one precision never race on it.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace xilab {

using Real = boost::multiprecision::mpfr_float;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

// The requested accuracy cannot be reached with the configured precision.
class TruncationError : public Error {
 public:
  using Error::Error;
};

// A contour passes too close to a zero of the function being wound.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kDefaultDigits = 40;
inline constexpr int kMinDigits = 20;
inline constexpr int kGuardDigits = 10;

class PrecisionContext {
 public:
  explicit PrecisionContext(int digits = kDefaultDigits)
      : PrecisionContext(digits, digits - 10) {}

  // quad_tol is 10^-quad_tol_exponent; it may not be finer than eps.
  PrecisionContext(int digits, int quad_tol_exponent) : digits_(digits) {
    if (digits < kMinDigits) {
      throw DomainError("precision must be at least " +
                        std::to_string(kMinDigits) + " digits, got " +
                        std::to_string(digits));
    }
    if (quad_tol_exponent > digits) {
      throw DomainError("quad_tol must not be smaller than eps");
    }
    quad_tol_exponent_ = quad_tol_exponent;
    const unsigned wd = static_cast<unsigned>(working_digits());
    const Real ten(10, wd);
    eps_ = pow(ten, -digits);
    quad_tol_ = pow(ten, -quad_tol_exponent);
  }

  int digits() const noexcept { return digits_; }
  int working_digits() const noexcept { return digits_ + kGuardDigits; }
  int quad_tol_exponent() const noexcept { return quad_tol_exponent_; }

  // 10^-digits
  const Real& eps() const noexcept { return eps_; }
  // Target absolute quadrature error, 10^-(digits-10) by default.
  const Real& quad_tol() const noexcept { return quad_tol_; }

  // 10^-(digits/2): the residual bound for certified zeros and the minimum
  // modulus accepted on argument-principle contours.
  Real half_eps() const {
    Real ten(10, static_cast<unsigned>(working_digits()));
    return pow(ten, -(digits_ / 2));
  }

  friend bool operator==(const PrecisionContext& a,
                         const PrecisionContext& b) noexcept {
    return a.digits_ == b.digits_ &&
           a.quad_tol_exponent_ == b.quad_tol_exponent_;
  }

 private:
  int digits_;
  int quad_tol_exponent_ = 0;
  Real eps_;
  Real quad_tol_;
};

class PrecisionScope {
 public:
  explicit PrecisionScope(const PrecisionContext& ctx)
      : previous_(Real::default_precision()) {
    const auto wanted = static_cast<unsigned>(ctx.working_digits());
    if (wanted != previous_) Real::default_precision(wanted);
  }
  ~PrecisionScope() {
    if (Real::default_precision() != previous_)
      Real::default_precision(previous_);
  }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned previous_;
};

// Copy of x rounded to the context's working precision.
inline Real at_precision(const Real& x, const PrecisionContext& ctx) {
  return Real(x, static_cast<unsigned>(ctx.working_digits()));
}

inline Real pi_of(const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  Real p;
  mpfr_const_pi(p.backend().data(), MPFR_RNDN);
  return p;
}

// Simultaneous sine and cosine (one MPFR call).
inline void sin_cos(const Real& x, Real& s, Real& c) {
  s.precision(x.precision());
  c.precision(x.precision());
  mpfr_sin_cos(s.backend().data(), c.backend().data(), x.backend().data(),
               MPFR_RNDN);
}

inline double to_double(const Real& x) { return x.convert_to<double>(); }

// General-format decimal string with `sig` significant figures.
inline std::string format_real(const Real& x, int sig) {
  return x.str(sig, std::ios_base::fmtflags(0));
}

}  // namespace xilab

#endif  // XILAB_PRECISION_HPP
