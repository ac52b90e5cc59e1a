#ifndef XILAB_COMPLEX_HPP
#define XILAB_COMPLEX_HPP

// Minimal complex arithmetic over Real.  std::complex is unspecified for
// non-builtin value types, so the few operations the library needs live here.

#include "xilab/precision.hpp"

#include <cmath>
#include <ostream>
#include <type_traits>
#include <utility>

namespace xilab {

struct Complex {
  Real re;
  Real im;

  Complex() : re(0), im(0) {}
  Complex(Real r) : re(std::move(r)), im(0) {}  // NOLINT: implicit by design
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  template <class T, std::enable_if_t<std::is_arithmetic_v<T>, int> = 0>
  Complex(T r) : re(r), im(0) {}  // NOLINT
  Complex(double r, double i) : re(r), im(i) {}

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Complex& operator*=(const Real& k) {
    re *= k;
    im *= k;
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    const Real d = o.re * o.re + o.im * o.im;
    Real r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = std::move(r);
    return *this;
  }
  Complex& operator/=(const Real& k) {
    re /= k;
    im /= k;
    return *this;
  }
};

// The s-plane and z-plane share one representation; s = 1/2 + iz.
using ComplexPoint = Complex;

inline Complex operator+(Complex a, const Complex& b) { return a += b; }
inline Complex operator-(Complex a, const Complex& b) { return a -= b; }
inline Complex operator*(Complex a, const Complex& b) { return a *= b; }
inline Complex operator/(Complex a, const Complex& b) { return a /= b; }
inline Complex operator*(Complex a, const Real& k) { return a *= k; }
inline Complex operator*(const Real& k, Complex a) { return a *= k; }
inline Complex operator/(Complex a, const Real& k) { return a /= k; }
inline Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }

inline bool operator==(const Complex& a, const Complex& b) {
  return a.re == b.re && a.im == b.im;
}

inline Complex conj(const Complex& a) { return Complex(a.re, -a.im); }
inline Real norm(const Complex& a) { return a.re * a.re + a.im * a.im; }
inline Real abs(const Complex& a) { return sqrt(norm(a)); }
inline Real arg(const Complex& a) { return atan2(a.im, a.re); }

// i * a
inline Complex times_i(const Complex& a) { return Complex(-a.im, a.re); }

inline Complex exp(const Complex& a) {
  Real s, c;
  sin_cos(a.im, s, c);
  const Real m = exp(a.re);
  return Complex(m * c, m * s);
}

// Principal branch.
inline Complex log(const Complex& a) {
  return Complex(log(abs(a)), arg(a));
}

inline Complex sin(const Complex& a) {
  Real s, c;
  sin_cos(a.re, s, c);
  const Real ep = exp(a.im);
  const Real em = 1 / ep;
  return Complex(s * (ep + em) / 2, c * (ep - em) / 2);
}

inline Complex cos(const Complex& a) {
  Real s, c;
  sin_cos(a.re, s, c);
  const Real ep = exp(a.im);
  const Real em = 1 / ep;
  return Complex(c * (ep + em) / 2, -s * (ep - em) / 2);
}

// s = 1/2 + i z  <->  z = -i (s - 1/2)
inline ComplexPoint s_from_z(const ComplexPoint& z) {
  return Complex(Real(1) / 2 - z.im, z.re);
}
inline ComplexPoint z_from_s(const ComplexPoint& s) {
  return Complex(s.im, Real(1) / 2 - s.re);
}

inline std::ostream& operator<<(std::ostream& os, const Complex& a) {
  return os << a.re << (a.im < 0 ? "-" : "+") << abs(a.im) << "i";
}

}  // namespace xilab

#endif  // XILAB_COMPLEX_HPP
