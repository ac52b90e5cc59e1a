#ifndef XILAB_ZERO_LAB_HPP
#define XILAB_ZERO_LAB_HPP

// Value sets of xi^(-1): solutions of xi^(-1)(s) = alpha0 located by the
// argument principle on rectangles, isolated by quadrisection and polished
// by Newton's method (d/ds xi^(-1) = xi).  Plus the real-axis zero scan of
// the integral family member and the asymptotic location law.
//
// Values of xi^(-1) on the search grid come from an XiInvField: a memo of
// known points, each new point integrated from its nearest known neighbour.
// Since xi is entire the result does not depend on the path taken.

#include "xilab/complex.hpp"
#include "xilab/precision.hpp"
#include "xilab/quadrature.hpp"
#include "xilab/xi_core.hpp"
#include "xilab/xi_integrals.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <string>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace xilab {

// Axis-aligned rectangle [sigma_lo, sigma_hi] x [t_lo, t_hi] in the s-plane.
struct Rect {
  double sigma_lo = 0;
  double sigma_hi = 0;
  double t_lo = 0;
  double t_hi = 0;

  Rect() = default;
  Rect(double s0, double s1, double t0, double t1)
      : sigma_lo(s0), sigma_hi(s1), t_lo(t0), t_hi(t1) {
    if (!(s0 < s1) || !(t0 < t1))
      throw DomainError("Rect: need sigma_lo < sigma_hi and t_lo < t_hi");
  }
  double width() const { return sigma_hi - sigma_lo; }
  double height() const { return t_hi - t_lo; }
  bool contains(const ComplexPoint& s, double slack = 0) const {
    const double x = to_double(s.re);
    const double y = to_double(s.im);
    return x >= sigma_lo - slack && x <= sigma_hi + slack &&
           y >= t_lo - slack && y <= t_hi + slack;
  }
};

enum class Orbit { base, reflected, conjugate, reflected_conjugate };

inline const char* orbit_name(Orbit o) {
  switch (o) {
    case Orbit::base: return "base";
    case Orbit::reflected: return "reflected";
    case Orbit::conjugate: return "conjugate";
    case Orbit::reflected_conjugate: return "reflected-conjugate";
  }
  return "base";
}

struct ZeroRecord {
  Complex alpha0;
  ComplexPoint location;
  Real residual;  // |xi^(-1)(location) - alpha0|
  int iterations = 0;
  Orbit orbit = Orbit::base;
  bool on_line_confirmed = false;  // matched by the critical-line scan
};

// rho, 1 - rho, conj(rho), 1 - conj(rho) with coincident points removed.
inline std::vector<std::pair<ComplexPoint, Orbit>> symmetry_orbit(
    const ComplexPoint& rho) {
  const Real one(1);
  std::vector<std::pair<ComplexPoint, Orbit>> all{
      {rho, Orbit::base},
      {Complex(one - rho.re, -rho.im), Orbit::reflected},
      {conj(rho), Orbit::conjugate},
      {Complex(one - rho.re, rho.im), Orbit::reflected_conjugate}};
  std::vector<std::pair<ComplexPoint, Orbit>> out;
  for (auto& p : all) {
    const Real tol = Real("1e-25") * (1 + abs(p.first));
    bool dup = false;
    for (const auto& q : out)
      if (abs(p.first - q.first) <= tol) dup = true;
    if (!dup) out.push_back(std::move(p));
  }
  return out;
}

// Memo of xi^(-1)(s) with alpha0 = 0 on double-valued grid points.  Not
// thread-safe; owned by one search.
class XiInvField {
 public:
  explicit XiInvField(const PrecisionContext& ctx) : ctx_(ctx) {
    insert({0.5, 0.0}, Complex());
  }

  Complex value(double sigma, double t) {
    const Key key{sigma, t};
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    const Key from = nearest(sigma, t);
    const double dist = std::hypot(sigma - from.first, t - from.second);
    const int panels = std::max(1, static_cast<int>(std::ceil(dist / kStep)));
    PrecisionScope scope(ctx_);
    const Complex a(from.first, from.second);
    const Complex b(sigma, t);
    Complex v = values_.at(from) + xi_segment_integral(a, b, panels, ctx_);
    insert(key, v);
    return v;
  }

  std::size_t size() const { return values_.size(); }

  // Maximum length of one integration panel.
  static constexpr double kStep = 0.25;

 private:
  using Key = std::pair<double, double>;

  static std::int64_t cell_key(long i, long j) {
    return (static_cast<std::int64_t>(i) << 32) ^
           static_cast<std::int64_t>(static_cast<std::uint32_t>(j));
  }
  static long cell_of(double x) { return static_cast<long>(std::floor(x)); }

  void insert(const Key& key, Complex v) {
    values_.emplace(key, std::move(v));
    cells_[cell_key(cell_of(key.first), cell_of(key.second))].push_back(key);
  }

  // Nearest stored point; ties go to the smaller key.
  Key nearest(double sigma, double t) const {
    const long ci = cell_of(sigma);
    const long cj = cell_of(t);
    Key best{0.5, 0.0};
    double best_d = std::hypot(sigma - 0.5, t);
    for (long r = 0;; ++r) {
      if (r >= 1 && static_cast<double>(r - 1) >= best_d) break;
      for (long i = ci - r; i <= ci + r; ++i) {
        for (long j = cj - r; j <= cj + r; ++j) {
          if (std::max(std::labs(i - ci), std::labs(j - cj)) != r) continue;
          auto it = cells_.find(cell_key(i, j));
          if (it == cells_.end()) continue;
          for (const Key& k : it->second) {
            const double d = std::hypot(sigma - k.first, t - k.second);
            if (d < best_d || (d == best_d && k < best)) {
              best_d = d;
              best = k;
            }
          }
        }
      }
    }
    return best;
  }

  PrecisionContext ctx_;
  std::map<Key, Complex> values_;
  std::unordered_map<std::int64_t, std::vector<Key>> cells_;
};

// Winding numbers of xi^(-1) - alpha0 around rectangles sharing one field.
// Edge contributions are cached so that shared edges are walked once.
class WindingCounter {
 public:
  WindingCounter(XiInvField& field, const Complex& alpha0,
                 const PrecisionContext& ctx)
      : field_(field), alpha0_(alpha0), ctx_(ctx) {
    PrecisionScope scope(ctx);
    half_eps_ = ctx.half_eps();
  }

  int count(const Rect& r) {
    const double c[4][2] = {{r.sigma_lo, r.t_lo},
                            {r.sigma_hi, r.t_lo},
                            {r.sigma_hi, r.t_hi},
                            {r.sigma_lo, r.t_hi}};
    double total = 0;
    for (int e = 0; e < 4; ++e) {
      const int f = (e + 1) % 4;
      total += edge(c[e][0], c[e][1], c[f][0], c[f][1]);
    }
    const double turns = total / (2 * M_PI);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 0.1)
      throw BoundaryError("winding number is not close to an integer");
    return static_cast<int>(rounded);
  }

 private:
  using EdgeKey = std::tuple<double, double, double, double>;

  double edge(double x0, double y0, double x1, double y1) {
    auto it = edges_.find(EdgeKey{x0, y0, x1, y1});
    if (it != edges_.end()) return it->second;
    it = edges_.find(EdgeKey{x1, y1, x0, y0});
    if (it != edges_.end()) return -it->second;

    const double len = std::hypot(x1 - x0, y1 - y0);
    int n = 1;
    while (len / n > XiInvField::kStep) n *= 2;
    double total = 0;
    Complex prev = sample(x0, y0);
    for (int k = 1; k <= n; ++k) {
      const double a = static_cast<double>(k - 1) / n;
      const double b = static_cast<double>(k) / n;
      const double xb = k == n ? x1 : x0 + (x1 - x0) * b;
      const double yb = k == n ? y1 : y0 + (y1 - y0) * b;
      Complex next = sample(xb, yb);
      total += step(x0, y0, x1, y1, a, b, prev, next, 0);
      prev = std::move(next);
    }
    edges_.emplace(EdgeKey{x0, y0, x1, y1}, total);
    return total;
  }

  // Phase change over the parameter interval [a, b] of the edge, halved
  // until every piece turns by less than pi/2.
  double step(double x0, double y0, double x1, double y1, double a, double b,
              const Complex& fa, const Complex& fb, int depth) {
    const double d = to_double(arg(fb * conj(fa)));
    if (std::abs(d) < M_PI / 2) return d;
    if (depth > 40)
      throw BoundaryError("argument step did not resolve; zero on the contour");
    const double m = (a + b) / 2;
    const Complex fm = sample(x0 + (x1 - x0) * m, y0 + (y1 - y0) * m);
    return step(x0, y0, x1, y1, a, m, fa, fm, depth + 1) +
           step(x0, y0, x1, y1, m, b, fm, fb, depth + 1);
  }

  Complex sample(double sigma, double t) {
    PrecisionScope scope(ctx_);
    Complex v = field_.value(sigma, t) - alpha0_;
    const Real floor =
        half_eps_ * magnitude_scale(Complex(sigma, t), ctx_);
    if (abs(v) < floor) {
      throw BoundaryError("|xi^(-1) - alpha0| below the minimum modulus at " +
                          std::to_string(sigma) + "+" + std::to_string(t) +
                          "i");
    }
    return v;
  }

  XiInvField& field_;
  Complex alpha0_;
  PrecisionContext ctx_;
  Real half_eps_;
  std::map<EdgeKey, double> edges_;
};

// Winding number of xi^(-1)(s) - alpha0 around the boundary of r.
inline int count_zeros_in_rect(const Complex& alpha0, const Rect& r,
                               const PrecisionContext& ctx) {
  XiInvField field(ctx);
  WindingCounter counter(field, alpha0, ctx);
  return counter.count(r);
}

namespace detail {

// Newton on xi^(-1)(s) - alpha0 from `seed`, where `seed_value` is
// xi^(-1)(seed) with alpha0 = 0.  Each iterate's value is carried forward by
// integrating xi over the step.
inline ZeroRecord newton_refine(const ComplexPoint& seed,
                                const Complex& seed_value,
                                const Complex& alpha0,
                                const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const Real half_eps = ctx.half_eps();
  const Real stop = pow(Real(10), -(ctx.digits() - 10));
  const Real max_step("0.5");
  Complex s(at_precision(seed.re, ctx), at_precision(seed.im, ctx));
  Complex value = seed_value;
  ZeroRecord rec;
  rec.alpha0 = alpha0;
  for (int it = 1;; ++it) {
    const Complex d = xi(s, ctx);
    if (abs(d) < half_eps * magnitude_scale(s, ctx)) {
      throw ConvergenceError("refine_zero: xi vanishes at a Newton iterate");
    }
    Complex delta = (value - alpha0) / d;
    const Real len = abs(delta);
    if (len > max_step) delta *= max_step / len;
    const Complex next = s - delta;
    const int panels = std::max(
        1, static_cast<int>(std::ceil(to_double(len) / XiInvField::kStep)));
    value += xi_segment_integral(s, next, panels, ctx);
    s = next;
    rec.iterations = it;
    if (len < stop) break;
    if (it >= 60)
      throw ConvergenceError("refine_zero: no convergence in 60 iterations");
  }
  rec.location = s;
  rec.residual = abs(value - alpha0);
  if (rec.residual > half_eps) {
    throw ConvergenceError("refine_zero: residual above 10^(-digits/2)");
  }
  return rec;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.  The first failure by
// index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = static_cast<int>(std::min<std::size_t>(jobs, n));
  for (int k = 0; k < count; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline bool location_less(const ComplexPoint& a, const ComplexPoint& b) {
  const Complex half(Real(1) / 2, Real(0));
  const Real da = abs(a - half);
  const Real db = abs(b - half);
  if (da != db) return da < db;
  if (a.re != b.re) return a.re < b.re;
  return a.im < b.im;
}

}  // namespace detail

// Newton refinement from a seed alone; the starting value comes from the
// straight-path integral.
inline ZeroRecord refine_zero(const ComplexPoint& seed, const Complex& alpha0,
                              const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  return detail::newton_refine(seed, xi_inv_path(seed, Complex(), ctx),
                               alpha0, ctx);
}

// Sign changes of Xi^(-1)(t) - level on [t_lo, t_hi]: grid step 0.05 then
// bisection to 1e-10.  Xi^(-1)(t) = -i xi^(-1)(1/2 + it) is evaluated by the
// Fourier route.
inline std::vector<double> critical_line_roots(const Real& lambda,
                                               const Real& level, double t_lo,
                                               double t_hi,
                                               const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const FamilyEvaluator eval(-1, lambda, std::max(1.0, std::abs(t_hi)), 0.0,
                             ctx);
  auto g = [&](double t) { return eval(Complex(Real(t))).re - level; };
  std::vector<double> roots;
  constexpr double kGrid = 0.05;
  double a = t_lo;
  Real ga = g(a);
  const long steps = static_cast<long>(std::ceil((t_hi - t_lo) / kGrid));
  for (long k = 1; k <= steps; ++k) {
    const double b = k == steps ? t_hi : t_lo + kGrid * k;
    Real gb = g(b);
    if (gb == 0) {
      roots.push_back(b);
    } else if ((ga < 0 && gb > 0) || (ga > 0 && gb < 0)) {
      double lo = a, hi = b;
      Real glo = ga;
      while (hi - lo > 1e-10) {
        const double mid = (lo + hi) / 2;
        const Real gm = g(mid);
        if ((gm < 0) == (glo < 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      roots.push_back((lo + hi) / 2);
    }
    a = b;
    ga = std::move(gb);
  }
  return roots;
}

struct ValueSetResult {
  std::vector<ZeroRecord> zeros;
  int count = 0;                      // winding number of the searched rect
  std::vector<double> line_roots;     // critical-line scan, if run
  std::vector<double> unmatched_line_roots;
  std::size_t field_points = 0;
};

struct SearchOptions {
  int jobs = 1;
  bool critical_line_scan = true;
};

namespace detail {

// Deterministic boundary nudges: 0, +d, -d, +2d, -2d, +3d.
inline double nudge(int attempt) {
  constexpr double kDelta = 1e-3;
  static const double seq[] = {0, 1, -1, 2, -2, 3};
  return seq[attempt] * kDelta;
}
inline constexpr int kNudgeAttempts = 6;

inline bool alpha_is_zero(const Complex& a) { return a.re == 0 && a.im == 0; }

}  // namespace detail

// Members of V(xi^(-1); alpha0) inside rect.  For alpha0 = 0 only the closed
// first quadrant sigma >= 1/2, t >= 0 is searched; the rest of the set
// follows from symmetry_orbit.  Records are sorted by |location - 1/2|.
inline ValueSetResult find_value_set_detailed(const Complex& alpha0,
                                              const Rect& rect_in,
                                              const PrecisionContext& ctx,
                                              const SearchOptions& opts = {}) {
  PrecisionScope scope(ctx);
  ValueSetResult result;
  Rect rect = rect_in;
  bool include_half = false;
  if (detail::alpha_is_zero(alpha0)) {
    include_half = rect.contains(Complex(Real(1) / 2, Real(0)));
    rect.sigma_lo = std::max(rect.sigma_lo, 0.5);
    rect.t_lo = std::max(rect.t_lo, 0.0);
    // The only zero on the quadrant's edges is s = 1/2 itself.
    if (rect.sigma_lo == 0.5 && rect.t_lo == 0.0) {
      rect.sigma_lo += 1e-3;
      rect.t_lo += 1e-3;
    }
    if (!(rect.sigma_lo < rect.sigma_hi) || !(rect.t_lo < rect.t_hi)) {
      rect = Rect();
    }
  }

  XiInvField field(ctx);
  WindingCounter counter(field, alpha0, ctx);

  struct Leaf {
    Rect rect;
  };
  std::vector<Leaf> leaves;

  // Outer rectangle; nudged outward-shifted like internal splits if needed.
  int top = 0;
  const bool empty = !(rect.sigma_lo < rect.sigma_hi);
  if (!empty) {
    for (int attempt = 0;; ++attempt) {
      const double d = detail::nudge(attempt);
      try {
        Rect r(rect.sigma_lo + d, rect.sigma_hi + d, rect.t_lo + d,
               rect.t_hi + d);
        top = counter.count(r);
        rect = r;
        break;
      } catch (const BoundaryError&) {
        if (attempt + 1 >= detail::kNudgeAttempts) throw;
      }
    }
  }
  result.count = top;

  // Depth-first quadrisection, children in a fixed order.
  std::vector<std::pair<Rect, int>> stack;
  if (top > 0) stack.emplace_back(rect, top);
  while (!stack.empty()) {
    auto [r, n] = stack.back();
    stack.pop_back();
    if (n == 1 && std::max(r.width(), r.height()) <= 0.25) {
      leaves.push_back({r});
      continue;
    }
    if (std::max(r.width(), r.height()) < 1e-6) {
      throw ConvergenceError(
          "find_value_set: cluster of zeros could not be separated");
    }
    std::vector<std::pair<Rect, int>> children;
    for (int attempt = 0;; ++attempt) {
      const double d =
          detail::nudge(attempt) * std::min(1.0, std::min(r.width(), r.height()));
      const double sm = (r.sigma_lo + r.sigma_hi) / 2 + d;
      const double tm = (r.t_lo + r.t_hi) / 2 + d;
      try {
        children.clear();
        const Rect parts[4] = {Rect(r.sigma_lo, sm, r.t_lo, tm),
                               Rect(sm, r.sigma_hi, r.t_lo, tm),
                               Rect(sm, r.sigma_hi, tm, r.t_hi),
                               Rect(r.sigma_lo, sm, tm, r.t_hi)};
        int sum = 0;
        for (const Rect& p : parts) {
          const int c = counter.count(p);
          sum += c;
          children.emplace_back(p, c);
        }
        if (sum != n) {
          throw BoundaryError("child counts do not add up to the parent");
        }
        break;
      } catch (const BoundaryError&) {
        if (attempt + 1 >= detail::kNudgeAttempts) throw;
      }
    }
    for (auto it = children.rbegin(); it != children.rend(); ++it) {
      if (it->second < 0)
        throw ConvergenceError("find_value_set: negative winding number");
      if (it->second > 0) stack.push_back(*it);
    }
  }

  // Seed values are read from the shared field before going parallel; after
  // that every leaf integrates along its own Newton path.
  std::vector<Complex> seeds(leaves.size());
  std::vector<Complex> seed_values(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const Rect& r = leaves[i].rect;
    const double cs = (r.sigma_lo + r.sigma_hi) / 2;
    const double ct = (r.t_lo + r.t_hi) / 2;
    seeds[i] = Complex(cs, ct);
    seed_values[i] = field.value(cs, ct);
  }
  result.field_points = field.size();

  std::vector<ZeroRecord> refined(leaves.size());
  detail::parallel_for(leaves.size(), opts.jobs, [&](std::size_t i) {
    ZeroRecord rec = detail::newton_refine(seeds[i], seed_values[i], alpha0, ctx);
    if (!leaves[i].rect.contains(rec.location, 1e-6)) {
      throw ConvergenceError("find_value_set: Newton left its isolating rect");
    }
    refined[i] = std::move(rec);
  });
  result.zeros = std::move(refined);

  if (include_half) {
    ZeroRecord half;
    half.alpha0 = alpha0;
    half.location = Complex(Real(1) / 2, Real(0));
    half.residual = 0;
    result.zeros.insert(result.zeros.begin(), std::move(half));
  }

  // Purely imaginary alpha0: on-line members solve Xi^(-1)(t) = -i alpha0.
  if (opts.critical_line_scan && !detail::alpha_is_zero(alpha0) &&
      alpha0.re == 0 && rect.sigma_lo < 0.5 && rect.sigma_hi > 0.5) {
    result.line_roots =
        critical_line_roots(Real(0), alpha0.im, rect.t_lo, rect.t_hi, ctx);
    for (double t : result.line_roots) {
      bool matched = false;
      for (auto& z : result.zeros) {
        if (abs(z.location.re - Real(1) / 2) < Real("1e-3") &&
            abs(z.location.im - Real(t)) < Real("1e-6")) {
          z.on_line_confirmed = true;
          matched = true;
        }
      }
      if (!matched) result.unmatched_line_roots.push_back(t);
    }
  }

  std::sort(result.zeros.begin(), result.zeros.end(),
            [](const ZeroRecord& a, const ZeroRecord& b) {
              return detail::location_less(a.location, b.location);
            });
  return result;
}

inline std::vector<ZeroRecord> find_value_set(const Complex& alpha0,
                                              const Rect& rect,
                                              const PrecisionContext& ctx,
                                              const SearchOptions& opts = {}) {
  return find_value_set_detailed(alpha0, rect, ctx, opts).zeros;
}

// Full-plane members generated from first-quadrant representatives.
inline std::vector<ZeroRecord> expand_orbits(
    const std::vector<ZeroRecord>& base) {
  std::vector<ZeroRecord> out;
  for (const auto& z : base) {
    for (auto& [p, tag] : symmetry_orbit(z.location)) {
      ZeroRecord r = z;
      r.location = p;
      r.orbit = tag;
      out.push_back(std::move(r));
    }
  }
  return out;
}

// All sign changes of Xi_lambda^(-1)(t) on (0, t_max] with the forced zero
// at t = 0 in front.
inline std::vector<double> real_axis_zero_scan(const Real& lambda, double t_max,
                                               const PrecisionContext& ctx) {
  if (!(t_max > 0) || t_max > 500)
    throw DomainError("real_axis_zero_scan: t_max must lie in (0, 500]");
  std::vector<double> out{0.0};
  // Start one grid step out: the function vanishes at t = 0.
  for (double r : critical_line_roots(lambda, Real(0), 0.05, t_max, ctx))
    out.push_back(r);
  return out;
}

// Leading term (pi/2) t / log t of the zero-location law.
inline double predicted_sigma(double t) {
  const double cutoff = 4 * M_PI * std::exp(1.0);
  if (t < cutoff * (1 - 1e-15))
    throw DomainError("predicted_sigma: t must be >= 4 pi e");
  return M_PI / 2 * t / std::log(t);
}

// |sigma - 1/2 - predicted_sigma(t)| (log t)^2 / t
inline double band_statistic(const ComplexPoint& rho) {
  const double sigma = to_double(rho.re);
  const double t = to_double(rho.im);
  const double lt = std::log(t);
  return std::abs(sigma - 0.5 - predicted_sigma(t)) * lt * lt / t;
}

struct MonotonicityReport {
  bool sigma_increasing = true;
  bool t_increasing = true;
  std::vector<Real> d_sigma;
  std::vector<Real> d_t;
};

inline MonotonicityReport monotonicity_report(
    const std::vector<ZeroRecord>& zeros) {
  MonotonicityReport rep;
  for (std::size_t i = 1; i < zeros.size(); ++i) {
    Real ds = zeros[i].location.re - zeros[i - 1].location.re;
    Real dt = zeros[i].location.im - zeros[i - 1].location.im;
    if (!(ds > 0)) rep.sigma_increasing = false;
    if (!(dt > 0)) rep.t_increasing = false;
    rep.d_sigma.push_back(std::move(ds));
    rep.d_t.push_back(std::move(dt));
  }
  return rep;
}

}  // namespace xilab

#endif  // XILAB_ZERO_LAB_HPP
