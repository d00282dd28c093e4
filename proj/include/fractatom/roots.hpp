#pragma once

#include <cmath>
#include <optional>

namespace fractatom {

/// A sign change of f between lo and hi (lo and hi need not be ordered).
struct Bracket {
  double lo;
  double hi;
  double f_lo;
  double f_hi;
};

/// Walks x0, x0 + step, x0 + 2 step, ... until f changes sign relative to
/// f(x0). Returns the last two points, or nullopt after max_steps.
template <class Fn>
std::optional<Bracket> march_to_sign_change(Fn&& f, double x0, double f0, double step, int max_steps) {
  double x_prev = x0;
  double f_prev = f0;
  for (int k = 1; k <= max_steps; ++k) {
    const double x = x0 + step * k;
    const double fx = f(x);
    if ((fx < 0.0) != (f_prev < 0.0) || fx == 0.0) return Bracket{x_prev, x, f_prev, fx};
    x_prev = x;
    f_prev = fx;
  }
  return std::nullopt;
}

/// Bisection on a sign-changing bracket until |hi - lo| <= x_tol. Returns
/// the narrowed bracket so callers can polish or inspect both ends.
template <class Fn>
Bracket bisect(Fn&& f, Bracket b, double x_tol, int max_iterations = 200) {
  for (int i = 0; i < max_iterations && std::abs(b.hi - b.lo) > x_tol; ++i) {
    const double mid = 0.5 * (b.lo + b.hi);
    if (mid == b.lo || mid == b.hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return Bracket{mid, mid, fm, fm};
    if ((fm < 0.0) == (b.f_lo < 0.0)) {
      b.lo = mid;
      b.f_lo = fm;
    } else {
      b.hi = mid;
      b.f_hi = fm;
    }
  }
  return b;
}

/// Secant (false-position) point inside a bracket, or nullopt if degenerate.
inline std::optional<double> secant_point(const Bracket& b) {
  const double denom = b.f_hi - b.f_lo;
  if (denom == 0.0 || !std::isfinite(denom)) return std::nullopt;
  const double x = b.lo - b.f_lo * (b.hi - b.lo) / denom;
  const double lo = std::fmin(b.lo, b.hi);
  const double hi = std::fmax(b.lo, b.hi);
  if (!(x >= lo && x <= hi)) return std::nullopt;
  return x;
}

}  // namespace fractatom
