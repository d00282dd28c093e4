#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "fractatom/errors.hpp"

namespace fractatom {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int levels = 0;
  int evaluations = 0;
};

/// Double-exponential (tanh-sinh) quadrature of f over [a, b].
///
/// The integrand is called as f(u, distance_to_a, distance_to_b). Both
/// distances are computed without cancellation, so integrands with
/// endpoint zeros or integrable endpoint singularities can be evaluated
/// accurately right up to the boundary. Levels halve the step until two
/// consecutive estimates differ by less than abs_tol.
template <class Integrand>
QuadratureResult tanh_sinh(Integrand&& f, double a, double b, double abs_tol, int max_levels = 12) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
    throw QuadratureError("tanh_sinh: invalid interval");
  }
  using std::numbers::pi;
  const double width = b - a;
  const double half = 0.5 * width;
  // exp(-pi sinh t) reaches the smallest normal double at t ~ 6.1.
  constexpr double kMinNode = 1e-300;
  const double t_max = std::asinh(-std::log(kMinNode) / pi);

  QuadratureResult result;

  auto checked = [&](double u, double dl, double dr, double t) {
    const double v = f(u, dl, dr);
    ++result.evaluations;
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "tanh_sinh: non-finite integrand " << v << " at u=" << u << " (t=" << t << ") on [" << a << ", " << b
          << "]";
      throw QuadratureError(msg.str());
    }
    return v;
  };

  // Weighted contribution of the node pair at +-t (or the centre at t = 0).
  auto pair_sum = [&](double t) {
    const double q = std::exp(-pi * std::sinh(t));
    const double weight = 2.0 * pi * std::cosh(t) * q / ((1.0 + q) * (1.0 + q));
    const double near = width * q / (1.0 + q);  // distance from the nearer endpoint
    const double far = width / (1.0 + q);
    if (t == 0.0) return weight * checked(a + half, half, half, t);
    double s = 0.0;
    if (near > 0.0) {
      s += checked(a + near, near, far, -t);
      s += checked(b - near, far, near, t);
    }
    return weight * s;
  };

  double h = 1.0;
  double sum = pair_sum(0.0);
  for (double t = h; t <= t_max; t += h) sum += pair_sum(t);
  double estimate = half * h * sum;

  for (int level = 1; level <= max_levels; ++level) {
    h *= 0.5;
    for (double t = h; t <= t_max; t += 2.0 * h) sum += pair_sum(t);
    const double next = half * h * sum;
    result.levels = level;
    result.error_estimate = std::abs(next - estimate);
    estimate = next;
    if (level >= 3 && result.error_estimate <= abs_tol) {
      result.value = estimate;
      return result;
    }
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "tanh_sinh: no convergence on [" << a << ", " << b << "] after " << max_levels
      << " levels; last estimate " << estimate << ", change " << result.error_estimate << " > tolerance " << abs_tol;
  throw QuadratureError(msg.str());
}

}  // namespace fractatom
