#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "fractatom/errors.hpp"
#include "fractatom/geometry.hpp"
#include "fractatom/potentials.hpp"
#include "fractatom/quadrature.hpp"
#include "fractatom/special.hpp"
#include "fractatom/stability.hpp"

namespace fractatom {

/// Large-n power laws |E| ~ n^energy_exponent, r_max ~ n^size_exponent, with
/// the normalising action integral theta.
struct RydbergExponents {
  double energy_exponent;
  double size_exponent;
  double theta;
};

namespace detail {

// Gamma(a) / Gamma(b); falls back to log-gamma once either argument would overflow.
inline double gamma_ratio(double a, double b) {
  if (a < 150.0 && b < 150.0) return gamma(a) / gamma(b);
  return std::exp(std::lgamma(a) - std::lgamma(b));
}

/// Rejects kappa = 0 and inputs on or beyond the scale-free locus.
inline void require_bound_spectrum(const Fractality& f, double kappa, const char* what) {
  if (!std::isfinite(kappa) || std::abs(kappa) < kDegenerateKappa) {
    throw DegenerateExponentError(std::string(what) + ": kappa must be nonzero");
  }
  const double margin = 2.0 * f.alpha() - kappa;
  if (std::abs(margin) <= kScaleFreeTolerance) {
    throw ScaleFreeSingularityError(std::string(what) + ": fractality lies on the scale-free locus (margin " +
                                    std::to_string(margin) + ")");
  }
  if (margin < 0.0) {
    throw InstabilityError(std::string(what) + ": unstable fractality, margin 2(d_v - d_s) - kappa = " +
                           std::to_string(margin));
  }
}

// log(expm1(y)) for y > 0 without overflow.
inline double log_expm1(double y) { return y > 30.0 ? y + std::log1p(-std::exp(-y)) : std::log(std::expm1(y)); }

}  // namespace detail

/// Closed form of the dimensionless action integral
///   theta = int_0^1 [ 2 z^(2 alpha - 2) sgn(kappa) (z^-kappa - 1) ]^(1/2) dz
/// as a Beta function.
inline double theta_closed_form(const Fractality& f, double kappa) {
  detail::require_bound_spectrum(f, kappa, "theta_closed_form");
  const double alpha = f.alpha();
  const double root_half_pi = std::sqrt(0.5 * std::numbers::pi);
  if (kappa > 0.0) {
    const double a = alpha / kappa;
    return root_half_pi * detail::gamma_ratio(a - 0.5, a + 1.0) / kappa;
  }
  const double k = -kappa;
  const double a = alpha / k;
  return root_half_pi * detail::gamma_ratio(a, a + 1.5) / k;
}

/// Direct tanh-sinh evaluation of the theta integral; an independent check
/// of theta_closed_form.
inline double theta_quadrature(const Fractality& f, double kappa, double abs_tol = 1e-12) {
  detail::require_bound_spectrum(f, kappa, "theta_quadrature");
  const double alpha = f.alpha();
  // z = u^m flattens the z^(p - 1) endpoint behaviour at the origin.
  const double p = kappa > 0.0 ? alpha - 0.5 * kappa : alpha;
  const double m = 1.0 / p;
  auto integrand = [&](double, double u, double one_minus_u) {
    const double log_u = u < 0.5 ? std::log(u) : std::log1p(-one_minus_u);
    const double log_z = m * log_u;
    if (log_z == 0.0) return 0.0;
    // sgn(kappa) (z^-kappa - 1) is positive on (0, 1) for either sign of kappa.
    const double y = -kappa * log_z;
    const double log_bracket = kappa > 0.0 ? detail::log_expm1(y) : std::log(-std::expm1(y));
    return m * std::exp(0.5 * std::log(2.0) + (alpha - 1.0) * log_z + 0.5 * log_bracket + (m - 1.0) * log_u);
  };
  return tanh_sinh(integrand, 0.0, 1.0, abs_tol, 14).value;
}

inline RydbergExponents rydberg_exponents(const Fractality& f, double kappa) {
  detail::require_bound_spectrum(f, kappa, "rydberg_exponents");
  const double denom = 2.0 * f.alpha() - kappa;
  return {-2.0 * kappa / denom, 2.0 / denom, theta_closed_form(f, kappa)};
}

/// Rydberg laws of the full-fractal scenario, kappa = 2 d_s - d_v.
inline RydbergExponents exponents_full(const Fractality& f) {
  const double kappa = f.radial_index();
  if (std::abs(kappa) < kDegenerateKappa) {
    throw DegenerateExponentError("exponents_full: d_v = 2 d_s gives a logarithmic potential");
  }
  const double denom = 3.0 * f.d_v() - 4.0 * f.d_s();
  if (std::abs(denom) <= kScaleFreeTolerance) {
    throw ScaleFreeSingularityError("exponents_full: d_v / d_s = 4/3 is scale-free (margin " + std::to_string(denom) +
                                    ")");
  }
  if (denom < 0.0) {
    throw InstabilityError("exponents_full: d_v / d_s < 4/3 is unstable (margin " + std::to_string(denom) + ")");
  }
  return {-2.0 * kappa / denom, 2.0 / denom, theta_closed_form(f, kappa)};
}

/// Rydberg laws of the embedded scenario, kappa = 1.
inline RydbergExponents exponents_embedded(const Fractality& f) {
  if (f.d_v() > 3.0 || f.d_s() > 2.0) {
    throw ScenarioConstraintError("exponents_embedded: requires d_v <= 3 and d_s <= 2");
  }
  const double denom = 2.0 * f.alpha() - 1.0;
  if (std::abs(denom) <= kScaleFreeTolerance) {
    throw ScaleFreeSingularityError("exponents_embedded: d_v - d_s = 1/2 is scale-free (margin " +
                                    std::to_string(denom) + ")");
  }
  if (denom < 0.0) {
    throw InstabilityError("exponents_embedded: d_v - d_s < 1/2 is unstable (margin " + std::to_string(denom) + ")");
  }
  return {-2.0 / denom, 2.0 / denom, theta_closed_form(f, 1.0)};
}

inline RydbergExponents exponents_for(Scenario s, const Fractality& f) {
  return s == Scenario::FullFractal ? exponents_full(f) : exponents_embedded(f);
}

struct RydbergAsymptote {
  double r_max;
  double e_abs;
};

/// Leading-order large-n size and binding energy of level n.
inline RydbergAsymptote rydberg_asymptote(const Fractality& f, double kappa, int n) {
  if (n < 1) throw DomainError("rydberg_asymptote: n must be >= 1");
  const RydbergExponents ex = rydberg_exponents(f, kappa);
  const double base = std::numbers::pi * n / ex.theta;
  return {std::pow(base, ex.size_exponent), std::pow(base, ex.energy_exponent)};
}

/// Ordinary least-squares slope of log(y) against log(x).
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_slope: need two or more paired samples");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_slope: samples must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw DomainError("loglog_slope: x samples are identical");
  return sxy / sxx;
}

}  // namespace fractatom
