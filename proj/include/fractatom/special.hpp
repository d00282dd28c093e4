#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "fractatom/errors.hpp"

namespace fractatom {

namespace detail {

// Lanczos approximation, g = 7, nine terms. Relative error is below 1e-15
// on the positive real axis once combined with the reflection formula.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoefficients = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline double lanczos_gamma(double x) {
  using std::numbers::pi;
  if (x < 0.5) {
    // Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    return pi / (std::sin(pi * x) * lanczos_gamma(1.0 - x));
  }
  x -= 1.0;
  double series = kLanczosCoefficients[0];
  for (std::size_t i = 1; i < kLanczosCoefficients.size(); ++i) {
    series += kLanczosCoefficients[i] / (x + static_cast<double>(i));
  }
  const double t = x + kLanczosG + 0.5;
  // t^(x+1/2) is split in two halves so the product stays finite up to x ~ 171.
  const double half_power = std::pow(t, 0.5 * (x + 0.5));
  return std::sqrt(2.0 * pi) * half_power * (half_power * std::exp(-t)) * series;
}

}  // namespace detail

/// Euler Gamma function for strictly positive, finite arguments.
inline double gamma(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError("gamma: argument must be positive and finite, got " + std::to_string(x));
  }
  return detail::lanczos_gamma(x);
}

}  // namespace fractatom
