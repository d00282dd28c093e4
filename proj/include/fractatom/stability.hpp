#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "fractatom/geometry.hpp"
#include "fractatom/potentials.hpp"

namespace fractatom {

enum class Classification { Stable, ScaleFree, Unstable };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::Stable:
      return "stable";
    case Classification::ScaleFree:
      return "scale-free";
    case Classification::Unstable:
      return "unstable";
  }
  return "unknown";
}

/// Half-width of the margin band reported as ScaleFree.
inline constexpr double kScaleFreeTolerance = 1e-9;

struct StabilityReport {
  Scenario scenario;
  Classification classification;
  double margin;  // 2(d_v - d_s) - kappa
  double kappa;
};

/// Spatial scaling exponents of the two Hamiltonian terms: the Laplacian
/// goes as r^laplacian_exponent, the potential as r^potential_exponent.
struct ScalingExponents {
  double laplacian_exponent;
  double potential_exponent;
};

inline ScalingExponents hamiltonian_scaling_exponents(const Fractality& f, double kappa) {
  return {-2.0 * f.alpha(), -kappa};
}

inline ScalingExponents hamiltonian_scaling_exponents(const Fractality& f, const PowerLawPotential& p) {
  return hamiltonian_scaling_exponents(f, p.kappa());
}

inline Classification classify_margin(double margin) {
  if (margin > kScaleFreeTolerance) return Classification::Stable;
  if (margin < -kScaleFreeTolerance) return Classification::Unstable;
  return Classification::ScaleFree;
}

/// Quantum stability from the scale-free criterion. Takes kappa directly so
/// the full-scenario kappa = 0 line (where no finite potential exists) can
/// still be classified.
inline StabilityReport classify_quantum(const Fractality& f, double kappa, Scenario scenario) {
  const double margin = 2.0 * f.alpha() - kappa;
  return {scenario, classify_margin(margin), margin, kappa};
}

inline StabilityReport classify_quantum(const Fractality& f, const PowerLawPotential& p, Scenario scenario) {
  return classify_quantum(f, p.kappa(), scenario);
}

inline StabilityReport classify_quantum(const Fractality& f, Scenario scenario) {
  return classify_quantum(f, scenario_kappa(scenario, f), scenario);
}

/// d_v on the full-scenario scale-free line d_v / d_s = 4/3.
inline double scale_free_locus_full(double d_s) {
  if (!(d_s > 0.0)) throw DomainError("d_s must be positive");
  return 4.0 / 3.0 * d_s;
}

/// d_v on the embedded-scenario scale-free line d_v - d_s = 1/2.
inline double scale_free_locus_embedded(double d_s) {
  if (!(d_s > 0.0)) throw DomainError("d_s must be positive");
  return d_s + 0.5;
}

inline Fractality euclidean_fractality(int d) { return Fractality::euclidean(d); }

/// Location of a local minimum of the classical effective potential, if any.
///
/// The attractive force magnitude is g r^(-kappa-1) with g = |kappa| |U|;
/// at kappa = 0 the logarithmic limit g = 1 is used.
inline std::optional<double> effective_potential_minimum(double kappa, double magnitude, double angular_momentum,
                                                         double mass) {
  const double g = std::abs(kappa) < kDegenerateKappa ? 1.0 : std::abs(kappa) * magnitude;
  const double l2m = angular_momentum * angular_momentum / mass;
  const double power = 2.0 - kappa;
  if (std::abs(power) < kDegenerateKappa) return std::nullopt;
  // U_eff'(r) = g r^(-kappa-1) - l2m r^-3 vanishes at r^(2-kappa) = l2m / g.
  const double r_star = std::pow(l2m / g, 1.0 / power);
  if (!std::isfinite(r_star) || !(r_star > 0.0)) return std::nullopt;
  const double curvature = -g * (kappa + 1.0) * std::pow(r_star, -kappa - 2.0) + 3.0 * l2m / std::pow(r_star, 4.0);
  if (curvature > 0.0) return r_star;
  return std::nullopt;
}

/// Ehrenfest stability of a planetary orbit in D-dimensional Euclidean space
/// (kappa = D - 2, L = m = |U| = 1).
inline Classification classify_classical_euclidean(int d) {
  const Fractality f = euclidean_fractality(d);
  const double kappa = f.radial_index();
  return effective_potential_minimum(kappa, 1.0, 1.0, 1.0) ? Classification::Stable : Classification::Unstable;
}

}  // namespace fractatom
