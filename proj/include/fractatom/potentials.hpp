#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "fractatom/errors.hpp"
#include "fractatom/geometry.hpp"
#include "fractatom/special.hpp"

namespace fractatom {

/// |kappa| below this is treated as the logarithmic (unsupported) regime.
inline constexpr double kDegenerateKappa = 1e-9;

inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Attractive central potential U(r) = -sgn(kappa) |U| r^(-kappa).
class PowerLawPotential {
 public:
  PowerLawPotential(double kappa, double magnitude) : kappa_(kappa), magnitude_(magnitude) {
    if (!std::isfinite(kappa) || std::abs(kappa) < kDegenerateKappa) {
      throw DegenerateExponentError("power-law exponent kappa must be nonzero, got " + std::to_string(kappa));
    }
    if (!std::isfinite(magnitude) || !(magnitude > 0.0)) {
      throw DomainError("potential magnitude must be positive, got " + std::to_string(magnitude));
    }
  }

  double kappa() const { return kappa_; }
  double magnitude() const { return magnitude_; }
  double sign() const { return sign_of(kappa_); }

 private:
  double kappa_;
  double magnitude_;
};

/// Nuclear charge number Z and elementary charge |q_e|.
struct Charges {
  int z = 1;
  double q_e = 1.0;

  Charges() = default;
  Charges(int z_, double q_e_) : z(z_), q_e(q_e_) {
    if (z < 1) throw DomainError("nuclear charge number must be >= 1");
    if (!(q_e > 0.0) || !std::isfinite(q_e)) throw DomainError("elementary charge must be positive");
  }
};

/// Coulomb interaction when field and electron share the fractal space.
inline PowerLawPotential coulomb_full(const Fractality& f, const Charges& c = {}) {
  using std::numbers::pi;
  const double kappa = f.radial_index();
  if (std::abs(kappa) < kDegenerateKappa) {
    throw DegenerateExponentError("full-fractal Coulomb potential is logarithmic at d_v = 2 d_s (kappa = 0)");
  }
  const double coeff = gamma(0.5 * (f.d_s() + 1.0)) /
                       (2.0 * kappa * std::pow(pi, 0.5 * (kappa + 1.0)) * gamma(0.5 * f.alpha()));
  return PowerLawPotential(kappa, std::abs(coeff) * c.z * c.q_e * c.q_e);
}

/// Coulomb interaction of a 3D field felt by an electron on an embedded lattice.
inline PowerLawPotential coulomb_embedded(const Charges& c = {}) {
  using std::numbers::pi;
  return PowerLawPotential(1.0, c.z * c.q_e * c.q_e / (4.0 * pi));
}

inline PowerLawPotential coulomb_potential(Scenario s, const Fractality& f, const Charges& c = {}) {
  return s == Scenario::FullFractal ? coulomb_full(f, c) : coulomb_embedded(c);
}

/// Interaction exponent for a scenario without building the full potential
/// (stays defined at kappa = 0, where only the magnitude diverges).
inline double scenario_kappa(Scenario s, const Fractality& f) {
  return s == Scenario::FullFractal ? f.radial_index() : 1.0;
}

inline double potential_energy(const PowerLawPotential& p, double r) {
  detail::require_positive_radius(r, "potential_energy");
  return -p.sign() * p.magnitude() * std::pow(r, -p.kappa());
}

/// Gauss-law field magnitude Z|q_e| / A(r) around the nucleus.
inline double electric_field_magnitude(const Fractality& f, const Charges& c, double r) {
  detail::require_positive_radius(r, "electric_field_magnitude");
  return c.z * c.q_e / ball_area(f, r);
}

/// Classical effective potential U(r) + L^2 / (2 m r^2).
inline double classical_effective_potential(const PowerLawPotential& p, double angular_momentum, double mass,
                                            double r) {
  detail::require_positive_radius(r, "classical_effective_potential");
  if (angular_momentum < 0.0) throw DomainError("angular momentum must be nonnegative");
  if (!(mass > 0.0)) throw DomainError("mass must be positive");
  return potential_energy(p, r) + angular_momentum * angular_momentum / (2.0 * mass * r * r);
}

}  // namespace fractatom
