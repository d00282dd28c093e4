#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "fractatom/errors.hpp"
#include "fractatom/special.hpp"

namespace fractatom {

/// Which physical picture the electron lives in.
///  - FullFractal: nuclear field and electron share the fractal space.
///  - Embedded: field is 3D Euclidean, electron hops on an embedded fractal lattice.
enum class Scenario { FullFractal, Embedded };

inline const char* to_string(Scenario s) {
  return s == Scenario::FullFractal ? "full" : "embedded";
}

/// Smallest admissible gap d_v - d_s.
inline constexpr double kMinDimensionGap = 1e-9;

/// Volume and surface fractal dimensions (d_v, d_s) of a space.
///
/// Constructed through the named factories, which validate the invariants
/// d_v - d_s >= kMinDimensionGap, d_s > 0 and finiteness. `euclidean(1)` is
/// the only way to obtain d_s = 0.
class Fractality {
 public:
  static Fractality make(double d_v, double d_s) {
    validate(d_v, d_s, /*allow_zero_surface=*/false);
    return Fractality(d_v, d_s);
  }

  /// Fractality of an electron confined to a lattice inside 3D Euclidean
  /// space; additionally enforces d_v <= 3 and d_s <= 2.
  static Fractality embedded(double d_v, double d_s) {
    validate(d_v, d_s, false);
    if (d_v > 3.0 || d_s > 2.0) {
      throw ScenarioConstraintError("embedded fractality must satisfy d_v <= 3 and d_s <= 2, got (" +
                                    std::to_string(d_v) + ", " + std::to_string(d_s) + ")");
    }
    return Fractality(d_v, d_s);
  }

  /// D-dimensional Euclidean space as the fractality (D, D - 1).
  static Fractality euclidean(int d) {
    if (d < 1) throw DomainError("euclidean dimension must be >= 1, got " + std::to_string(d));
    validate(d, d - 1, /*allow_zero_surface=*/true);
    return Fractality(d, d - 1);
  }

  /// Builds the fractality appropriate to a scenario (embedding bound applied for Embedded).
  static Fractality for_scenario(Scenario s, double d_v, double d_s) {
    return s == Scenario::Embedded ? embedded(d_v, d_s) : make(d_v, d_s);
  }

  double d_v() const { return d_v_; }
  double d_s() const { return d_s_; }

  /// alpha = d_v - d_s; the Laplacian scales as r^(-2 alpha).
  double alpha() const { return d_v_ - d_s_; }

  /// 2 d_s - d_v. Enters the first-order Laplacian term, the centrifugal
  /// coefficient of the radial equation, and equals the full-scenario kappa.
  double radial_index() const { return 2.0 * d_s_ - d_v_; }

  bool operator==(const Fractality&) const = default;

 private:
  Fractality(double d_v, double d_s) : d_v_(d_v), d_s_(d_s) {}

  static void validate(double d_v, double d_s, bool allow_zero_surface) {
    if (!std::isfinite(d_v) || !std::isfinite(d_s)) {
      throw DomainError("fractal dimensions must be finite");
    }
    if (allow_zero_surface ? d_s < 0.0 : d_s <= 0.0) {
      throw DomainError("surface dimension d_s must be positive, got " + std::to_string(d_s));
    }
    if (d_v - d_s < kMinDimensionGap) {
      throw DomainError("volume dimension must exceed surface dimension, got (" + std::to_string(d_v) +
                        ", " + std::to_string(d_s) + ")");
    }
  }

  double d_v_;
  double d_s_;
};

namespace detail {
inline void require_positive_radius(double r, const char* what) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError(std::string(what) + ": radius must be positive and finite, got " + std::to_string(r));
  }
}
}  // namespace detail

/// Volume of a fractal ball, continued from the hypersphere formula.
inline double ball_volume(const Fractality& f, double r) {
  detail::require_positive_radius(r, "ball_volume");
  using std::numbers::pi;
  return std::pow(pi, 0.5 * f.d_v()) / gamma(0.5 * (f.d_v() + 2.0)) * std::pow(r, f.d_v());
}

/// Surface area of a fractal ball of radius r.
inline double ball_area(const Fractality& f, double r) {
  detail::require_positive_radius(r, "ball_area");
  using std::numbers::pi;
  const double half = 0.5 * (f.d_s() + 1.0);
  return 2.0 * std::pow(pi, half) / gamma(half) * std::pow(r, f.d_s());
}

/// Prefactor F(d_v, d_s) of the radial Laplacian. Equals 1 on Euclidean spaces.
inline double laplacian_prefactor(const Fractality& f) {
  using std::numbers::pi;
  const double a = f.alpha();
  return gamma(0.5 * a) * gamma(0.5 * f.d_v()) / (std::pow(pi, a - 0.5) * gamma(0.5 * (f.d_s() + 1.0)));
}

/// Radial Laplacian written as
///   Delta S = prefactor * [ r^second_order_exponent S'' + first_order_numerator r^first_order_exponent S' ].
struct LaplacianCoefficients {
  double prefactor;
  double second_order_exponent;
  double first_order_exponent;
  double first_order_numerator;

  /// Evaluates Delta S at r from the first and second radial derivatives of S.
  double apply(double r, double first_derivative, double second_derivative) const {
    return prefactor * (std::pow(r, second_order_exponent) * second_derivative +
                        first_order_numerator * std::pow(r, first_order_exponent) * first_derivative);
  }
};

inline LaplacianCoefficients laplacian_coefficients(const Fractality& f) {
  const double a = f.alpha();
  return LaplacianCoefficients{
      .prefactor = laplacian_prefactor(f),
      .second_order_exponent = -(2.0 * a - 2.0),
      .first_order_exponent = -(2.0 * a - 1.0),
      .first_order_numerator = f.radial_index() + 1.0,
  };
}

/// Scalar multiplying dS/dr in the fractal gradient of a radial function.
inline double gradient_coefficient(const Fractality& f, double r) {
  detail::require_positive_radius(r, "gradient_coefficient");
  using std::numbers::pi;
  const double a = f.alpha();
  return gamma(0.5 * a) / std::pow(pi, 0.5 * a) * std::pow(r, 1.0 - a);
}

}  // namespace fractatom
