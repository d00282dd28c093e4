#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fractatom/asymptotics.hpp"
#include "fractatom/errors.hpp"
#include "fractatom/geometry.hpp"
#include "fractatom/parallel.hpp"
#include "fractatom/potentials.hpp"
#include "fractatom/quadrature.hpp"
#include "fractatom/roots.hpp"

namespace fractatom {

/// Conversion between physical and rescaled (dimensionless) variables:
///   r~ = r * length_scale,  E~ = E * energy_scale.
struct ScalingContext {
  double length_scale;
  double energy_scale;
  double hbar;
  double mass;

  double to_rescaled_radius(double r) const { return r * length_scale; }
  double to_physical_radius(double r_tilde) const { return r_tilde / length_scale; }
  double to_rescaled_energy(double e) const { return e * energy_scale; }
  double to_physical_energy(double e_tilde) const { return e_tilde / energy_scale; }
};

struct WkbConfig {
  double maslov_index = 2.0;
  double quadrature_abs_tol = 1e-10;
  double energy_rel_tol = 1e-10;
  int max_bracket_doublings = 200;
  /// Refuse 2(d_v - d_s) - kappa below this.
  double min_margin = 1e-4;

  void validate() const {
    if (!(maslov_index > 0.0)) throw DomainError("WkbConfig: maslov index must be positive");
    if (!(quadrature_abs_tol > 0.0) || !(energy_rel_tol > 0.0) || !(min_margin > 0.0)) {
      throw DomainError("WkbConfig: tolerances must be positive");
    }
    if (max_bracket_doublings < 1) throw DomainError("WkbConfig: max_bracket_doublings must be >= 1");
  }
};

/// One semiclassical eigenlevel in rescaled units.
struct SpectrumLevel {
  int n = 0;
  double e_abs = 0.0;
  double e_signed = 0.0;  // -sgn(kappa) |E~|
  double r_min = 0.0;
  double r_max = 0.0;
  double action_residual = 0.0;
  bool inner_at_origin = false;  // centrifugal coefficient vanishes, r_min = 0
  bool near_threshold = false;   // margin below 10 * min_margin
};

inline ScalingContext scaling_context(const Fractality& f, const PowerLawPotential& p, double hbar, double mass,
                                      double min_margin = WkbConfig{}.min_margin) {
  if (!(hbar > 0.0) || !(mass > 0.0)) throw DomainError("scaling_context: hbar and mass must be positive");
  const double margin = 2.0 * f.alpha() - p.kappa();
  if (std::abs(margin) < min_margin) {
    throw ScaleFreeSingularityError("scaling_context: kappa within " + std::to_string(min_margin) +
                                    " of 2(d_v - d_s)");
  }
  if (margin < 0.0) throw InstabilityError("scaling_context: unstable fractality");
  const double exponent = 1.0 / (p.kappa() - 2.0 * f.alpha());
  const double ratio = hbar * hbar * laplacian_prefactor(f) / (mass * p.magnitude());
  const double length = std::pow(ratio, exponent);
  const double energy = std::pow(1.0 / ratio, p.kappa() * exponent) / p.magnitude();
  if (!std::isfinite(length) || !std::isfinite(energy) || !(length > 0.0) || !(energy > 0.0)) {
    throw DomainError("scaling_context: scales are not finite");
  }
  return {length, energy, hbar, mass};
}

/// Power of r~ relating the rescaled wavefunction to Psi.
inline double wavefunction_exponent(const Fractality& f) { return 0.5 * (f.radial_index() + 1.0); }

namespace detail {

/// The radial problem at fixed |E~| written in x = ln r~:
///   G(x) = r~^2 p'(r~)^2 = 2 sgn(kappa) e^(2 alpha x) (e^(-kappa x) - |E~|) - c
/// with c the Langer coefficient (2 d_s - d_v)^2 / 4.
struct RadialProblem {
  double alpha;
  double kappa;
  double sign;
  double centrifugal;
  double e_abs;

  RadialProblem(const Fractality& f, double kappa_, double e_abs_)
      : alpha(f.alpha()),
        kappa(kappa_),
        sign(sign_of(kappa_)),
        centrifugal(0.25 * f.radial_index() * f.radial_index()),
        e_abs(e_abs_) {}

  double g_log(double x) const {
    return 2.0 * sign * std::exp(2.0 * alpha * x) * (std::exp(-kappa * x) - e_abs) - centrifugal;
  }

  /// ln of the radius where G peaks; G is increasing below and decreasing above it.
  double log_peak() const { return std::log((2.0 * alpha - kappa) / (2.0 * alpha * e_abs)) / kappa; }
};

inline void require_wkb_margin(const Fractality& f, double kappa, const WkbConfig& cfg, const char* what) {
  if (!std::isfinite(kappa) || std::abs(kappa) < kDegenerateKappa) {
    throw DegenerateExponentError(std::string(what) + ": kappa must be nonzero");
  }
  const double margin = 2.0 * f.alpha() - kappa;
  if (margin <= -cfg.min_margin) {
    throw InstabilityError(std::string(what) + ": unstable fractality, margin " + std::to_string(margin));
  }
  if (margin < cfg.min_margin) {
    throw ScaleFreeSingularityError(std::string(what) + ": margin " + std::to_string(margin) +
                                    " is inside the scale-free guard band");
  }
}

inline double momentum_radicand(const Fractality& f, double kappa, double e_abs, double r, double centrifugal) {
  detail::require_positive_radius(r, "momentum");
  if (!(e_abs > 0.0)) throw DomainError("momentum: |E| must be positive");
  const double s = sign_of(kappa);
  const double e_signed = -s * e_abs;
  return 2.0 * std::pow(r, 2.0 * f.alpha() - 2.0) * (e_signed + s * std::pow(r, -kappa)) - centrifugal / (r * r);
}

inline double checked_sqrt(double radicand, double r) {
  if (radicand < 0.0) {
    throw DomainError("momentum: r = " + std::to_string(r) + " is outside the classically allowed region");
  }
  return std::sqrt(radicand);
}

}  // namespace detail

/// Unmodified WKB radial momentum read off the rescaled radial equation.
inline double radial_momentum(const Fractality& f, double kappa, double e_abs, double r) {
  const double beta = f.radial_index();
  return detail::checked_sqrt(detail::momentum_radicand(f, kappa, e_abs, r, 0.25 * (beta * beta - 1.0)), r);
}

/// Langer-modified radial momentum: centrifugal coefficient (b^2 - 1)/4 -> b^2/4, b = 2 d_s - d_v.
inline double langer_momentum(const Fractality& f, double kappa, double e_abs, double r) {
  const double beta = f.radial_index();
  return detail::checked_sqrt(detail::momentum_radicand(f, kappa, e_abs, r, 0.25 * beta * beta), r);
}

struct TurningPoints {
  double r_min;
  double r_max;
  bool inner_at_origin;
};

namespace detail {

struct LogTurningPoints {
  double x_min;  // -inf when the allowed region reaches the origin
  double x_max;
  bool inner_at_origin;
};

inline LogTurningPoints log_turning_points(const RadialProblem& prob, int max_doublings) {
  const double x_peak = prob.log_peak();
  const double g_peak = prob.g_log(x_peak);
  if (!(g_peak > 0.0)) {
    throw NoBoundStateError("turning_points: no classically allowed region at |E| = " + std::to_string(prob.e_abs));
  }
  auto g = [&](double x) { return prob.g_log(x); };
  const double step = std::numbers::ln2;
  constexpr double kLogTol = 1e-14;

  auto outer = march_to_sign_change(g, x_peak, g_peak, step, max_doublings);
  if (!outer) {
    throw NoBoundStateError("turning_points: outer turning point not bracketed after " +
                            std::to_string(max_doublings) + " doublings");
  }
  const Bracket ob = bisect(g, *outer, kLogTol * std::fmax(1.0, std::abs(outer->hi)));
  const double x_max = ob.f_lo > 0.0 ? ob.lo : ob.hi;

  LogTurningPoints tp{-std::numeric_limits<double>::infinity(), x_max, true};
  if (prob.centrifugal > 0.0) {
    if (auto inner = march_to_sign_change(g, x_peak, g_peak, -step, max_doublings)) {
      const Bracket ib = bisect(g, *inner, kLogTol * std::fmax(1.0, std::abs(inner->hi)));
      tp.x_min = ib.f_lo > 0.0 ? ib.lo : ib.hi;
      tp.inner_at_origin = false;
    }
  }
  return tp;
}

struct ActionEvaluation {
  double action = 0.0;
  LogTurningPoints turning{};
  bool allowed = false;
};

/// Langer-modified action between the turning points; zero when no allowed region exists.
inline ActionEvaluation evaluate_action(const Fractality& f, double kappa, double e_abs, const WkbConfig& cfg) {
  const RadialProblem prob(f, kappa, e_abs);
  ActionEvaluation out;
  if (!(prob.g_log(prob.log_peak()) > 0.0)) return out;
  out.turning = log_turning_points(prob, cfg.max_bracket_doublings);
  out.allowed = true;
  const auto& tp = out.turning;
  if (!tp.inner_at_origin) {
    // In x = ln r the integrand is sqrt(G(x)), vanishing like a square root at both ends.
    auto integrand = [&](double x, double, double) { return std::sqrt(std::fmax(prob.g_log(x), 0.0)); };
    out.action = tanh_sinh(integrand, tp.x_min, tp.x_max, cfg.quadrature_abs_tol).value;
  } else {
    // Allowed region touches r = 0: integrate sqrt(G)/r in r, an integrable power singularity at 0.
    const double r_max = std::exp(tp.x_max);
    auto integrand = [&](double r, double dist0, double) {
      const double x = std::log(dist0);
      return std::sqrt(std::fmax(prob.g_log(x), 0.0)) / r;
    };
    out.action = tanh_sinh(integrand, 0.0, r_max, cfg.quadrature_abs_tol).value;
  }
  return out;
}

}  // namespace detail

/// Inner and outer zeros of the Langer-modified radicand.
inline TurningPoints turning_points(const Fractality& f, double kappa, double e_abs, const WkbConfig& cfg = {}) {
  detail::require_wkb_margin(f, kappa, cfg, "turning_points");
  if (!(e_abs > 0.0) || !std::isfinite(e_abs)) throw DomainError("turning_points: |E| must be positive");
  const auto tp = detail::log_turning_points(detail::RadialProblem(f, kappa, e_abs), cfg.max_bracket_doublings);
  return {tp.inner_at_origin ? 0.0 : std::exp(tp.x_min), std::exp(tp.x_max), tp.inner_at_origin};
}

/// Half the closed-orbit action, int_{r_min}^{r_max} p'(r) dr.
inline double action_integral(const Fractality& f, double kappa, double e_abs, const WkbConfig& cfg = {}) {
  cfg.validate();
  detail::require_wkb_margin(f, kappa, cfg, "action_integral");
  if (!(e_abs > 0.0) || !std::isfinite(e_abs)) throw DomainError("action_integral: |E| must be positive");
  const auto ev = detail::evaluate_action(f, kappa, e_abs, cfg);
  if (!ev.allowed) {
    throw NoBoundStateError("action_integral: no classically allowed region at |E| = " + std::to_string(e_abs));
  }
  return ev.action;
}

/// Right-hand side of the quantization condition, pi [(n - 1) + mu/4].
inline double quantized_action(int n, double maslov_index) {
  return std::numbers::pi * ((n - 1) + 0.25 * maslov_index);
}

/// Solves the Wilson-Sommerfeld condition for level n.
///
/// The root is sought in ln|E| starting from the large-n asymptote, with a
/// geometric bracket expansion, bisection to energy_rel_tol and a final
/// secant step. The action must be monotone in |E| over every bracket
/// visited; a violation raises ConvergenceError.
inline SpectrumLevel solve_level(const Fractality& f, double kappa, int n, const WkbConfig& cfg = {}) {
  cfg.validate();
  if (n < 1) throw DomainError("solve_level: n must be >= 1");
  detail::require_wkb_margin(f, kappa, cfg, "solve_level");

  const double target = quantized_action(n, cfg.maslov_index);
  // Action falls with |E| for kappa > 0 (attractive, bounded region shrinks)
  // and grows with |E| for kappa < 0 (confining).
  const bool decreasing = kappa > 0.0;
  const double noise = 10.0 * cfg.quadrature_abs_tol;

  double seed = 0.0;
  try {
    seed = std::log(rydberg_asymptote(f, kappa, n).e_abs);
    if (!std::isfinite(seed)) seed = 0.0;
  } catch (const Error&) {
    seed = 0.0;
  }

  auto residual = [&](double log_e) { return detail::evaluate_action(f, kappa, std::exp(log_e), cfg).action - target; };

  const double f0 = residual(seed);
  const double direction = ((f0 > 0.0) == decreasing) ? 1.0 : -1.0;

  // March with a monotonicity check on the way.
  double prev = f0;
  auto monitored = [&](double log_e) {
    const double v = residual(log_e);
    const bool wrong_way = decreasing == (direction > 0.0) ? v > prev + noise : v < prev - noise;
    if (wrong_way) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "solve_level: action is not monotone in |E| near |E| = " << std::exp(log_e) << " (n = " << n << ")";
      throw ConvergenceError(msg.str());
    }
    prev = v;
    return v;
  };
  std::optional<Bracket> bracket = f0 == 0.0 ? Bracket{seed, seed, 0.0, 0.0}
                                             : march_to_sign_change(monitored, seed, f0,
                                                                    direction * std::numbers::ln2,
                                                                    cfg.max_bracket_doublings);
  if (!bracket) {
    throw ConvergenceError("solve_level: could not bracket level n = " + std::to_string(n) + " after " +
                           std::to_string(cfg.max_bracket_doublings) + " doublings");
  }

  // Bisection in ln|E|; every midpoint value must lie between the initial bracket values.
  Bracket b = *bracket;
  auto within_bracket = [&](double log_e) {
    const double v = residual(log_e);
    if (v < std::fmin(b.f_lo, b.f_hi) - noise || v > std::fmax(b.f_lo, b.f_hi) + noise) {
      throw ConvergenceError("solve_level: action is not monotone inside the bracket for n = " + std::to_string(n));
    }
    return v;
  };
  b = bisect(within_bracket, b, cfg.energy_rel_tol, 400);

  double log_e = std::abs(b.f_lo) <= std::abs(b.f_hi) ? b.lo : b.hi;
  double best = std::fmin(std::abs(b.f_lo), std::abs(b.f_hi));
  if (auto sp = secant_point(b); sp && best > 0.0) {
    const double v = residual(*sp);
    if (std::abs(v) < best) {
      log_e = *sp;
      best = std::abs(v);
    }
  }

  const double e_abs = std::exp(log_e);
  const auto ev = detail::evaluate_action(f, kappa, e_abs, cfg);
  if (!ev.allowed) throw ConvergenceError("solve_level: converged outside the allowed region");

  SpectrumLevel level;
  level.n = n;
  level.e_abs = e_abs;
  level.e_signed = -sign_of(kappa) * e_abs;
  level.inner_at_origin = ev.turning.inner_at_origin;
  level.r_min = ev.turning.inner_at_origin ? 0.0 : std::exp(ev.turning.x_min);
  level.r_max = std::exp(ev.turning.x_max);
  level.action_residual = ev.action - target;
  level.near_threshold = (2.0 * f.alpha() - kappa) < 10.0 * cfg.min_margin;
  return level;
}

struct LevelFailure {
  int n;
  std::string message;
};

struct SpectrumResult {
  std::vector<SpectrumLevel> levels;  // ascending n, failed levels omitted
  std::vector<LevelFailure> failures;
};

/// Solves levels n_lo..n_hi; failures are collected rather than aborting the batch.
inline SpectrumResult spectrum(const Fractality& f, double kappa, int n_lo, int n_hi, const WkbConfig& cfg = {},
                               int jobs = 1) {
  if (n_lo < 1 || n_hi < n_lo) throw DomainError("spectrum: require 1 <= n_lo <= n_hi");
  struct Outcome {
    SpectrumLevel level;
    std::string error;
  };
  const auto count = static_cast<std::size_t>(n_hi - n_lo + 1);
  const auto outcomes = parallel_map(count, jobs, [&](std::size_t i) {
    Outcome o;
    const int n = n_lo + static_cast<int>(i);
    try {
      o.level = solve_level(f, kappa, n, cfg);
    } catch (const Error& e) {
      o.level.n = n;
      o.error = e.what();
    }
    return o;
  });
  SpectrumResult result;
  for (const auto& o : outcomes) {
    if (o.error.empty()) {
      result.levels.push_back(o.level);
    } else {
      result.failures.push_back({o.level.n, o.error});
    }
  }
  return result;
}

}  // namespace fractatom
