#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fractatom/asymptotics.hpp"
#include "fractatom/errors.hpp"
#include "fractatom/geometry.hpp"
#include "fractatom/parallel.hpp"
#include "fractatom/potentials.hpp"
#include "fractatom/wkb.hpp"

// Direct numerical solution of the rescaled radial Schrodinger equation
//   Psi~'' + Q(r~) Psi~ = 0
// by outward Numerov shooting and node counting. Used to measure how good
// the semiclassical levels of wkb.hpp are; nothing here depends on the
// Langer-modified momentum.

namespace fractatom {

struct OracleConfig {
  double r_inner = 1e-6;
  /// The grid ends at r_outer_factor times the asymptotic r_max, extended
  /// further if needed until the forbidden tail has decayed by tail_decay e-folds.
  double r_outer_factor = 3.0;
  int grid_points = 20000;
  /// Relative width of the final energy bracket.
  double node_tol = 1e-9;
  double tail_decay = 40.0;

  void validate() const {
    if (!(r_inner > 0.0) || !(r_outer_factor > 0.0) || !(node_tol > 0.0) || !(tail_decay > 0.0)) {
      throw DomainError("OracleConfig: parameters must be positive");
    }
    if (grid_points < 1000) throw DomainError("OracleConfig: grid_points must be >= 1000");
  }
};

struct OracleLevel {
  int n = 0;
  double e_abs = 0.0;
  int node_count = 0;
  double boundary_residual = 0.0;  // smallest |Psi~| in the outer forbidden tail over its peak
  double r_outer = 0.0;
};

/// Q(r~) of the unmodified radial equation, with E~ = -sgn(kappa) |E~|.
inline double effective_equation_coefficients(const Fractality& f, double kappa, double e_abs, double r) {
  detail::require_positive_radius(r, "effective_equation_coefficients");
  const double s = sign_of(kappa);
  const double beta = f.radial_index();
  return 2.0 * std::pow(r, 2.0 * f.alpha() - 2.0) * (-s * e_abs + s * std::pow(r, -kappa)) -
         0.25 * (beta * beta - 1.0) / (r * r);
}

/// Exponent s of the regular small-r~ solution Psi~ ~ r~^s, the larger root
/// of s(s - 1) = ((2 d_s - d_v)^2 - 1) / 4.
inline double indicial_exponent(const Fractality& f) { return 0.5 * (1.0 + std::abs(f.radial_index())); }

/// Outward integration result on a log-spaced grid. Psi~ is stored as
/// sign and natural log of magnitude so deep forbidden tails cannot overflow.
struct RadialSolution {
  std::vector<double> log_r;
  std::vector<double> log_abs_psi;
  std::vector<signed char> sign;
  int nodes = 0;
  double last_node_log_r = -std::numeric_limits<double>::infinity();
};

/// Numerov integration of phi'' + k(x) phi = 0 with x = ln r~, phi = r~^(-1/2) Psi~,
/// k = r~^2 Q - 1/4, started on the regular branch phi ~ r~^(s - 1/2).
inline RadialSolution integrate_radial(const Fractality& f, double kappa, double e_abs, double r_inner,
                                       double r_outer, int grid_points) {
  if (!(r_outer > r_inner) || !(r_inner > 0.0)) throw DomainError("integrate_radial: need 0 < r_inner < r_outer");
  const auto count = static_cast<std::size_t>(grid_points);
  const double x0 = std::log(r_inner);
  const double h = (std::log(r_outer) - x0) / static_cast<double>(count - 1);
  const double h2 = h * h / 12.0;
  auto k_at = [&](double x) {
    const double r = std::exp(x);
    return r * r * effective_equation_coefficients(f, kappa, e_abs, r) - 0.25;
  };

  RadialSolution sol;
  sol.log_r.resize(count);
  sol.log_abs_psi.resize(count);
  sol.sign.resize(count);

  const double lead = indicial_exponent(f) - 0.5;
  double log_scale = lead * x0;  // phi_stored * exp(log_scale) = phi
  double phi_prev = 1.0;
  double phi = std::exp(lead * h);
  double w_prev = 1.0 + h2 * k_at(x0);
  double w = 1.0 + h2 * k_at(x0 + h);

  auto store = [&](std::size_t i, double value) {
    const double x = x0 + h * static_cast<double>(i);
    sol.log_r[i] = x;
    sol.log_abs_psi[i] = value == 0.0 ? -std::numeric_limits<double>::infinity()
                                      : std::log(std::abs(value)) + log_scale + 0.5 * x;
    sol.sign[i] = value > 0.0 ? 1 : (value < 0.0 ? -1 : 0);
  };
  store(0, phi_prev);
  store(1, phi);

  int last_sign = 1;
  for (std::size_t i = 2; i < count; ++i) {
    const double x = x0 + h * static_cast<double>(i);
    const double w_next = 1.0 + h2 * k_at(x);
    const double phi_next = ((12.0 - 10.0 * w) * phi - w_prev * phi_prev) / w_next;
    phi_prev = phi;
    phi = phi_next;
    w_prev = w;
    w = w_next;
    if (std::abs(phi) > 1e150) {
      phi *= 1e-150;
      phi_prev *= 1e-150;
      log_scale += 150.0 * std::log(10.0);
    }
    store(i, phi);
    const int s = sol.sign[i];
    if (s != 0 && s != last_sign) {
      ++sol.nodes;
      sol.last_node_log_r = x;
      last_sign = s;
    }
  }
  return sol;
}

namespace detail {

inline void require_oracle_margin(const Fractality& f, double kappa) {
  if (std::abs(kappa) < kDegenerateKappa) throw DegenerateExponentError("oracle: kappa must be nonzero");
  const double margin = 2.0 * f.alpha() - kappa;
  if (margin < WkbConfig{}.min_margin) {
    throw InstabilityError("oracle: refusing unstable or scale-free input, margin " + std::to_string(margin));
  }
}

/// Log-radius of the last point where k = r^2 Q - 1/4 turns negative.
inline double outer_turning_log_r(const RadialSolution& sol, const Fractality& f, double kappa, double e_abs) {
  for (std::size_t i = sol.log_r.size(); i-- > 1;) {
    const double r = std::exp(sol.log_r[i - 1]);
    if (r * r * effective_equation_coefficients(f, kappa, e_abs, r) - 0.25 > 0.0) return sol.log_r[i];
  }
  return sol.log_r.front();
}

/// Picks the grid end: r_outer_factor times the asymptotic r_max, doubled
/// until the WKB decay exponent of the forbidden tail reaches cfg.tail_decay.
inline double oracle_outer_radius(const Fractality& f, double kappa, int n, double e_abs, const OracleConfig& cfg) {
  const double r_asym = rydberg_asymptote(f, kappa, n).r_max;
  auto k_at = [&](double x) {
    const double r = std::exp(x);
    return r * r * effective_equation_coefficients(f, kappa, e_abs, r) - 0.25;
  };
  const double x_start = std::log(r_asym) - 1.0;
  double x_end = std::log(cfg.r_outer_factor * r_asym);
  constexpr double kStep = 0.005;
  for (int doubling = 0; doubling < 64; ++doubling) {
    double decay = 0.0;
    for (double x = x_start; x < x_end; x += kStep) decay += kStep * std::sqrt(std::fmax(-k_at(x), 0.0));
    if (decay >= cfg.tail_decay) break;
    x_end += std::numbers::ln2;
  }
  return std::exp(x_end);
}

}  // namespace detail

/// Eigenvalue of level n (n - 1 nodes) by bisection on the node count.
inline OracleLevel shoot_eigenvalue(const Fractality& f, double kappa, int n, const OracleConfig& cfg = {}) {
  cfg.validate();
  if (n < 1) throw DomainError("shoot_eigenvalue: n must be >= 1");
  detail::require_oracle_margin(f, kappa);

  // The WKB level only seeds the bracket; the answer comes from node counting.
  const double seed = solve_level(f, kappa, n).e_abs;
  const double r_outer = detail::oracle_outer_radius(f, kappa, n, seed, cfg);
  if (!(r_outer > cfg.r_inner)) throw GridTooSmallError("shoot_eigenvalue: outer radius below r_inner");

  auto nodes_at = [&](double e) { return integrate_radial(f, kappa, e, cfg.r_inner, r_outer, cfg.grid_points).nodes; };
  // Binding deeper removes nodes for kappa > 0 and adds them for kappa < 0.
  const bool nodes_fall_with_e = kappa > 0.0;
  auto has_extra_node = [&](int nodes) { return nodes >= n; };

  double lo = 0.5 * seed;
  double hi = 1.5 * seed;
  int nodes_lo = nodes_at(lo);
  int nodes_hi = nodes_at(hi);
  for (int i = 0; i < 60; ++i) {
    const bool lo_ok = nodes_fall_with_e ? has_extra_node(nodes_lo) : !has_extra_node(nodes_lo);
    const bool hi_ok = nodes_fall_with_e ? !has_extra_node(nodes_hi) : has_extra_node(nodes_hi);
    if (lo_ok && hi_ok) break;
    if (!lo_ok) nodes_lo = nodes_at(lo /= 1.5);
    if (!hi_ok) nodes_hi = nodes_at(hi *= 1.5);
    if (i == 59) throw ConvergenceError("shoot_eigenvalue: could not bracket n = " + std::to_string(n));
  }

  int iterations = 0;
  while (hi / lo - 1.0 > cfg.node_tol) {
    if (++iterations > 200) throw ConvergenceError("shoot_eigenvalue: bisection did not converge");
    const double mid = std::sqrt(lo * hi);
    const int nodes = nodes_at(mid);
    if (nodes < std::min(nodes_lo, nodes_hi) || nodes > std::max(nodes_lo, nodes_hi)) {
      throw ConvergenceError("shoot_eigenvalue: node count is not monotone in |E|");
    }
    const bool mid_extra = has_extra_node(nodes);
    if (mid_extra == nodes_fall_with_e) {
      lo = mid;
      nodes_lo = nodes;
    } else {
      hi = mid;
      nodes_hi = nodes;
    }
  }

  OracleLevel level;
  level.n = n;
  level.e_abs = std::sqrt(lo * hi);
  level.r_outer = r_outer;

  // The side of the bracket without the tail node carries the physical n - 1 nodes.
  const double e_inner = nodes_fall_with_e ? hi : lo;
  const RadialSolution below = integrate_radial(f, kappa, e_inner, cfg.r_inner, r_outer, cfg.grid_points);
  level.node_count = below.nodes;
  if (below.nodes != n - 1) {
    throw ConvergenceError("shoot_eigenvalue: expected " + std::to_string(n - 1) + " nodes, found " +
                           std::to_string(below.nodes));
  }

  const RadialSolution sol = integrate_radial(f, kappa, level.e_abs, cfg.r_inner, r_outer, cfg.grid_points);
  const double x_turn = detail::outer_turning_log_r(sol, f, kappa, level.e_abs);
  if (below.last_node_log_r > x_turn) {
    throw GridTooSmallError("shoot_eigenvalue: nodes appear beyond the outer turning point; extend the grid");
  }
  double peak = -std::numeric_limits<double>::infinity();
  double tail = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sol.log_r.size(); ++i) {
    if (sol.log_r[i] <= x_turn) {
      peak = std::max(peak, sol.log_abs_psi[i]);
    } else {
      tail = std::min(tail, sol.log_abs_psi[i]);
    }
  }
  level.boundary_residual = std::isfinite(tail) ? std::exp(tail - peak) : 1.0;
  if (level.boundary_residual > 1e-3) {
    std::ostringstream msg;
    msg << "shoot_eigenvalue: forbidden tail only decays to " << level.boundary_residual
        << " of the peak; grid end r = " << r_outer << " is too close";
    throw GridTooSmallError(msg.str());
  }
  return level;
}

struct OracleComparison {
  int n;
  double wkb_e;
  double oracle_e;
  double rel_diff;
};

struct ComparisonReport {
  std::vector<OracleComparison> rows;  // sorted by n
  std::vector<LevelFailure> failures;
};

/// Relative difference between WKB and shooting eigenvalues for each n.
inline ComparisonReport compare_wkb_oracle(const Fractality& f, double kappa, std::vector<int> n_list,
                                           const WkbConfig& wkb_cfg = {}, const OracleConfig& oracle_cfg = {},
                                           int jobs = 1) {
  std::sort(n_list.begin(), n_list.end());
  n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());
  struct Outcome {
    OracleComparison row{};
    std::string error;
  };
  const auto outcomes = parallel_map(n_list.size(), jobs, [&](std::size_t i) {
    Outcome o;
    o.row.n = n_list[i];
    try {
      const double wkb = solve_level(f, kappa, n_list[i], wkb_cfg).e_abs;
      const double exact = shoot_eigenvalue(f, kappa, n_list[i], oracle_cfg).e_abs;
      o.row = {n_list[i], wkb, exact, std::abs(wkb - exact) / exact};
    } catch (const Error& e) {
      o.error = e.what();
    }
    return o;
  });
  ComparisonReport report;
  for (const auto& o : outcomes) {
    if (o.error.empty()) {
      report.rows.push_back(o.row);
    } else {
      report.failures.push_back({o.row.n, o.error});
    }
  }
  return report;
}

}  // namespace fractatom
