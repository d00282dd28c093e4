#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fractatom/asymptotics.hpp"
#include "fractatom/oracle.hpp"

using namespace fractatom;

TEST(OracleConfig, Validation) {
  OracleConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.grid_points = 999;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = {};
  cfg.r_inner = 0.0;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(EffectiveEquation, Coefficients) {
  const Fractality h = Fractality::make(3, 2);
  for (double r : {0.5, 1.0, 4.0}) EXPECT_NEAR(effective_equation_coefficients(h, 1.0, 0.3, r), 2.0 * (-0.3 + 1.0 / r), 1e-14);
  const Fractality two = Fractality::make(2, 1);
  for (double r : {0.5, 2.0}) {
    EXPECT_NEAR(effective_equation_coefficients(two, 1.0, 0.3, r), 2.0 * (-0.3 + 1.0 / r) + 0.25 / (r * r), 1e-14);
  }
  EXPECT_THROW(effective_equation_coefficients(h, 1.0, 0.3, 0.0), DomainError);
}

TEST(EffectiveEquation, SquareOfRadialMomentum) {
  for (auto [dv, ds] : {std::pair{3.0, 2.0}, {2.5, 1.0}, {2.1, 1.4}}) {
    const Fractality f = Fractality::make(dv, ds);
    const double k = f.radial_index();
    const double e = rydberg_asymptote(f, k, 4).e_abs;
    const auto tp = turning_points(f, k, e);
    for (double t = 0.1; t < 1.0; t += 0.2) {
      const double r = tp.r_min + t * (tp.r_max - tp.r_min);
      const double p = radial_momentum(f, k, e, r);
      EXPECT_NEAR(effective_equation_coefficients(f, k, e, r), p * p, 1e-12 * (1.0 + p * p)) << dv << " " << r;
    }
  }
}

TEST(Shooting, HydrogenLevels) {
  const Fractality h = Fractality::make(3, 2);
  for (int n : {1, 2, 3, 7}) {
    const OracleLevel lvl = shoot_eigenvalue(h, 1.0, n);
    EXPECT_NEAR(lvl.e_abs, 0.5 / (n * n), 1e-6) << n;
    EXPECT_NEAR(lvl.e_abs * 2.0 * n * n, 1.0, 1e-8) << n;
    EXPECT_EQ(lvl.node_count, n - 1);
    EXPECT_LE(lvl.boundary_residual, 1e-3);
  }
}

TEST(Shooting, FractalLevelNearWkb) {
  const Fractality f = Fractality::make(2.1, 1.4);
  const double wkb = solve_level(f, 0.7, 5).e_abs;
  const OracleLevel lvl = shoot_eigenvalue(f, 0.7, 5);
  EXPECT_NEAR(lvl.e_abs / wkb, 1.0, 0.05);
  EXPECT_EQ(lvl.node_count, 4);
  const OracleLevel conf = shoot_eigenvalue(Fractality::make(2.5, 1.0), -0.5, 6);
  EXPECT_EQ(conf.node_count, 5);
  EXPECT_LE(conf.boundary_residual, 1e-3);
}

TEST(Shooting, GridRefinement) {
  const Fractality h = Fractality::make(3, 2);
  OracleConfig fine;
  fine.grid_points *= 2;
  for (int n : {1, 4, 12}) {
    const double coarse = shoot_eigenvalue(h, 1.0, n).e_abs;
    const double refined = shoot_eigenvalue(h, 1.0, n, fine).e_abs;
    EXPECT_LT(std::abs(coarse - refined) / refined, 1e-7) << n;
  }
}

TEST(Shooting, IndicialExponent) {
  for (auto [dv, ds] : {std::pair{3.0, 2.0}, {2.5, 1.0}, {2.1, 1.4}}) {
    const Fractality f = Fractality::make(dv, ds);
    const double k = f.radial_index();
    const RadialSolution sol = integrate_radial(f, k, 0.3, 1e-6, 10.0, 20000);
    // Fit ln|Psi~| against ln r~ between r~ = 1e-5 and 1e-3.
    std::vector<double> r;
    std::vector<double> psi;
    for (std::size_t i = 0; i < sol.log_r.size(); ++i) {
      if (sol.log_r[i] > std::log(1e-5) && sol.log_r[i] < std::log(1e-3)) {
        r.push_back(std::exp(sol.log_r[i]));
        psi.push_back(std::exp(sol.log_abs_psi[i]));
      }
    }
    const double s = loglog_slope(r, psi);
    const double expected = 0.5 * (1.0 + std::abs(2.0 * ds - dv));
    EXPECT_NEAR(s / expected, 1.0, 0.01) << dv << " " << ds;
    EXPECT_DOUBLE_EQ(indicial_exponent(f), expected);
  }
}

TEST(Shooting, NodeCountMonotoneInEnergy) {
  const Fractality f = Fractality::make(2.1, 1.4);
  int prev = 1 << 30;
  for (double e = 1e-3; e < 1.0; e *= 1.3) {
    const int nodes = integrate_radial(f, 0.7, e, 1e-6, 3e4, 20000).nodes;
    EXPECT_LE(nodes, prev) << e;
    prev = nodes;
  }
}

TEST(Shooting, Refusals) {
  EXPECT_THROW(shoot_eigenvalue(Fractality::make(1.79, 1.48), 1.17, 1), InstabilityError);
  EXPECT_THROW(shoot_eigenvalue(Fractality::make(3, 2), 1.0, 0), DomainError);
  OracleConfig tiny;
  tiny.r_inner = 1e4;
  EXPECT_THROW(shoot_eigenvalue(Fractality::make(3, 2), 1.0, 3, tiny), GridTooSmallError);
}

TEST(Compare, HydrogenExactness) {
  const auto rep = compare_wkb_oracle(Fractality::make(3, 2), 1.0, {10, 1, 5});
  ASSERT_TRUE(rep.failures.empty());
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_EQ(rep.rows[0].n, 1);
  EXPECT_EQ(rep.rows[2].n, 10);
  for (const auto& row : rep.rows) EXPECT_LE(row.rel_diff, 1e-5) << row.n;
}

TEST(Compare, ConfiningBranchShrinks) {
  const auto rep = compare_wkb_oracle(Fractality::make(2.5, 1.0), -0.5, {10, 20}, {}, {}, 2);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_LT(rep.rows[1].rel_diff, rep.rows[0].rel_diff);
}

TEST(Compare, EmptyList) {
  const auto rep = compare_wkb_oracle(Fractality::make(3, 2), 1.0, {});
  EXPECT_TRUE(rep.rows.empty());
  EXPECT_TRUE(rep.failures.empty());
}

TEST(Compare, DifferenceDecreasesWithN) {
  // Differences below the oracle's own resolution count as converged.
  constexpr double kNoiseFloor = 1e-8;
  for (auto [dv, ds] : {std::pair{3.0, 2.0}, {2.5, 1.0}, {2.1, 1.4}}) {
    const Fractality f = Fractality::make(dv, ds);
    std::vector<int> ns;
    for (int n = 5; n <= 30; ++n) ns.push_back(n);
    const auto rep = compare_wkb_oracle(f, f.radial_index(), ns, {}, {}, 8);
    ASSERT_TRUE(rep.failures.empty()) << rep.failures.front().message;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
      const double prev = rep.rows[i - 1].rel_diff;
      const double cur = rep.rows[i].rel_diff;
      EXPECT_TRUE(cur <= 1.1 * prev || cur <= kNoiseFloor) << dv << " " << ds << " n=" << rep.rows[i].n << " " << cur;
    }
  }
}
