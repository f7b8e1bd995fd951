#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "interphase/radial_bvp.hpp"
#include "oracles/bessel.hpp"
#include "oracles/shooting.hpp"
#include "oracles/stokes_monomial.hpp"

using namespace interphase;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ConfigError;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(RadialMesh, Layout) {
  const RadialMesh m(16, 1.0, 2.0);
  EXPECT_EQ(m.inner_size(), 17);
  EXPECT_EQ(m.outer_size(), 17);
  EXPECT_EQ(m.nodes_inner().back(), 1.0);
  EXPECT_EQ(m.nodes_outer().front(), 1.0);
  EXPECT_EQ(m.nodes_outer().back(), 2.0);
  EXPECT_NEAR(m.integrate(3, [](double, int) { return 1.0; }), 4.0 / 3.0 * std::numbers::pi * 8.0,
              1e-13);
  EXPECT_NEAR(m.integrate(2, [](double, int p) { return p == 1 ? 1.0 : 0.0; }), std::numbers::pi,
              1e-14);
  EXPECT_THROW(RadialMesh(16, 2.0, 2.0), Error);
}

TEST(ScalarMode, ZeroDataGivesZero) {
  const RadialMesh m(24, 1.0, 2.0);
  for (int l : {0, 1, 3}) {
    const auto sol = solve_scalar_mode(m, 3, {1.0, 2.0, 1.0, 1.0}, l, 0.0);
    EXPECT_EQ(sol.field.max_abs(), 0.0);
  }
}

TEST(ScalarMode, BesselOracle) {
  const RadialMesh m(48, 1.0, 2.0);
  for (double lambda : {1.0, 0.01, 30.0}) {
    const auto ex = oracle::bessel_mode0(1.0, 2.0, 1.0, 1.0, lambda, 1.0);
    const auto sol = solve_scalar_mode(m, 3, {1.0, 1.0, lambda, lambda}, 0, 1.0);
    EXPECT_LT(rel(sol.field.interface_inner(), ex.inner(1.0)), 1e-8) << lambda;
    for (double r : {0.0, 0.3, 0.9, 1.2, 1.7, 2.0}) {
      const double e = ex(r);
      EXPECT_LT(std::abs(sol.field(r) - e), 1e-8 * std::abs(ex.inner(1.0))) << r;
    }
    EXPECT_LT(sol.diagnostics.residual, 1e-10);
  }
}

TEST(ScalarMode, ShootingOracleTwoDimensions) {
  const RadialMesh m(48, 1.0, 2.0);
  const double d1 = 0.7, d2 = 2.5, lambda = 2.0;
  const auto sol = solve_scalar_mode(m, 2, {d1, d2, lambda, lambda}, 1, 1.0);
  const auto sh = oracle::shoot_scalar_mode(2, 1, 1.0, 2.0, d1, d2, lambda, lambda, 1.0);
  EXPECT_LT(rel(sol.field.interface_inner(), sh.interface_value), 1e-8);
  // Bessel cross-check: the inner solution is proportional to I_1.
  const double k = std::sqrt(lambda / d1);
  const double ratio = sol.field(0.5) / sol.field(1.0);
  EXPECT_NEAR(ratio, std::cyl_bessel_i(1.0, 0.5 * k) / std::cyl_bessel_i(1.0, k), 1e-10);
}

TEST(ScalarMode, EnergyIdentityAndLinearity) {
  const RadialMesh m(48, 0.8, 2.0);
  for (int n : {2, 3}) {
    for (int l : {0, 1, 2, 5}) {
      for (double lambda : {0.0, 0.1, 10.0}) {
        if (l == 0 && lambda == 0.0) continue;
        const ScalarCoefficients c{0.5, 1.5, 2.0 * lambda, 0.7 * lambda};
        const auto a = solve_scalar_mode(m, n, c, l, 1.0).field;
        const auto b = solve_scalar_mode(m, n, c, l, -3.5).field;
        for (int i = 0; i < m.inner_size(); ++i)
          EXPECT_NEAR(b.inner[i], -3.5 * a.inner[i], 1e-12 * a.max_abs() * 3.5);
        const double area = unit_sphere_area(n) * std::pow(0.8, n - 1);
        const double lhs = scalar_energy(a, n, 2.0, 0.7, 0.5, 1.5, lambda);
        EXPECT_LT(rel(lhs, a.interface_inner() * area), 1e-8) << n << " " << l << " " << lambda;
      }
    }
  }
}

TEST(ScalarMode, SpectralConvergence) {
  for (int l : {0, 2}) {
    const auto a = solve_scalar_mode(RadialMesh(24, 1.0, 2.0), 3, {1.0, 2.0, 1.0, 2.0}, l, 1.0);
    const auto b = solve_scalar_mode(RadialMesh(48, 1.0, 2.0), 3, {1.0, 2.0, 1.0, 2.0}, l, 1.0);
    EXPECT_LT(std::abs(a.field.interface_inner() - b.field.interface_inner()), 1e-9);
  }
}

TEST(ScalarMode, Errors) {
  const RadialMesh m(16, 1.0, 2.0);
  EXPECT_EQ(kind_of([&] { solve_scalar_mode(m, 3, {1, 1, 0, 0}, 0, 1.0); }),
            ErrorKind::SingularProblem);
  EXPECT_EQ(kind_of([&] { solve_scalar_mode(m, 3, {1, 1, 1, 1}, 0, 1.0, {.max_condition = 1.0}); }),
            ErrorKind::IllConditioned);
}

TEST(NeumannCompatible, ZeroLimitProblem) {
  const RadialMesh m(48, 1.0, 2.0);
  const double k1 = 1.0, k2 = 2.0, d1 = 1.0, d2 = 3.0;
  const double area = 4.0 * std::numbers::pi;
  const double mass = m.integrate(3, [&](double, int p) { return p == 1 ? k1 : k2; });
  const double a0 = area / mass;
  const auto res = solve_neumann_compatible(
      m, 3, d1, d2, k1, k2, [&](double) { return -k1 * a0; }, [&](double) { return -k2 * a0; }, 1.0);
  const auto df = res.field.derivative();
  EXPECT_NEAR((d2 * df.outer.front() - d1 * df.inner.back()) * area, -area, 1e-10 * area);
  const double mean = m.integrate(3, [&](double r, int p) { return (p == 1 ? k1 : k2) * res.field.at(r, p); });
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(res.multiplier, 0.0, 1e-10);
  // Re-normalising a shifted copy gives the same field.
  auto shifted = res.field;
  for (auto& v : shifted.inner) v += 4.2;
  for (auto& v : shifted.outer) v += 4.2;
  const auto back = normalize_kappa_mean(shifted, 3, k1, k2);
  for (int i = 0; i < m.inner_size(); ++i) EXPECT_NEAR(back.inner[i], res.field.inner[i], 1e-12);
}

TEST(NeumannCompatible, IncompatibleData) {
  const RadialMesh m(16, 1.0, 2.0);
  EXPECT_EQ(kind_of([&] {
              solve_neumann_compatible(m, 3, 1, 1, 1, 1, [](double) { return 1.0; },
                                       [](double) { return 1.0; }, 1.0);
            }),
            ErrorKind::IncompatibleData);
}

TEST(StokesMode, ZeroData) {
  const RadialMesh m(24, 1.0, 2.0);
  const auto s = solve_stokes_mode(m, 3, 1.0, 2.0, 2, 1.0, 0.0);
  EXPECT_EQ(s.u_r.max_abs() + s.u_t.max_abs() + s.p.max_abs(), 0.0);
}

TEST(StokesMode, MonomialOracle) {
  const double mu = 1.3;
  const auto ex = oracle::stokes_monomial(2, 1.0, 2.0, mu, 1.0);
  // Self-check of the oracle: each term satisfies the radial balance.
  for (const auto& t : ex.outer_terms) EXPECT_NEAR(t.radial_residual(1.37, 3, 6.0, mu), 0.0, 1e-12);
  const RadialMesh m(48, 1.0, 2.0);
  const auto s = solve_stokes_mode(m, 3, mu, mu, 2, 0.0, 1.0);
  const double scale = std::abs(ex.U(1.0, 1.0));
  EXPECT_LT(rel(s.u_r.interface_inner(), ex.U(1.0, 1.0)), 1e-8);
  for (double r : {0.2, 0.6, 1.0, 1.4, 1.9}) {
    EXPECT_LT(std::abs(s.u_r(r) - ex.U(r, 1.0)), 1e-8 * scale) << r;
    EXPECT_LT(std::abs(s.u_t(r) - ex.V(r, 1.0)), 1e-8 * scale) << r;
    EXPECT_LT(std::abs(s.p(r) - ex.P(r, 1.0)), 1e-7 * scale) << r;
  }
}

TEST(StokesMode, DivergenceAndEnergy) {
  const RadialMesh m(48, 0.9, 2.0);
  for (int n : {2, 3}) {
    for (int l : {1, 2, 4}) {
      for (double lambda : {0.0, 1.0, 100.0}) {
        const auto s = solve_stokes_mode(m, n, 0.6, 1.8, l, lambda, 1.0);
        EXPECT_LT(s.divergence_residual, 1e-9 * std::max(1.0, s.u_r.max_abs()));
        const double area = unit_sphere_area(n) * std::pow(0.9, n - 1);
        EXPECT_LT(rel(stokes_energy(s, n, lambda), s.u_r.interface_inner() * area), 1e-8)
            << n << " " << l << " " << lambda;
        EXPECT_GT(s.u_r.interface_inner(), 0.0);
      }
    }
  }
}

TEST(StokesMode, Errors) {
  const RadialMesh m(16, 1.0, 2.0);
  EXPECT_EQ(kind_of([&] { solve_stokes_mode(m, 3, 1, 1, 0, 1.0, 1.0); }), ErrorKind::UnsupportedMode);
}
