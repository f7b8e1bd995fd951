#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "interphase/ntd.hpp"
#include "oracles/bessel.hpp"

using namespace interphase;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

const std::vector<double> kLambdas{0.0, 1e-3, 0.1, 1.0, 10.0, 1e3, 1e4};

}  // namespace

TEST(NtD, FormIdentitiesAllModes) {
  for (const auto& eq : {fixtures::unit_equilibrium(0.5), fixtures::reference_equilibrium()}) {
    const NtDOperator op(eq);
    for (int l = 0; l <= 8; ++l) {
      for (double lam : kLambdas) {
        const auto s = op.sample(l, lam);
        if (s.field_heat) {
          EXPECT_LT(op.heat_identity(*s.field_heat, lam).rel_error, 1e-8) << l << " " << lam;
        }
        if (s.field_stokes) {
          EXPECT_LT(op.stokes_identity(*s.field_stokes, lam).rel_error, 1e-7) << l << " " << lam;
        }
      }
    }
  }
}

TEST(NtD, BesselOracle) {
  const auto eq = fixtures::unit_equilibrium(0.5);
  for (double lam : {1.0, 0.05, 200.0}) {
    const auto ex = oracle::bessel_mode0(1.0, 2.0, 1.0, 1.0, lam, 1.0);
    EXPECT_LT(rel(ntd_heat(eq, 0, lam), ex(1.0)), 1e-8) << lam;
  }
}

TEST(NtD, NonnegativeAndInjective) {
  const auto eq = fixtures::reference_equilibrium();
  const NtDOperator op(eq);
  for (int l = 0; l <= 8; ++l) {
    for (double lam : kLambdas) {
      const auto s = op.sample(l, lam);
      if (!std::isnan(s.value_heat)) {
        EXPECT_GE(s.value_heat, -1e-12);
      }
      EXPECT_GE(s.value_stokes, -1e-12);
      if (lam >= 1e-3) {
        EXPECT_GT(s.value_heat, 0.0) << l << " " << lam;
      }
    }
  }
}

TEST(NtD, StokesModeZeroVanishes) {
  const auto eq = fixtures::unit_equilibrium(0.5);
  for (double lam : {0.0, 1.0, 100.0}) {
    EXPECT_EQ(ntd_stokes(eq, 0, lam), 0.0);
    EXPECT_EQ(NtDOperator(eq).sample(0, lam).value_stokes, 0.0);
  }
}

TEST(NtD, Errors) {
  const auto eq = fixtures::unit_equilibrium(0.5);
  try {
    ntd_heat(eq, 0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularProblem);
  }
  EXPECT_THROW(ntd_heat(eq, 1, -1.0), Error);
  auto multi = eq;
  multi.geometry.m = 2;
  multi.geometry.concentric = false;
  EXPECT_THROW(NtDOperator{multi}, Error);
}

TEST(NtD, HeatDecayBounded) {
  const auto eq = fixtures::reference_equilibrium();
  const NtDOperator op(eq);
  double first = 0.0, peak = 0.0, last = 0.0;
  for (int k = 0; k <= 16; ++k) {
    const double lam = std::pow(10.0, k / 4.0);
    const double v = op.heat(0, lam) * std::pow(lam, 0.4);
    if (k == 0) first = v;
    peak = std::max(peak, v);
    last = v;
  }
  EXPECT_LE(peak, 1.01 * first);
  EXPECT_LT(last, first);
}

TEST(NtD, StokesDecayBounded) {
  const auto eq = fixtures::reference_equilibrium();
  const NtDOperator op(eq);
  const double first = op.stokes(2, 0.0);
  double peak = 0.0, last = 0.0;
  for (int k = -8; k <= 16; ++k) {
    const double lam = std::pow(10.0, k / 4.0);
    const double v = op.stokes(2, lam) * std::pow(1.0 + lam, 0.4);
    if (k > 12) {
      EXPECT_LT(v, last);
    }
    last = v;
    peak = std::max(peak, v);
  }
  EXPECT_LE(peak, 2.0 * first);
  EXPECT_LT(last, first);
}

TEST(NtD, LipschitzInLambda) {
  const auto eq = fixtures::unit_equilibrium(0.5);
  const NtDOperator op(eq);
  auto max_jump = [&](double step) {
    double heat = 0.0, stokes = 0.0;
    for (double lam = 0.5; lam < 2.0 - 1e-12; lam += step) {
      heat = std::max(heat, std::abs(op.heat(1, lam + step) - op.heat(1, lam)));
      stokes = std::max(stokes, std::abs(op.stokes(1, lam + step) - op.stokes(1, lam)));
    }
    return std::pair{heat, stokes};
  };
  const auto [h1, s1] = max_jump(0.1);
  const auto [h2, s2] = max_jump(0.05);
  EXPECT_NEAR(h2 / h1, 0.5, 0.05);
  EXPECT_NEAR(s2 / s1, 0.5, 0.05);
}

TEST(HeatZeroLimit, ClosedFormAndExtrapolation) {
  const auto eq = fixtures::unit_equilibrium(0.5);
  const auto z = heat_zero_limit(eq);
  EXPECT_NEAR(z.closed_form, 4.0 * std::numbers::pi / (4.0 / 3.0 * std::numbers::pi * 8.0), 1e-15);
  EXPECT_NEAR(z.closed_form, 0.375, 1e-15);
  EXPECT_LT(z.rel_discrepancy, 1e-4);
  EXPECT_EQ(z.samples.size(), 3u);

  const auto ref = heat_zero_limit(fixtures::reference_equilibrium());
  EXPECT_LT(ref.rel_discrepancy, 1e-4);
}

TEST(HeatZeroLimit, KappaHomogeneity) {
  const auto eq = fixtures::unit_equilibrium(0.5);
  const auto big = make_equilibrium_state(eq.theta_star, eq.sigma, eq.geometry, -eq.pressure_jump,
                                          eq.l_star, {10.0, 10.0, 1.0, 1.0, 1.0, 1.0});
  const auto z1 = heat_zero_limit(eq);
  const auto z10 = heat_zero_limit(big);
  EXPECT_NEAR(z10.closed_form, z1.closed_form / 10.0, 1e-15);
  EXPECT_LT(rel(z10.extrapolated, z1.extrapolated / 10.0), 1e-6);
}

TEST(HeatInfinity, IncreasingWithHalfPowerTail) {
  const auto eq = fixtures::reference_equilibrium();
  const auto t = heat_infinity_divergence(eq, {1e2, 1e3, 1e4});
  ASSERT_EQ(t.values.size(), 3u);
  EXPECT_LT(t.values[0], t.values[1]);
  EXPECT_LT(t.values[1], t.values[2]);
  EXPECT_TRUE(t.increasing_tail);
  ASSERT_TRUE(t.tail_exponent.has_value());
  EXPECT_GT(*t.tail_exponent, 0.25);
  EXPECT_LT(*t.tail_exponent, 1.0);
}

TEST(HeatInfinity, SinglePointGrid) {
  const auto t = heat_infinity_divergence(fixtures::unit_equilibrium(0.5), {5.0});
  EXPECT_EQ(t.values.size(), 1u);
  EXPECT_TRUE(t.increasing_tail);
  EXPECT_FALSE(t.tail_exponent.has_value());
  EXPECT_THROW(heat_infinity_divergence(fixtures::unit_equilibrium(0.5), {2.0, 1.0}), Error);
}

TEST(NtDSweep, TableLayout) {
  const auto eq = fixtures::unit_equilibrium(0.5);
  const auto rows = ntd_sweep(eq, {0, 1, 2}, {0.0, 1.0}, 2);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_TRUE(std::isnan(rows[0].value_heat));
  EXPECT_EQ(rows[3].l, 1);
  EXPECT_EQ(rows[3].lambda, 1.0);
  EXPECT_FALSE(rows[3].field_heat.has_value());
  const std::string csv = ntd_table(rows).str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "l,lambda,N_heat,N_stokes");
  EXPECT_NE(csv.find("0,0,nan,0"), std::string::npos);
}
