#include <cmath>

#include <gtest/gtest.h>

#include "interphase/chebyshev.hpp"

using namespace interphase::cheb;

TEST(Chebyshev, GaussLegendreIntegratesPolynomials) {
  const auto g = gauss_legendre(12);
  for (int k = 0; k <= 23; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
    const double exact = (k % 2) ? 0.0 : 2.0 / (k + 1);
    EXPECT_NEAR(s, exact, 1e-14) << "k=" << k;
  }
}

TEST(Chebyshev, IntervalGridDifferentiates) {
  const IntervalGrid g(1.0, 3.0, 24);
  const auto r = g.nodes();
  EXPECT_EQ(r.front(), 1.0);
  EXPECT_EQ(r.back(), 3.0);
  for (int i = 1; i < g.size(); ++i) EXPECT_GT(r[i], r[i - 1]);
  Eigen::VectorXd f(g.size());
  for (int i = 0; i < g.size(); ++i) f(i) = std::sin(r[i]);
  const Eigen::VectorXd df = g.D1() * f, d2f = g.D2() * f;
  for (int i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(df(i), std::cos(r[i]), 1e-12);
    EXPECT_NEAR(d2f(i), -std::sin(r[i]), 1e-10);
  }
  std::vector<double> v(f.data(), f.data() + f.size());
  EXPECT_NEAR(g.interpolate(v, 2.345), std::sin(2.345), 1e-14);
}

TEST(Chebyshev, ParityGridEvenAndOdd) {
  const ParityGrid g(1.5, 20);
  const auto r = g.nodes();
  EXPECT_GT(r.front(), 0.0);
  EXPECT_EQ(r.back(), 1.5);
  for (int p : {1, -1}) {
    auto f = [p](double x) { return p == 1 ? std::cosh(x) : std::sinh(x); };
    auto df = [p](double x) { return p == 1 ? std::sinh(x) : std::cosh(x); };
    Eigen::VectorXd v(g.size());
    for (int i = 0; i < g.size(); ++i) v(i) = f(r[i]);
    const Eigen::VectorXd d1 = g.D1(p) * v, d2 = g.D2(p) * v;
    for (int i = 0; i < g.size(); ++i) {
      EXPECT_NEAR(d1(i), df(r[i]), 1e-12);
      EXPECT_NEAR(d2(i), f(r[i]), 1e-9);
    }
    std::vector<double> vals(v.data(), v.data() + v.size());
    EXPECT_NEAR(g.interpolate(vals, p, 0.0), f(0.0), 1e-14);
    EXPECT_NEAR(g.interpolate(vals, p, 0.77), f(0.77), 1e-14);
  }
}
