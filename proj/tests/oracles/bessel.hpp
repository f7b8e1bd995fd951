#pragma once

// Closed-form radial heat mode for n = 3, l = 0 with equal constant
// coefficients in both phases: sinh(k r)/r inside, e^{+-k r}/r outside,
// k = sqrt(kappa lambda / d). The exponentials are normalised at the end
// of their own interval so large k stays well scaled.

#include <cmath>

#include <Eigen/Dense>

namespace oracle {

struct BesselMode0 {
  double A = 0.0, B = 0.0, C = 0.0, k = 0.0, R = 1.0, R_outer = 2.0;

  // sinh(k r) / sinh(k R), without overflow
  double shape(double r) const {
    return std::exp(k * (r - R)) * (-std::expm1(-2.0 * k * r)) / (-std::expm1(-2.0 * k * R));
  }
  double inner(double r) const {
    if (r == 0.0) return A * 2.0 * k / (std::exp(k * R) * (-std::expm1(-2.0 * k * R)));
    return A * shape(r) / r;
  }
  double outer(double r) const {
    return (B * std::exp(k * (r - R_outer)) + C * std::exp(-k * (r - R))) / r;
  }
  double operator()(double r) const { return r <= R ? inner(r) : outer(r); }
};

inline BesselMode0 bessel_mode0(double R, double R_outer, double kappa, double d, double lambda,
                                double g) {
  BesselMode0 m;
  m.k = std::sqrt(kappa * lambda / d);
  m.R = R;
  m.R_outer = R_outer;
  const double k = m.k;
  // d/dr of f(r)/r is (r f' - f)/r^2
  const double coth = 1.0 / std::tanh(k * R);
  const double din = (k * coth * R - 1.0) / (R * R);  // inner basis at R (value 1/R)
  const double ep = std::exp(k * (R - R_outer));
  auto dplus = [&](double r) { return std::exp(k * (r - R_outer)) * (k * r - 1.0) / (r * r); };
  auto dminus = [&](double r) { return std::exp(-k * (r - R)) * (-k * r - 1.0) / (r * r); };
  Eigen::Matrix3d M;
  Eigen::Vector3d rhs(0.0, g, 0.0);
  M << 1.0 / R, -ep / R, -1.0 / R,
      d * din, -d * dplus(R), -d * dminus(R),
      0.0, dplus(R_outer), dminus(R_outer);
  const Eigen::Vector3d x = M.fullPivLu().solve(rhs);
  m.A = x(0);
  m.B = x(1);
  m.C = x(2);
  return m;
}

}  // namespace oracle
