#pragma once

#include "interphase/equilibrium.hpp"
#include "interphase/materials.hpp"

namespace fixtures {

using namespace interphase;

inline const ThetaRange kRange{0.2, 3.0};

/// psi_1 = -theta log theta, psi_2 = 1 - 2 theta log theta.
inline MaterialPair reference_pair(double sigma) {
  return MaterialPair(PhaseModel::simple(0.0, 0.0, 1.0, kRange),
                      PhaseModel::simple(1.0, 0.0, 2.0, kRange), sigma);
}

inline Geometry ball(int n, double R_outer, double R_star = 0.5, int m = 1) {
  Geometry g;
  g.n = n;
  g.R_outer = R_outer;
  g.R_star = R_star;
  g.m = m;
  g.concentric = (m == 1);
  return g;
}

/// Equal unit heat capacities; [[psi]] = 1 + 2 sigma - theta, so theta* = 1,
/// R* = 1, l* = -1 and, with R_outer = 2 in 3D, s = 2 sigma - 3/8.
inline MaterialPair unit_pair(double sigma, double mu1 = 1.0, double mu2 = 1.0, double d1 = 1.0,
                              double d2 = 1.0) {
  return MaterialPair(PhaseModel::simple(0.0, 0.0, 1.0, kRange, mu1, d1),
                      PhaseModel::simple(1.0 + 2.0 * sigma, -1.0, 1.0, kRange, mu2, d2), sigma);
}

inline EquilibriumState unit_equilibrium(double sigma, int n = 3, double R_outer = 2.0) {
  return solve_equilibrium_radius(unit_pair(sigma), ball(n, R_outer), 1.0);
}

inline EquilibriumState reference_equilibrium(double sigma = 0.5, double theta = 1.0,
                                              double R_outer = 2.0, int n = 3) {
  return solve_equilibrium_radius(reference_pair(sigma), ball(n, R_outer), theta);
}

}  // namespace fixtures
