#pragma once

// Spherical equilibria of the two-phase problem: the Gibbs-Thomson relation
// [[psi(theta*)]] = sigma (n-1) / R*, the stability number s, and the energy
// at equilibrium phi(theta*) together with its derivative along the branch of
// equilibria.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "interphase/error.hpp"
#include "interphase/log.hpp"
#include "interphase/materials.hpp"

namespace interphase {

/// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Area of the unit sphere S^{n-1}.
inline double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

struct Geometry {
  int n = 3;
  double R_outer = 1.0;
  double R_star = 0.5;
  int m = 1;
  bool concentric = true;

  double omega_volume() const { return unit_ball_volume(n) * std::pow(R_outer, n); }
  double disperse_volume() const { return m * unit_ball_volume(n) * std::pow(R_star, n); }
  double continuous_volume() const { return omega_volume() - disperse_volume(); }
  double interface_area() const { return m * unit_sphere_area(n) * std::pow(R_star, n - 1); }
  double mean_curvature() const { return -(n - 1) / R_star; }

  bool pde_ready() const { return m == 1 && concentric; }

  /// Throws GeometryViolation when the invariants do not hold.
  void check() const {
    if (n != 2 && n != 3) throw Error(ErrorKind::GeometryViolation, "n must be 2 or 3");
    if (m < 1) throw Error(ErrorKind::GeometryViolation, "m must be >= 1");
    if (!(R_star > 0.0)) throw Error(ErrorKind::GeometryViolation, "R_star must be > 0");
    if (!(R_star < R_outer)) {
      std::ostringstream os;
      os << "R_star = " << R_star << " must be < R_outer = " << R_outer;
      throw Error(ErrorKind::GeometryViolation, os.str());
    }
    if (m > 1 && !(disperse_volume() < omega_volume())) {
      throw Error(ErrorKind::GeometryViolation, "m balls of radius R_star do not fit in Omega");
    }
  }
};

/// Frozen data of a (possibly multi-ball) spherical equilibrium. The
/// velocity vanishes and density is fixed to one.
struct EquilibriumState {
  double theta_star = 0.0;
  double sigma = 0.0;
  Geometry geometry;
  double pressure_jump = 0.0;
  double kappa_star_1 = 0.0, kappa_star_2 = 0.0;
  double d_star_1 = 0.0, d_star_2 = 0.0;
  double mu_star_1 = 0.0, mu_star_2 = 0.0;
  double l_star = 0.0;
  double c_star = 0.0;      // l*^2 / theta*
  double kappa_mass = 0.0;  // (kappa*|1)_Omega
  std::vector<std::string> warnings;

  double interface_area() const { return geometry.interface_area(); }
  double curvature_term() const { return sigma * (geometry.n - 1) / (geometry.R_star * geometry.R_star); }
  /// |Gamma*| / (kappa*|1)_Omega, the small-lambda limit of lambda N_0^H.
  double a0() const { return interface_area() / kappa_mass; }
};

struct FrozenCoefficients {
  double kappa1, kappa2, d1, d2, mu1, mu2;
};

/// Build a state directly from frozen coefficients; used for constructed
/// test configurations and by the solvers below. Only the geometry
/// invariants are checked.
inline EquilibriumState make_equilibrium_state(double theta_star, double sigma,
                                               const Geometry& geom, double psi_jump,
                                               double l_star, const FrozenCoefficients& c) {
  geom.check();
  EquilibriumState eq;
  eq.theta_star = theta_star;
  eq.sigma = sigma;
  eq.geometry = geom;
  eq.pressure_jump = -psi_jump;
  eq.kappa_star_1 = c.kappa1;
  eq.kappa_star_2 = c.kappa2;
  eq.d_star_1 = c.d1;
  eq.d_star_2 = c.d2;
  eq.mu_star_1 = c.mu1;
  eq.mu_star_2 = c.mu2;
  eq.l_star = l_star;
  eq.c_star = l_star * l_star / theta_star;
  eq.kappa_mass = c.kappa1 * geom.disperse_volume() + c.kappa2 * geom.continuous_volume();
  return eq;
}

namespace detail {

inline double latent_scale(const MaterialPair& pair, double theta) {
  return theta * (std::abs(pair.phase1().dpsi(theta)) + std::abs(pair.phase2().dpsi(theta))) +
         std::numeric_limits<double>::min();
}

inline bool latent_heat_vanishes(const MaterialPair& pair, double theta) {
  return std::abs(pair.latent_heat(theta)) <= 1e-12 * latent_scale(pair, theta);
}

inline FrozenCoefficients freeze(const MaterialPair& pair, double theta) {
  const auto s1 = eval_phase(pair.phase1(), theta);
  const auto s2 = eval_phase(pair.phase2(), theta);
  return {s1.kappa, s2.kappa, s1.d, s2.d, s1.mu, s2.mu};
}

}  // namespace detail

/// R* = sigma (n-1) / [[psi(theta*)]] for a given temperature. The template
/// supplies n, R_outer, m and the concentric flag; its R_star is ignored.
inline EquilibriumState solve_equilibrium_radius(const MaterialPair& pair,
                                                 const Geometry& geom_template,
                                                 double theta_star) {
  const auto j = jumps(pair, theta_star);
  if (!(j.psi_jump > 0.0)) {
    std::ostringstream os;
    os << "[[psi(theta*)]] = " << j.psi_jump << " <= 0 admits no spherical equilibrium";
    throw Error(ErrorKind::NoEquilibrium, os.str());
  }
  Geometry geom = geom_template;
  geom.R_star = pair.sigma() * (geom.n - 1) / j.psi_jump;
  geom.check();
  if (detail::latent_heat_vanishes(pair, theta_star)) {
    throw Error(ErrorKind::Degenerate, "latent heat l(theta*) = 0");
  }
  return make_equilibrium_state(theta_star, pair.sigma(), geom, j.psi_jump, j.latent_heat,
                                detail::freeze(pair, theta_star));
}

/// Finds theta* with [[psi(theta*)]] = sigma (n-1) / R* for the fixed radius in
/// `geom`: sign changes are bracketed on 256 subintervals of the common theta
/// range, bisected, then polished by Newton. With several roots the one
/// nearest `guess` (default: midpoint of the range) is returned and a
/// MultiRoot warning lists all of them.
inline EquilibriumState solve_equilibrium_temperature(const MaterialPair& pair,
                                                      const Geometry& geom,
                                                      std::optional<double> guess = std::nullopt) {
  geom.check();
  const double target = pair.sigma() * (geom.n - 1) / geom.R_star;
  auto F = [&](double th) { return pair.psi_jump(th) - target; };
  const auto range = pair.common_range();
  constexpr int kBrackets = 256;

  std::vector<double> roots;
  double a = range.min, fa = F(a);
  for (int i = 1; i <= kBrackets; ++i) {
    const double b = range.min + (range.max - range.min) * i / kBrackets;
    const double fb = F(b);
    if (fa == 0.0) {
      roots.push_back(a);
    } else if (fa * fb < 0.0) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && (hi - lo) > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = F(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      double x = 0.5 * (lo + hi);
      for (int it = 0; it < 4; ++it) {
        const double d = pair.dpsi_jump(x);
        if (d == 0.0) break;
        const double nx = x - F(x) / d;
        if (!(nx >= a && nx <= b)) break;
        x = nx;
      }
      roots.push_back(x);
    }
    if (i == kBrackets && fb == 0.0) roots.push_back(b);
    a = b;
    fa = fb;
  }
  if (roots.empty()) {
    std::ostringstream os;
    os << "[[psi(theta)]] - sigma(n-1)/R* has no sign change on [" << range.min << ", "
       << range.max << "]";
    throw Error(ErrorKind::NoRoot, os.str());
  }
  const double g = guess.value_or(0.5 * (range.min + range.max));
  const double theta = *std::min_element(roots.begin(), roots.end(), [g](double x, double y) {
    return std::abs(x - g) < std::abs(y - g);
  });
  if (detail::latent_heat_vanishes(pair, theta)) {
    throw Error(ErrorKind::Degenerate, "latent heat l(theta*) = 0 at the root");
  }
  auto eq = make_equilibrium_state(theta, pair.sigma(), geom, pair.psi_jump(theta),
                                   pair.latent_heat(theta), detail::freeze(pair, theta));
  if (roots.size() > 1) {
    std::ostringstream os;
    os << "MultiRoot: " << roots.size() << " equilibrium temperatures in range {";
    for (std::size_t i = 0; i < roots.size(); ++i) os << (i ? ", " : "") << roots[i];
    os << "}; returned " << theta;
    eq.warnings.push_back(os.str());
    log::warn(os.str());
  }
  return eq;
}

namespace detail {

/// l* = 0 relative to the latent heat at which the two terms of s balance.
inline bool latent_heat_vanishes_value(const EquilibriumState& eq) {
  const double l_ref = std::sqrt(eq.theta_star * eq.curvature_term() * eq.kappa_mass /
                                 eq.interface_area());
  return std::abs(eq.l_star) <= 1e-12 * l_ref;
}

}  // namespace detail

struct StabilityNumber {
  double s = 0.0;
  double curvature_term = 0.0;  // sigma (n-1) / R*^2
  double latent_term = 0.0;     // l*^2 |Gamma*| / (theta* (kappa*|1)_Omega)
};

inline StabilityNumber stability_number(const EquilibriumState& eq) {
  StabilityNumber out;
  out.curvature_term = eq.curvature_term();
  out.latent_term = eq.l_star * eq.l_star * eq.interface_area() / (eq.theta_star * eq.kappa_mass);
  out.s = out.curvature_term - out.latent_term;
  return out;
}

/// phi = eps_1(theta) |Omega_1| + eps_2(theta) |Omega_2| + sigma |Gamma|.
inline double equilibrium_energy(const MaterialPair& pair, const Geometry& geom, double theta) {
  return pair.phase1().epsilon(theta) * geom.disperse_volume() +
         pair.phase2().epsilon(theta) * geom.continuous_volume() +
         pair.sigma() * geom.interface_area();
}

inline double equilibrium_energy(const EquilibriumState& eq, const MaterialPair& pair) {
  return equilibrium_energy(pair, eq.geometry, eq.theta_star);
}

struct EnergyDerivative {
  double value = 0.0;
  double error_estimate = 0.0;
  double step = 0.0;
};

/// phi'(theta*) along the equilibrium branch theta -> R*(theta): central
/// differences with Richardson extrapolation over a halving sequence of steps.
inline EnergyDerivative equilibrium_energy_derivative(const EquilibriumState& eq,
                                                      const MaterialPair& pair) {
  const double theta = eq.theta_star;
  if (pair.dpsi_jump(theta) == 0.0 || detail::latent_heat_vanishes(pair, theta)) {
    throw Error(ErrorKind::Degenerate, "[[psi'(theta*)]] = 0: the equilibrium branch is singular");
  }
  auto phi = [&](double th) {
    Geometry g = eq.geometry;
    g.R_star = pair.sigma() * (g.n - 1) / pair.psi_jump(th);
    return equilibrium_energy(pair, g, th);
  };
  auto central = [&](double h) { return (phi(theta + h) - phi(theta - h)) / (2.0 * h); };

  const auto range = pair.common_range();
  double h = 1e-2 * theta;
  h = std::min({h, 0.5 * (theta - range.min), 0.5 * (range.max - theta)});
  // The branch also needs [[psi]] > 0 on the stencil.
  while (h > 1e-12 * theta && !(pair.psi_jump(theta - h) > 0.0 && pair.psi_jump(theta + h) > 0.0))
    h *= 0.5;
  if (!(h > 1e-12 * theta)) {
    throw Error(ErrorKind::Degenerate, "no admissible finite-difference stencil around theta*");
  }

  EnergyDerivative best;
  best.error_estimate = std::numeric_limits<double>::infinity();
  double d_prev = central(h);
  for (int k = 0; k < 8; ++k) {
    const double d_half = central(0.5 * h);
    const double extrap = (4.0 * d_half - d_prev) / 3.0;
    const double err = std::abs(d_half - d_prev) / 3.0;
    if (err < best.error_estimate) {
      best.value = extrap;
      best.error_estimate = err;
      best.step = 0.5 * h;
    }
    d_prev = d_half;
    h *= 0.5;
  }
  return best;
}

}  // namespace interphase
