#pragma once

// Total energy and entropy of a radially symmetric state.

#include <optional>

#include "interphase/equilibrium.hpp"
#include "interphase/materials.hpp"
#include "interphase/radial_bvp.hpp"

namespace interphase {

/// Radial profiles: absolute temperature theta(r) (required) and radial
/// velocity u(r) (absent means u = 0). The interface radius is the mesh's R.
struct RadialState {
  RadialField theta;
  std::optional<RadialField> velocity;

  double R() const { return theta.mesh.R(); }
};

namespace detail {

inline void check_state(const RadialState& st, const Geometry& geom) {
  const auto& mesh = st.theta.mesh;
  if (st.velocity && !st.velocity->mesh.same_as(mesh)) {
    throw Error(ErrorKind::QuadratureGridMismatch, "velocity and temperature meshes differ");
  }
  if (mesh.R_outer() != geom.R_outer) {
    throw Error(ErrorKind::QuadratureGridMismatch, "mesh R_outer differs from geometry R_outer");
  }
  if (!geom.pde_ready()) {
    throw Error(ErrorKind::UnsupportedGeometry, "radial functionals need m = 1, concentric");
  }
}

}  // namespace detail

/// E = int (|u|^2/2 + epsilon_i(theta)) dx + sigma |Gamma|, Gamma the sphere of radius R.
inline double total_energy(const RadialState& st, const MaterialPair& pair, const Geometry& geom) {
  detail::check_state(st, geom);
  const int n = geom.n;
  const double bulk = st.theta.mesh.integrate(n, [&](double r, int phase) {
    const double th = st.theta.at(r, phase);
    const PhaseModel& model = phase == 1 ? pair.phase1() : pair.phase2();
    double e = model.epsilon(th);
    if (st.velocity) {
      const double u = st.velocity->at(r, phase);
      e += 0.5 * u * u;
    }
    return e;
  });
  return bulk + pair.sigma() * unit_sphere_area(n) * std::pow(st.R(), n - 1);
}

/// Phi = int eta_i(theta) dx.
inline double total_entropy(const RadialState& st, const MaterialPair& pair, const Geometry& geom) {
  detail::check_state(st, geom);
  return st.theta.mesh.integrate(geom.n, [&](double r, int phase) {
    const double th = st.theta.at(r, phase);
    return (phase == 1 ? pair.phase1() : pair.phase2()).eta(th);
  });
}

}  // namespace interphase
