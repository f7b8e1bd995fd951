#pragma once

// Neumann-to-Dirichlet maps of the linearised problem at a concentric
// spherical equilibrium. Both maps are diagonal in spherical harmonics, so
// each is represented by its per-mode symbol:
//   N_l^H(lambda) = theta(R*)  for  kappa lambda theta - d Lap theta = 0,
//                                   -[[d d_nu theta]] = 1, d_nu theta = 0 on dOmega
//   N_l^S(lambda) = u_r(R*)    for  lambda u - mu Lap u + grad p = 0, div u = 0,
//                                   -[[T nu]] = nu, u = 0 on dOmega

#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "interphase/csv.hpp"
#include "interphase/equilibrium.hpp"
#include "interphase/log.hpp"
#include "interphase/parallel.hpp"
#include "interphase/radial_bvp.hpp"

namespace interphase {

struct NtDOptions {
  int order = kDefaultOrder;
  BvpOptions bvp;
};

struct NtDSample {
  int l = 0;
  double lambda = 0.0;
  double value_heat = 0.0;
  double value_stokes = 0.0;
  std::optional<RadialField> field_heat;
  std::optional<StokesModeSolution> field_stokes;
};

/// Quadratic-form identity N |Gamma| = form, with the relative mismatch.
struct FormIdentity {
  double boundary = 0.0;  // N * |Gamma*|
  double form = 0.0;      // energy integral of the retained field
  double rel_error = 0.0;
};

inline double form_rel_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

/// Per-mode operators bound to one equilibrium and one mesh.
class NtDOperator {
 public:
  explicit NtDOperator(const EquilibriumState& eq, const NtDOptions& opts = {})
      : eq_(eq), opts_(opts), mesh_(make_mesh(eq, opts.order)) {}

  const EquilibriumState& equilibrium() const { return eq_; }
  const RadialMesh& mesh() const { return mesh_; }
  int n() const { return eq_.geometry.n; }

  ScalarModeSolution heat_solution(int l, double lambda) const {
    check_lambda(lambda);
    const ScalarCoefficients c{eq_.d_star_1, eq_.d_star_2, eq_.kappa_star_1 * lambda,
                               eq_.kappa_star_2 * lambda};
    return solve_scalar_mode(mesh_, n(), c, l, 1.0, opts_.bvp);
  }

  /// Absent for l = 0, where the radial mode is forced to vanish by
  /// incompressibility and no slip.
  std::optional<StokesModeSolution> stokes_solution(int l, double lambda) const {
    check_lambda(lambda);
    if (l < 0) throw Error(ErrorKind::UnsupportedMode, "mode index must be >= 0");
    if (l == 0) return std::nullopt;
    return solve_stokes_mode(mesh_, n(), eq_.mu_star_1, eq_.mu_star_2, l, lambda, 1.0, opts_.bvp);
  }

  double heat(int l, double lambda) const { return heat_solution(l, lambda).field.interface_inner(); }

  double stokes(int l, double lambda) const {
    const auto s = stokes_solution(l, lambda);
    return s ? s->u_r.interface_inner() : 0.0;
  }

  /// Heat part is skipped (NaN) for lambda = 0, l = 0.
  NtDSample sample(int l, double lambda) const {
    NtDSample out;
    out.l = l;
    out.lambda = lambda;
    if (lambda > 0.0 || l > 0) {
      auto h = heat_solution(l, lambda);
      out.value_heat = h.field.interface_inner();
      out.field_heat = std::move(h.field);
    } else {
      out.value_heat = std::numeric_limits<double>::quiet_NaN();
    }
    auto s = stokes_solution(l, lambda);
    out.value_stokes = s ? s->u_r.interface_inner() : 0.0;
    out.field_stokes = std::move(s);
    return out;
  }

  double interface_area() const { return unit_sphere_area(n()) * std::pow(eq_.geometry.R_star, n() - 1); }

  FormIdentity heat_identity(const RadialField& f, double lambda) const {
    FormIdentity id;
    id.boundary = f.interface_inner() * interface_area();
    id.form = scalar_energy(f, n(), eq_.kappa_star_1, eq_.kappa_star_2, eq_.d_star_1,
                            eq_.d_star_2, lambda);
    id.rel_error = form_rel_error(id.boundary, id.form);
    return id;
  }

  FormIdentity stokes_identity(const StokesModeSolution& s, double lambda) const {
    FormIdentity id;
    id.boundary = s.u_r.interface_inner() * interface_area();
    id.form = stokes_energy(s, n(), lambda);
    id.rel_error = form_rel_error(id.boundary, id.form);
    return id;
  }

 private:
  static RadialMesh make_mesh(const EquilibriumState& eq, int order) {
    if (!eq.geometry.pde_ready()) {
      throw Error(ErrorKind::UnsupportedGeometry,
                  "Neumann-to-Dirichlet solves need a single concentric sphere (m = 1)");
    }
    return RadialMesh(order, eq.geometry.R_star, eq.geometry.R_outer);
  }
  static void check_lambda(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw Error(ErrorKind::OutOfRange, "lambda must be finite and >= 0");
    }
  }

  EquilibriumState eq_;
  NtDOptions opts_;
  RadialMesh mesh_;
};

inline double ntd_heat(const EquilibriumState& eq, int l, double lambda, const NtDOptions& opts = {}) {
  return NtDOperator(eq, opts).heat(l, lambda);
}

inline double ntd_stokes(const EquilibriumState& eq, int l, double lambda,
                         const NtDOptions& opts = {}) {
  if (l == 0) return 0.0;
  return NtDOperator(eq, opts).stokes(l, lambda);
}

struct HeatZeroLimit {
  double closed_form = 0.0;    // |Gamma*| / (kappa*|1)_Omega
  double extrapolated = 0.0;   // Richardson limit of lambda N_0^H(lambda)
  double rel_discrepancy = 0.0;
  std::vector<double> lambdas;  // 1e-2, 1e-3, 1e-4
  std::vector<double> samples;  // lambda N_0^H(lambda)
};

/// lambda N_0^H(lambda) = a0 + O(lambda); the three samples are combined by
/// polynomial (Neville) extrapolation to lambda = 0.
inline HeatZeroLimit heat_zero_limit(const EquilibriumState& eq, const NtDOptions& opts = {}) {
  const NtDOperator op(eq, opts);
  HeatZeroLimit out;
  out.closed_form = eq.a0();
  out.lambdas = {1e-2, 1e-3, 1e-4};
  for (double lam : out.lambdas) out.samples.push_back(lam * op.heat(0, lam));
  std::vector<double> p = out.samples;
  const auto& x = out.lambdas;
  for (std::size_t k = 1; k < p.size(); ++k) {
    for (std::size_t i = p.size() - 1; i >= k; --i) {
      p[i] = (x[i - k] * p[i] - x[i] * p[i - 1]) / (x[i - k] - x[i]);
    }
  }
  out.extrapolated = p.back();
  out.rel_discrepancy = std::abs(out.extrapolated - out.closed_form) / std::abs(out.closed_form);
  return out;
}

struct HeatInfinityTable {
  std::vector<double> lambdas;
  std::vector<double> values;  // lambda N_0^H(lambda)
  bool increasing_tail = true;  // strict increase from the grid midpoint on
  std::optional<double> tail_exponent;  // log-log slope over the last decade
};

/// lambda N_0^H(lambda) on an increasing grid; it diverges like lambda^(1/2)
/// as the thermal boundary layer at R* thins.
inline HeatInfinityTable heat_infinity_divergence(const EquilibriumState& eq,
                                                  std::vector<double> lambda_grid,
                                                  const NtDOptions& opts = {}) {
  for (std::size_t i = 1; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > lambda_grid[i - 1])) {
      throw Error(ErrorKind::OutOfRange, "lambda grid must be strictly increasing");
    }
  }
  const NtDOperator op(eq, opts);
  HeatInfinityTable out;
  out.lambdas = std::move(lambda_grid);
  for (double lam : out.lambdas) out.values.push_back(lam * op.heat(0, lam));
  const std::size_t mid = out.lambdas.size() / 2;
  for (std::size_t i = std::max<std::size_t>(mid, 1); i < out.values.size(); ++i) {
    if (!(out.values[i] > out.values[i - 1])) out.increasing_tail = false;
  }
  if (!out.increasing_tail) log::warn("lambda N_0^H(lambda) is not increasing on the grid tail");
  // Slope over the last decade, when the grid spans one.
  if (out.lambdas.size() >= 2) {
    const double top = out.lambdas.back();
    std::size_t j = out.lambdas.size() - 1;
    while (j > 0 && out.lambdas[j] > top / 10.0) --j;
    if (out.lambdas[j] <= top / 10.0 * (1.0 + 1e-12)) {
      out.tail_exponent = std::log(out.values.back() / out.values[j]) /
                          std::log(top / out.lambdas[j]);
    }
  }
  return out;
}

/// Samples over all (l, lambda) pairs. In debug builds every sample is
/// checked against its quadratic-form identity.
inline std::vector<NtDSample> ntd_sweep(const EquilibriumState& eq, const std::vector<int>& modes,
                                        const std::vector<double>& lambdas, unsigned threads = 1,
                                        const NtDOptions& opts = {}) {
  const NtDOperator op(eq, opts);
  std::vector<NtDSample> out(modes.size() * lambdas.size());
  parallel_for(out.size(), threads, [&](std::size_t k) {
    const int l = modes[k / lambdas.size()];
    const double lam = lambdas[k % lambdas.size()];
    NtDSample s = op.sample(l, lam);
#ifndef NDEBUG
    if (s.field_heat && op.heat_identity(*s.field_heat, lam).rel_error > 1e-7) {
      throw Error(ErrorKind::IllConditioned, "heat quadratic-form identity violated");
    }
    if (s.field_stokes && op.stokes_identity(*s.field_stokes, lam).rel_error > 1e-7) {
      throw Error(ErrorKind::IllConditioned, "Stokes quadratic-form identity violated");
    }
#endif
    s.field_heat.reset();
    s.field_stokes.reset();
    out[k] = std::move(s);
  });
  return out;
}

inline csv::Table ntd_table(const std::vector<NtDSample>& samples) {
  csv::Table t({"l", "lambda", "N_heat", "N_stokes"});
  for (const auto& s : samples) t.row().add(s.l).add(s.lambda).add(s.value_heat).add(s.value_stokes);
  return t;
}

}  // namespace interphase
