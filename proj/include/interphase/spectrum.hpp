#pragma once

// Dispersion function, unstable eigenvalue, eigenvalue counting and
// classification of spherical equilibria.
//
// Sign convention (the one place it is fixed): with a_l the eigenvalue of
// A* = -(n-1)/R*^2 - Laplace-Beltrami on degree-l harmonics and
// t_l = c* N^H / (1 + c* N^H N^S), c* = l*^2/theta*,
//   b_l(lambda) = lambda t_l(lambda) + sigma a_l.
// Since lambda N_0^H -> a0 = |Gamma*|/(kappa*|1)_Omega as lambda -> 0+,
//   b_0(0+) = c* a0 - sigma (n-1)/R*^2 = -s,
// so s > 0 makes b_0 negative near zero; b_0 -> +inf for large lambda and a
// root lambda0 > 0 (a positive eigenvalue of -L) exists.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "interphase/csv.hpp"
#include "interphase/equilibrium.hpp"
#include "interphase/log.hpp"
#include "interphase/ntd.hpp"
#include "interphase/parallel.hpp"

namespace interphase {

inline constexpr int kMaxScanMode = 8;

/// Eigenvalue of A* on degree-l harmonics of the sphere of radius R*.
inline double a_eigenvalue(const EquilibriumState& eq, int l) {
  const int n = eq.geometry.n;
  const double R = eq.geometry.R_star;
  if (l == 1) return 0.0;
  return (angular_eigenvalue(n, l) - (n - 1)) / (R * R);
}

/// |s| at or below this is treated as s = 0.
inline double stability_tolerance(const EquilibriumState& eq) {
  return 1e-8 * eq.curvature_term();
}

struct DispersionSample {
  int l = 0;
  double lambda = 0.0;
  double a_l = 0.0;
  double t_l = 0.0;  // +inf for (l, lambda) = (0, 0)
  double b_l = 0.0;
  double N_heat = 0.0;
  double N_stokes = 0.0;
};

/// b_l(lambda). At lambda = 0 and l = 0 the limit b_0(0+) = c* a0 + sigma a_0
/// is substituted.
inline DispersionSample dispersion(const NtDOperator& op, int l, double lambda) {
  const auto& eq = op.equilibrium();
  DispersionSample d;
  d.l = l;
  d.lambda = lambda;
  d.a_l = a_eigenvalue(eq, l);
  if (l == 0 && lambda == 0.0) {
    d.N_heat = std::numeric_limits<double>::infinity();
    d.t_l = std::numeric_limits<double>::infinity();
    d.b_l = eq.c_star * eq.a0() + eq.sigma * d.a_l;
    return d;
  }
  d.N_heat = op.heat(l, lambda);
  d.N_stokes = op.stokes(l, lambda);
  const double cn = eq.c_star * d.N_heat;
  d.t_l = cn / (1.0 + cn * d.N_stokes);
  d.b_l = lambda * d.t_l + eq.sigma * d.a_l;
  return d;
}

inline DispersionSample dispersion(const EquilibriumState& eq, int l, double lambda,
                                   const NtDOptions& opts = {}) {
  return dispersion(NtDOperator(eq, opts), l, lambda);
}

/// Default lambda grid for tables: 0 and a log grid 1e-3 .. 1e4.
inline std::vector<double> default_lambda_grid(int per_decade = 4) {
  std::vector<double> g{0.0};
  for (int k = -3 * per_decade; k <= 4 * per_decade; ++k) g.push_back(std::pow(10.0, double(k) / per_decade));
  return g;
}

inline std::vector<DispersionSample> dispersion_table(const NtDOperator& op, int l_max,
                                                      const std::vector<double>& lambdas,
                                                      unsigned threads = 1) {
  std::vector<DispersionSample> out((l_max + 1) * lambdas.size());
  parallel_for(out.size(), threads, [&](std::size_t k) {
    out[k] = dispersion(op, static_cast<int>(k / lambdas.size()), lambdas[k % lambdas.size()]);
  });
  return out;
}

inline csv::Table dispersion_csv(const std::vector<DispersionSample>& rows) {
  csv::Table t({"l", "lambda", "a_l", "t_l", "b_l"});
  for (const auto& d : rows) t.row().add(d.l).add(d.lambda).add(d.a_l).add(d.t_l).add(d.b_l);
  return t;
}

struct UnstableEigenvalue {
  std::optional<double> lambda0;  // smallest positive root of b_0
  std::vector<double> roots;      // every root found on the scan
  bool degenerate = false;        // |s| within tolerance
  double residual = 0.0;          // |b_0(lambda0)|
  double scan_min = 0.0;          // smallest scanned lambda
  double scan_max = 0.0;          // largest scanned lambda
  std::vector<std::pair<double, double>> scan;  // (lambda, b_0)
};

struct RootOptions {
  int scan_points = 240;
  double rel_tol = 1e-10;
};

namespace detail {

/// Illinois false position on a bracket with sign(fa) != sign(fb), polished
/// by bisection when the secant step stalls.
template <class F>
double refine_root(F&& f, double a, double fa, double b, double fb, double rel_tol) {
  int side = 0;
  double x = a;
  for (int it = 0; it < 200; ++it) {
    x = (a * fb - b * fa) / (fb - fa);
    if (!(x > std::min(a, b) && x < std::max(a, b))) x = 0.5 * (a + b);
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == (fb < 0.0)) {
      b = x;
      fb = fx;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = x;
      fa = fx;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
    if (std::abs(b - a) <= rel_tol * 1e-3 * std::abs(x)) break;
  }
  return x;
}

}  // namespace detail

/// Positive roots of b_0. Requires a PDE-ready geometry and l* != 0.
inline UnstableEigenvalue find_unstable_eigenvalue(const NtDOperator& op,
                                                   const RootOptions& ro = {}) {
  const auto& eq = op.equilibrium();
  if (detail::latent_heat_vanishes_value(eq)) {
    throw Error(ErrorKind::Degenerate, "l* = 0: no coupling between temperature and interface");
  }
  UnstableEigenvalue out;
  const double s = stability_number(eq).s;
  if (std::abs(s) <= stability_tolerance(eq)) {
    out.degenerate = true;
    log::info("|s| below tolerance: no unstable eigenvalue is claimed");
    return out;
  }
  auto b0 = [&](double lam) { return dispersion(op, 0, lam).b_l; };

  // Upper end: b_0 grows like lambda^(1/2); double until positive.
  double hi = std::max(1.0, eq.curvature_term() / (eq.c_star * eq.a0() + 1e-300));
  for (int k = 0; k < 200 && b0(hi) <= 0.0; ++k) hi *= 2.0;
  out.scan_min = hi * 1e-8;
  out.scan_max = 4.0 * hi;
  const int K = ro.scan_points;
  out.scan.resize(K);
  for (int k = 0; k < K; ++k) {
    const double lam = out.scan_min * std::pow(out.scan_max / out.scan_min, double(k) / (K - 1));
    out.scan[k] = {lam, b0(lam)};
  }
  for (int k = 1; k < K; ++k) {
    const auto [la, fa] = out.scan[k - 1];
    const auto [lb, fb] = out.scan[k];
    if (fa == 0.0) out.roots.push_back(la);
    if (fa * fb < 0.0) out.roots.push_back(detail::refine_root(b0, la, fa, lb, fb, ro.rel_tol));
  }
  if (out.roots.size() > 1) {
    std::ostringstream os;
    os << "b_0 changes sign " << out.roots.size() << " times; reporting all roots";
    log::warn(os.str());
  }
  if (!out.roots.empty()) {
    out.lambda0 = out.roots.front();
    out.residual = std::abs(b0(*out.lambda0));
  }
  if (s < 0.0 && out.lambda0) log::warn("root of b_0 found although s < 0");
  if (s > 0.0 && !out.lambda0) log::warn("no root of b_0 found although s > 0");
  return out;
}

inline UnstableEigenvalue find_unstable_eigenvalue(const EquilibriumState& eq,
                                                   const NtDOptions& opts = {},
                                                   const RootOptions& ro = {}) {
  return find_unstable_eigenvalue(NtDOperator(eq, opts), ro);
}

struct B0Spectrum {
  std::vector<double> eigenvalues;  // ascending
  int positive_count = 0;           // positive eigenvalues of -L: negative eigenvalues of B_0
};

/// B_0 on the span of the sphere indicators (m-dimensional):
///   B_0 = c* a0 P + sigma A*,  P = orthogonal projection onto the constant,
/// with A* = -(n-1)/R*^2 on constants of each sphere.
inline B0Spectrum b0_explicit_spectrum(const EquilibriumState& eq) {
  const int m = eq.geometry.m;
  const Eigen::MatrixXd P = Eigen::MatrixXd::Constant(m, m, 1.0 / m);
  const Eigen::MatrixXd B = eq.c_star * eq.a0() * P -
                            eq.curvature_term() * Eigen::MatrixXd::Identity(m, m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
  B0Spectrum out;
  const double tol = stability_tolerance(eq);
  for (int i = 0; i < m; ++i) {
    out.eigenvalues.push_back(es.eigenvalues()(i));
    if (es.eigenvalues()(i) < -tol) ++out.positive_count;
  }
  return out;
}

struct KernelReport {
  int dimension = 0;                  // m n + 1
  std::optional<double> b1_at_zero;   // m = 1 only
  std::optional<double> b0_at_zero;   // b_0(0+) = -s
};

inline KernelReport kernel_dimension(const EquilibriumState& eq, const NtDOperator* op = nullptr) {
  if (detail::latent_heat_vanishes_value(eq)) {
    throw Error(ErrorKind::Degenerate, "l* = 0: kernel accounting needs a nonzero latent heat");
  }
  KernelReport out;
  out.dimension = eq.geometry.m * eq.geometry.n + 1;
  if (op) {
    out.b1_at_zero = dispersion(*op, 1, 0.0).b_l;
    out.b0_at_zero = dispersion(*op, 0, 0.0).b_l;
  }
  return out;
}

enum class Classification { normally_stable, normally_hyperbolic_unstable, degenerate_s_zero, degenerate_l_zero };

inline std::string_view classification_name(Classification c) {
  switch (c) {
    case Classification::normally_stable: return "normally_stable";
    case Classification::normally_hyperbolic_unstable: return "normally_hyperbolic_unstable";
    case Classification::degenerate_s_zero: return "degenerate_s_zero";
    case Classification::degenerate_l_zero: return "degenerate_l_zero";
  }
  return "unknown";
}

struct StabilityReport {
  double s = 0.0;
  double curvature_term = 0.0;
  double latent_term = 0.0;
  std::optional<double> phi_prime;
  std::optional<double> phi_prime_error;
  Classification classification = Classification::degenerate_s_zero;
  std::optional<double> lambda0;
  std::vector<double> all_roots;
  int positive_count = 0;
  int kernel_dim = 0;
  std::vector<double> b0_eigenvalues;
  std::vector<DispersionSample> dispersion;
};

struct ClassifyOptions {
  NtDOptions ntd;
  int l_max = kMaxScanMode;
  std::vector<double> lambdas = default_lambda_grid();
  unsigned threads = 1;
  bool with_table = true;
};

/// Full classification. PDE-backed parts (lambda0, dispersion table) are
/// computed for m = 1 concentric geometries only. `pair` enables phi'.
inline StabilityReport classify(const EquilibriumState& eq, const MaterialPair* pair = nullptr,
                                const ClassifyOptions& opts = {}) {
  StabilityReport rep;
  const auto sn = stability_number(eq);
  rep.s = sn.s;
  rep.curvature_term = sn.curvature_term;
  rep.latent_term = sn.latent_term;
  rep.kernel_dim = eq.geometry.m * eq.geometry.n + 1;
  if (pair) {
    try {
      const auto d = equilibrium_energy_derivative(eq, *pair);
      rep.phi_prime = d.value;
      rep.phi_prime_error = d.error_estimate;
    } catch (const Error& e) {
      log::warn(std::string("phi' unavailable: ") + e.what());
    }
  }
  const auto b0 = b0_explicit_spectrum(eq);
  rep.b0_eigenvalues = b0.eigenvalues;
  rep.positive_count = b0.positive_count;

  const double tol = stability_tolerance(eq);
  if (detail::latent_heat_vanishes_value(eq)) {
    rep.classification = Classification::degenerate_l_zero;
  } else if (eq.geometry.m == 1) {
    rep.classification = rep.s < -tol   ? Classification::normally_stable
                         : rep.s > tol  ? Classification::normally_hyperbolic_unstable
                                        : Classification::degenerate_s_zero;
  } else {
    rep.classification = std::abs(rep.s) > tol ? Classification::normally_hyperbolic_unstable
                                               : Classification::degenerate_s_zero;
  }

  if (eq.geometry.pde_ready()) {
    const NtDOperator op(eq, opts.ntd);
    if (rep.classification != Classification::degenerate_l_zero) {
      const auto root = find_unstable_eigenvalue(op);
      rep.lambda0 = root.lambda0;
      rep.all_roots = root.roots;
    }
    if (opts.with_table) rep.dispersion = dispersion_table(op, opts.l_max, opts.lambdas, opts.threads);
  }
  return rep;
}

}  // namespace interphase
