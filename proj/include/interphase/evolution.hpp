#pragma once

// Radially symmetric (mode 0) linearised evolution. The velocity vanishes in
// this mode, leaving
//   kappa_i d_t theta = d_i Lap theta            in each phase
//   [[theta]] = 0,  l* theta = sigma a_0 h       at R*,  a_0 = -(n-1)/R*^2
//   (l*/theta*) d_t h = [[d d_nu theta]]         at R*
//   d_nu theta = 0                               at R_outer
// Collocation in space; in time a differential-algebraic trapezoidal rule
// with the algebraic rows imposed at the new level.

#include <cmath>
#include <algorithm>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "interphase/csv.hpp"
#include "interphase/equilibrium.hpp"
#include "interphase/log.hpp"
#include "interphase/ntd.hpp"
#include "interphase/radial_bvp.hpp"

namespace interphase {

struct Mode0State {
  double t = 0.0;
  RadialField theta_field;
  double h = 0.0;
};

struct Mode0Sample {
  double t = 0.0;
  double h = 0.0;
  double theta_interface = 0.0;
  double Q = 0.0;
};

struct EvolutionOptions {
  int order = kDefaultOrder;
  int startup_substeps = 4;        // backward-Euler substeps replacing the first step
  int monitor_every = 50;          // Richardson comparison cadence (0 disables)
  int sample_every = 1;
  double constraint_tol = 1e-6;
  BvpOptions bvp{1e14};
};

struct Mode0Trajectory {
  std::vector<Mode0Sample> samples;
  std::optional<Mode0State> final_state;
  double max_constraint_residual = 0.0;  // relative Gibbs-Thomson residual
  double max_Q_drift = 0.0;              // |Q - Q(0)| / (|Q(0)| + ||theta_init||)
  double max_Q_drift_running = 0.0;      // same, against the running size of the terms of Q
  double richardson_error = 0.0;         // largest relative step-doubling difference
  bool projected_initial = false;
};

/// Q = int kappa* theta dx + (l*/theta*) |Gamma*| h.
inline double conserved_functional(const EquilibriumState& eq, const Mode0State& st) {
  const int n = eq.geometry.n;
  const double bulk = st.theta_field.mesh.integrate(n, [&](double r, int phase) {
    return (phase == 1 ? eq.kappa_star_1 : eq.kappa_star_2) * st.theta_field.at(r, phase);
  });
  return bulk + eq.l_star / eq.theta_star * eq.interface_area() * st.h;
}

/// Mode-0 curvature eigenvalue of A*: -(n-1)/R*^2.
inline double a_zero(const EquilibriumState& eq) {
  return -(eq.geometry.n - 1) / (eq.geometry.R_star * eq.geometry.R_star);
}

namespace detail {

struct Mode0System {
  Eigen::MatrixXd M;  // mass (zero on algebraic rows)
  Eigen::MatrixXd K;  // stiffness
  Eigen::VectorXd alg;  // 1 on algebraic rows
  int Ni = 0, No = 0;
};

inline Mode0System mode0_system(const EquilibriumState& eq, const RadialMesh& mesh) {
  const int n = eq.geometry.n;
  const auto& gi = mesh.inner();
  const auto& go = mesh.outer();
  const int Ni = gi.size(), No = go.size();
  const int size = Ni + No + 1;
  const int H = size - 1;
  Mode0System sys;
  sys.Ni = Ni;
  sys.No = No;
  sys.M = Eigen::MatrixXd::Zero(size, size);
  sys.K = Eigen::MatrixXd::Zero(size, size);
  sys.alg = Eigen::VectorXd::Zero(size);
  const Eigen::MatrixXd Di1 = gi.D1(1), Di2 = gi.D2(1);
  const Eigen::MatrixXd& Do1 = go.D1();
  const Eigen::MatrixXd& Do2 = go.D2();
  const auto ri = gi.nodes();
  const auto ro = go.nodes();
  int row = 0;
  for (int i = 0; i <= Ni - 2; ++i, ++row) {
    sys.M(row, i) = eq.kappa_star_1;
    for (int j = 0; j < Ni; ++j) sys.K(row, j) = eq.d_star_1 * (Di2(i, j) + (n - 1) / ri[i] * Di1(i, j));
  }
  for (int i = 1; i <= No - 2; ++i, ++row) {
    sys.M(row, Ni + i) = eq.kappa_star_2;
    for (int j = 0; j < No; ++j)
      sys.K(row, Ni + j) = eq.d_star_2 * (Do2(i, j) + (n - 1) / ro[i] * Do1(i, j));
  }
  // Interface height: (l/theta) h' = d_2 theta_2'(R) - d_1 theta_1'(R).
  sys.M(row, H) = eq.l_star / eq.theta_star;
  for (int j = 0; j < No; ++j) sys.K(row, Ni + j) += eq.d_star_2 * Do1(0, j);
  for (int j = 0; j < Ni; ++j) sys.K(row, j) -= eq.d_star_1 * Di1(Ni - 1, j);
  ++row;
  // Algebraic rows.
  sys.alg(row) = 1.0;
  sys.K(row, Ni - 1) = 1.0;
  sys.K(row, Ni) = -1.0;
  ++row;
  sys.alg(row) = 1.0;
  for (int j = 0; j < No; ++j) sys.K(row, Ni + j) = Do1(No - 1, j);
  ++row;
  sys.alg(row) = 1.0;
  sys.K(row, Ni - 1) = eq.l_star;
  sys.K(row, H) = -eq.sigma * a_zero(eq);
  return sys;
}

/// One-step map y_{k+1} = solve(L, R y_k) for the trapezoidal rule (theta = 1/2)
/// or backward Euler (theta = 1); algebraic rows are enforced at the new level.
struct StepOperator {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::MatrixXd rhs;

  StepOperator(const Mode0System& sys, double dt, double theta, const BvpOptions& opts) {
    const int size = static_cast<int>(sys.alg.size());
    Eigen::MatrixXd L(size, size);
    rhs = Eigen::MatrixXd::Zero(size, size);
    for (int i = 0; i < size; ++i) {
      if (sys.alg(i) != 0.0) {
        L.row(i) = sys.K.row(i);
      } else {
        L.row(i) = sys.M.row(i) / dt - theta * sys.K.row(i);
        rhs.row(i) = sys.M.row(i) / dt + (1.0 - theta) * sys.K.row(i);
      }
    }
    lu.compute(L);
    const double rc = lu.rcond();
    if (!(rc > 0.0) || 1.0 / rc > opts.max_condition) {
      std::ostringstream os;
      os << "time-step matrix condition estimate " << (rc > 0.0 ? 1.0 / rc : INFINITY);
      throw Error(ErrorKind::StepRejected, os.str());
    }
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& y) const { return lu.solve(rhs * y); }
};

inline Eigen::VectorXd pack(const Mode0State& st) {
  const auto& f = st.theta_field;
  Eigen::VectorXd y(f.inner.size() + f.outer.size() + 1);
  int k = 0;
  for (double v : f.inner) y(k++) = v;
  for (double v : f.outer) y(k++) = v;
  y(k) = st.h;
  return y;
}

inline void unpack(const Eigen::VectorXd& y, Mode0State& st) {
  auto& f = st.theta_field;
  int k = 0;
  for (auto& v : f.inner) v = y(k++);
  for (auto& v : f.outer) v = y(k++);
  st.h = y(k);
}

}  // namespace detail

/// Relative Gibbs-Thomson residual |l* theta(R*) - sigma a_0 h| / scale.
inline double constraint_residual(const EquilibriumState& eq, const Mode0State& st, double scale) {
  const double r = eq.l_star * st.theta_field.interface_inner() - eq.sigma * a_zero(eq) * st.h;
  return std::abs(r) / scale;
}

inline Mode0Trajectory simulate_mode0(const EquilibriumState& eq, const RadialField& theta_init,
                                      double h_init, double T_end, double dt,
                                      const EvolutionOptions& opts = {}) {
  if (!eq.geometry.pde_ready()) {
    throw Error(ErrorKind::UnsupportedGeometry, "mode-0 evolution needs m = 1, concentric");
  }
  if (!(dt > 0.0) || !(T_end > 0.0)) throw Error(ErrorKind::OutOfRange, "dt and T_end must be > 0");
  if (theta_init.mode != 0 || theta_init.parity != 1) {
    throw Error(ErrorKind::UnsupportedMode, "initial temperature must be a mode-0 (even) field");
  }
  const RadialMesh& mesh = theta_init.mesh;
  if (mesh.R() != eq.geometry.R_star || mesh.R_outer() != eq.geometry.R_outer) {
    throw Error(ErrorKind::QuadratureGridMismatch, "initial field mesh does not match the geometry");
  }
  const auto sys = detail::mode0_system(eq, mesh);
  const int steps = static_cast<int>(std::llround(T_end / dt));
  if (steps < 1) throw Error(ErrorKind::OutOfRange, "T_end / dt must be >= 1");

  Mode0Trajectory traj;
  Mode0State st{0.0, theta_init, h_init};
  const double theta_norm = theta_init.max_abs();
  const double gt_scale = [&] {
    const double a = std::abs(eq.l_star) * theta_norm;
    const double b = std::abs(eq.sigma * a_zero(eq) * h_init);
    return std::max({a, b, std::numeric_limits<double>::min()});
  }();
  if (constraint_residual(eq, st, gt_scale) > 1e-8) {
    st.h = eq.l_star * st.theta_field.interface_inner() / (eq.sigma * a_zero(eq));
    traj.projected_initial = true;
    log::warn("initial data violate the Gibbs-Thomson relation; h projected");
  }
  const double Q0 = conserved_functional(eq, st);
  const double h_weight = std::abs(eq.l_star / eq.theta_star) * eq.interface_area();
  const double q_scale = std::abs(Q0) + theta_norm;
  double run_scale = std::abs(Q0);

  auto record = [&] {
    const double Q = conserved_functional(eq, st);
    traj.samples.push_back({st.t, st.h, st.theta_field.interface_inner(), Q});
    run_scale = std::max(run_scale, std::abs(Q0) + eq.kappa_mass * st.theta_field.max_abs() +
                                        h_weight * std::abs(st.h));
    const double dq = std::abs(Q - Q0);
    if (q_scale > 0.0) traj.max_Q_drift = std::max(traj.max_Q_drift, dq / q_scale);
    if (run_scale > 0.0) traj.max_Q_drift_running = std::max(traj.max_Q_drift_running, dq / run_scale);
  };
  record();

  const detail::StepOperator trap(sys, dt, 0.5, opts.bvp);
  const int sub = std::max(1, opts.startup_substeps);
  const detail::StepOperator euler(sys, dt / sub, 1.0, opts.bvp);
  std::optional<detail::StepOperator> half;
  if (opts.monitor_every > 0) half.emplace(sys, 0.5 * dt, 0.5, opts.bvp);

  Eigen::VectorXd y = detail::pack(st);
  for (int k = 1; k <= steps; ++k) {
    Eigen::VectorXd next;
    if (k == 1 && sub > 1) {
      next = y;
      for (int j = 0; j < sub; ++j) next = euler.apply(next);
    } else {
      next = trap.apply(y);
      if (half && k % opts.monitor_every == 0) {
        const Eigen::VectorXd fine = half->apply(half->apply(y));
        const double denom = std::max(fine.norm(), std::numeric_limits<double>::min());
        traj.richardson_error = std::max(traj.richardson_error, (next - fine).norm() / (3.0 * denom));
      }
    }
    if (!next.allFinite()) throw Error(ErrorKind::StepRejected, "non-finite state after a step");
    y = std::move(next);
    detail::unpack(y, st);
    st.t = k * dt;
    const double scale = std::max(gt_scale, std::abs(eq.l_star) * st.theta_field.max_abs());
    const double res = constraint_residual(eq, st, scale);
    traj.max_constraint_residual = std::max(traj.max_constraint_residual, res);
    if (res > opts.constraint_tol) {
      std::ostringstream os;
      os << "Gibbs-Thomson residual " << res << " at t = " << st.t;
      throw Error(ErrorKind::ConstraintDrift, os.str());
    }
    if (k % std::max(1, opts.sample_every) == 0 || k == steps) record();
  }
  traj.final_state = st;
  return traj;
}

/// Kernel (equilibrium-shift) value of h carried by the conserved Q: the
/// constant-temperature kernel vector (c, l* c/(sigma a_0)) has
/// Q = c (kappa|1) R*^2 s / (sigma (n-1)).
inline double kernel_height(const EquilibriumState& eq, double Q) {
  const double s = stability_number(eq).s;
  const int n = eq.geometry.n;
  const double R = eq.geometry.R_star;
  const double c = Q * eq.sigma * (n - 1) / (eq.kappa_mass * s * R * R);
  return eq.l_star * c / (eq.sigma * a_zero(eq));
}

struct RateFit {
  double rate = 0.0;
  double intercept = 0.0;
  double h_inf = 0.0;
  double rms_residual = 0.0;  // of log|h - h_inf| about the fitted line
  int used = 0;
};

/// Least squares on log|h - h_inf| over [T/2, T], ignoring samples below
/// 1e3 eps max|h - h_inf|.
inline RateFit fit_rate(const EquilibriumState& eq, const Mode0Trajectory& tr) {
  RateFit fit;
  if (tr.samples.size() < 3) return fit;
  fit.h_inf = kernel_height(eq, tr.samples.front().Q);
  const double T = tr.samples.back().t;
  double peak = 0.0;
  for (const auto& s : tr.samples) peak = std::max(peak, std::abs(s.h - fit.h_inf));
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * peak;
  std::vector<double> ts, ls;
  for (const auto& s : tr.samples) {
    const double v = std::abs(s.h - fit.h_inf);
    if (s.t >= 0.5 * T && v > floor) {
      ts.push_back(s.t);
      ls.push_back(std::log(v));
    }
  }
  fit.used = static_cast<int>(ts.size());
  if (fit.used < 2) return fit;
  double mt = 0, ml = 0;
  for (int i = 0; i < fit.used; ++i) {
    mt += ts[i];
    ml += ls[i];
  }
  mt /= fit.used;
  ml /= fit.used;
  double stt = 0, stl = 0;
  for (int i = 0; i < fit.used; ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    stl += (ts[i] - mt) * (ls[i] - ml);
  }
  fit.rate = stl / stt;
  fit.intercept = ml - fit.rate * mt;
  double ss = 0;
  for (int i = 0; i < fit.used; ++i) {
    const double e = ls[i] - (fit.intercept + fit.rate * ts[i]);
    ss += e * e;
  }
  fit.rms_residual = std::sqrt(ss / fit.used);
  return fit;
}

/// Gaussian bump centred at the origin, width R_outer/6, with h from the
/// Gibbs-Thomson relation.
inline Mode0State bump_initial(const EquilibriumState& eq, const RadialMesh& mesh,
                               double amplitude = 1.0) {
  const double w = eq.geometry.R_outer / 6.0;
  Mode0State st{0.0, sample_field(mesh, 0, 1, [&](double r, int) {
                  return amplitude * std::exp(-r * r / (2.0 * w * w));
                }),
                0.0};
  st.h = eq.l_star * st.theta_field.interface_inner() / (eq.sigma * a_zero(eq));
  return st;
}

/// Eigenvector for the root lambda0 of b_0: theta = N^H(lambda0) field with
/// unit flux jump, h = -theta*/(l* lambda0).
inline Mode0State eigen_initial(const EquilibriumState& eq, const RadialMesh& mesh, double lambda0) {
  const ScalarCoefficients c{eq.d_star_1, eq.d_star_2, eq.kappa_star_1 * lambda0,
                             eq.kappa_star_2 * lambda0};
  auto sol = solve_scalar_mode(mesh, eq.geometry.n, c, 0, 1.0);
  return Mode0State{0.0, std::move(sol.field), -eq.theta_star / (eq.l_star * lambda0)};
}

/// Two-column text profile "r, theta" (comma or whitespace separated, '#'
/// comments), linearly interpolated onto the mesh; h from Gibbs-Thomson.
inline Mode0State custom_initial(const EquilibriumState& eq, const RadialMesh& mesh,
                                 const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read initial profile " + path);
  std::vector<std::pair<double, double>> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (auto p = line.find('#'); p != std::string::npos) line.erase(p);
    for (auto& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    double r, v;
    if (ls >> r >> v) pts.emplace_back(r, v);
  }
  if (pts.size() < 2) throw Error(ErrorKind::ConfigError, "initial profile needs >= 2 points");
  std::sort(pts.begin(), pts.end());
  auto interp = [&](double r) {
    if (r <= pts.front().first) return pts.front().second;
    if (r >= pts.back().first) return pts.back().second;
    auto it = std::lower_bound(pts.begin(), pts.end(), std::make_pair(r, -std::numeric_limits<double>::infinity()));
    const auto& [r1, v1] = *it;
    const auto& [r0, v0] = *(it - 1);
    return v0 + (v1 - v0) * (r - r0) / (r1 - r0);
  };
  Mode0State st{0.0, sample_field(mesh, 0, 1, [&](double r, int) { return interp(r); }), 0.0};
  st.h = eq.l_star * st.theta_field.interface_inner() / (eq.sigma * a_zero(eq));
  return st;
}

inline csv::Table trajectory_csv(const Mode0Trajectory& tr) {
  csv::Table t({"t", "h", "theta_interface", "Q"});
  for (const auto& s : tr.samples) t.row().add(s.t).add(s.h).add(s.theta_interface).add(s.Q);
  return t;
}

}  // namespace interphase
