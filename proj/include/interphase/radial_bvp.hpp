#pragma once

// Two-phase radial boundary-value problems on [0, R*] u [R*, R_outer] for a
// single spherical-harmonic (n = 3) or Fourier (n = 2) mode, discretised by
// Chebyshev collocation with explicit interface rows and solved by dense LU.
//
// Mode conventions: Y is a degree-l harmonic with angular eigenvalue
// c_l = l(l+n-2) (so c_l = k^2 for n = 2), normalised to mean square one on
// the unit sphere. Interface data follow the jump convention
// [[v]] = v_outer - v_inner with the normal pointing out of the inner ball:
//   scalar:  [[theta]] = 0,  -[[d theta']] = g,   theta'(R_outer) = 0
//   Stokes:  [[u]] = 0,      -[[T nu]] = g nu,    u(R_outer) = 0

#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "interphase/chebyshev.hpp"
#include "interphase/equilibrium.hpp"
#include "interphase/error.hpp"

namespace interphase {

inline constexpr int kDefaultOrder = 64;

/// Angular eigenvalue of the mode: l(l+n-2) for n = 3, l^2 for n = 2.
inline double angular_eigenvalue(int n, int l) { return static_cast<double>(l) * (l + n - 2); }

namespace detail {

struct MeshGrids {
  cheb::ParityGrid inner;
  cheb::IntervalGrid outer;
  cheb::GaussRule gauss_inner;
  cheb::GaussRule gauss_outer;

  MeshGrids(int order, double R, double R_outer)
      : inner(R, order),
        outer(R, R_outer, order),
        gauss_inner(cheb::gauss_legendre(inner.full_degree() + 3)),
        gauss_outer(cheb::gauss_legendre(order + 3)) {}
};

}  // namespace detail

/// Collocation nodes of both phases. The inner nodes are the positive half
/// of an odd-degree grid on [-R*, R*] and end at R*; the outer nodes run from
/// R* to R_outer. `order` is the polynomial degree N per phase.
class RadialMesh {
 public:
  RadialMesh(int order, double R, double R_outer) {
    if (order < 4) throw Error(ErrorKind::IllConditioned, "collocation order must be >= 4");
    if (!(R > 0.0 && R < R_outer)) {
      throw Error(ErrorKind::GeometryViolation, "mesh requires 0 < R* < R_outer");
    }
    grids_ = std::make_shared<const detail::MeshGrids>(order, R, R_outer);
    order_ = order;
    R_ = R;
    R_outer_ = R_outer;
  }

  int order() const { return order_; }
  double R() const { return R_; }
  double R_outer() const { return R_outer_; }
  int inner_size() const { return grids_->inner.size(); }
  int outer_size() const { return grids_->outer.size(); }
  std::span<const double> nodes_inner() const { return grids_->inner.nodes(); }
  std::span<const double> nodes_outer() const { return grids_->outer.nodes(); }
  const cheb::ParityGrid& inner() const { return grids_->inner; }
  const cheb::IntervalGrid& outer() const { return grids_->outer; }

  bool same_as(const RadialMesh& other) const {
    return order_ == other.order_ && R_ == other.R_ && R_outer_ == other.R_outer_;
  }

  /// s_n * int_0^{R_outer} f(r, phase) r^{n-1} dr, phase 1 inside and 2
  /// outside; Gauss-Legendre on each phase with enough points to integrate
  /// products of two collocation polynomials exactly.
  template <class F>
  double integrate(int n, F&& f) const {
    double inner_sum = 0.0;
    const auto& gi = grids_->gauss_inner;
    for (std::size_t k = 0; k < gi.nodes.size(); ++k) {
      const double r = 0.5 * R_ * (gi.nodes[k] + 1.0);
      inner_sum += gi.weights[k] * f(r, 1) * std::pow(r, n - 1);
    }
    inner_sum *= 0.5 * R_;
    double outer_sum = 0.0;
    const auto& go = grids_->gauss_outer;
    const double half = 0.5 * (R_outer_ - R_);
    for (std::size_t k = 0; k < go.nodes.size(); ++k) {
      const double r = R_ + half * (go.nodes[k] + 1.0);
      outer_sum += go.weights[k] * f(r, 2) * std::pow(r, n - 1);
    }
    outer_sum *= half;
    return unit_sphere_area(n) * (inner_sum + outer_sum);
  }

 private:
  std::shared_ptr<const detail::MeshGrids> grids_;
  int order_ = 0;
  double R_ = 0.0, R_outer_ = 0.0;
};

/// Nodal values of one radial profile in both phases. `parity` is the
/// symmetry of the inner polynomial under r -> -r (+1 even, -1 odd).
struct RadialField {
  RadialMesh mesh;
  int mode = 0;
  int parity = 1;
  std::vector<double> inner;
  std::vector<double> outer;

  RadialField(RadialMesh m, int mode_, int parity_)
      : mesh(std::move(m)),
        mode(mode_),
        parity(parity_),
        inner(mesh.inner_size(), 0.0),
        outer(mesh.outer_size(), 0.0) {}

  /// Evaluate in a given phase (the interface belongs to both).
  double at(double r, int phase) const {
    return phase == 1 ? mesh.inner().interpolate(inner, parity, r) : mesh.outer().interpolate(outer, r);
  }
  double operator()(double r) const { return at(r, r <= mesh.R() ? 1 : 2); }

  double interface_inner() const { return inner.back(); }
  double interface_outer() const { return outer.front(); }

  RadialField derivative() const {
    RadialField d(mesh, mode, -parity);
    const Eigen::Map<const Eigen::VectorXd> vi(inner.data(), inner.size());
    const Eigen::Map<const Eigen::VectorXd> vo(outer.data(), outer.size());
    Eigen::VectorXd di = mesh.inner().D1(parity) * vi;
    Eigen::VectorXd dout = mesh.outer().D1() * vo;
    d.inner.assign(di.data(), di.data() + di.size());
    d.outer.assign(dout.data(), dout.data() + dout.size());
    return d;
  }

  RadialField scaled(double alpha) const {
    RadialField out = *this;
    for (auto& v : out.inner) v *= alpha;
    for (auto& v : out.outer) v *= alpha;
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : inner) m = std::max(m, std::abs(v));
    for (double v : outer) m = std::max(m, std::abs(v));
    return m;
  }
};

/// Sample a profile given per phase onto the mesh.
template <class F>
RadialField sample_field(const RadialMesh& mesh, int mode, int parity, F&& f) {
  RadialField out(mesh, mode, parity);
  const auto ni = mesh.nodes_inner();
  const auto no = mesh.nodes_outer();
  for (std::size_t k = 0; k < ni.size(); ++k) out.inner[k] = f(ni[k], 1);
  for (std::size_t k = 0; k < no.size(); ++k) out.outer[k] = f(no[k], 2);
  return out;
}

struct BvpOptions {
  double max_condition = 1e13;
};

struct SolveDiagnostics {
  double residual = 0.0;   // ||A x - b|| / (||A|| ||x|| + ||b||)
  double condition = 0.0;  // 1 / rcond estimate
};

namespace detail {

inline Eigen::VectorXd dense_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                   const BvpOptions& opts, SolveDiagnostics& diag,
                                   const char* what) {
  // Row equilibration: collocation rows scale like N^4, interface rows like 1.
  Eigen::VectorXd w = A.cwiseAbs().rowwise().maxCoeff();
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = w(i) > 0.0 ? 1.0 / w(i) : 1.0;
  const Eigen::MatrixXd As = w.asDiagonal() * A;
  const Eigen::VectorXd bs = w.cwiseProduct(b);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(As);
  const double rc = lu.rcond();
  diag.condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (!(diag.condition <= opts.max_condition)) {
    std::ostringstream os;
    os << what << ": condition estimate " << diag.condition << " exceeds " << opts.max_condition;
    throw Error(ErrorKind::IllConditioned, os.str());
  }
  Eigen::VectorXd x = lu.solve(bs);
  const double denom = As.norm() * x.norm() + bs.norm();
  diag.residual = denom > 0.0 ? (As * x - bs).norm() / denom : 0.0;
  if (!x.allFinite()) throw Error(ErrorKind::IllConditioned, std::string(what) + ": non-finite solution");
  return x;
}

inline int mode_parity(int l) { return (l % 2 == 0) ? 1 : -1; }

/// Rows of d (f'' + (n-1)/r f' - c/r^2 f) - reaction f on the nodes in `rows`.
inline void put_scalar_operator(Eigen::MatrixXd& A, int row0, int col0, std::span<const double> r,
                                const Eigen::MatrixXd& D1, const Eigen::MatrixXd& D2, int n,
                                double c, double d, double reaction, int first, int last) {
  int row = row0;
  for (int i = first; i <= last; ++i, ++row) {
    for (int j = 0; j < static_cast<int>(r.size()); ++j) {
      A(row, col0 + j) = d * (D2(i, j) + (n - 1) / r[i] * D1(i, j));
    }
    A(row, col0 + i) -= d * c / (r[i] * r[i]) + reaction;
  }
}

/// Integrals of the even inner and the outer cardinal functions, so that
/// w . values = int_Omega f dx for a mode-0 field.
inline Eigen::VectorXd even_cardinal_weights(const RadialMesh& mesh, int n) {
  const auto& gi = mesh.inner();
  const auto& go = mesh.outer();
  const int Ni = gi.size(), No = go.size();
  Eigen::VectorXd w(Ni + No);
  std::vector<double> e(Ni, 0.0);
  for (int j = 0; j < Ni; ++j) {
    e.assign(Ni, 0.0);
    e[j] = 1.0;
    w(j) = mesh.integrate(n, [&](double r, int phase) { return phase == 1 ? gi.interpolate(e, 1, r) : 0.0; });
  }
  for (int j = 0; j < No; ++j) {
    e.assign(No, 0.0);
    e[j] = 1.0;
    w(Ni + j) = mesh.integrate(n, [&](double r, int phase) { return phase == 2 ? go.interpolate(e, r) : 0.0; });
  }
  return w;
}

}  // namespace detail

struct ScalarCoefficients {
  double d_inner = 1.0;
  double d_outer = 1.0;
  double reaction_inner = 0.0;  // kappa_1 * lambda
  double reaction_outer = 0.0;  // kappa_2 * lambda
};

struct ScalarModeSolution {
  RadialField field;
  SolveDiagnostics diagnostics;
};

/// Solves d_i (f'' + (n-1)/r f' - c_l/r^2 f) = reaction_i f in each phase with
/// f continuous, -[[d f']] = g at R*, f'(R_outer) = 0, and the regular
/// behaviour at the origin carried by the parity (-1)^l of the inner basis.
inline ScalarModeSolution solve_scalar_mode(const RadialMesh& mesh, int n,
                                            const ScalarCoefficients& coef, int l, double g,
                                            const BvpOptions& opts = {}) {
  if (l < 0) throw Error(ErrorKind::UnsupportedMode, "mode index must be >= 0");
  if (coef.reaction_inner < 0.0 || coef.reaction_outer < 0.0) {
    throw Error(ErrorKind::SingularProblem, "reaction terms kappa*lambda must be >= 0");
  }
  if (l == 0 && coef.reaction_inner == 0.0 && coef.reaction_outer == 0.0) {
    throw Error(ErrorKind::SingularProblem,
                "pure Neumann problem (lambda = 0, l = 0) is solvable only for mean-zero data");
  }
  const int p = detail::mode_parity(l);
  const double c = angular_eigenvalue(n, l);
  const auto& gi = mesh.inner();
  const auto& go = mesh.outer();
  const int Ni = gi.size(), No = go.size();
  const auto ri = gi.nodes();
  const auto ro = go.nodes();
  const Eigen::MatrixXd Di1 = gi.D1(p), Di2 = gi.D2(p);
  const Eigen::MatrixXd& Do1 = go.D1();
  const Eigen::MatrixXd& Do2 = go.D2();

  // Mode 0 with small reaction is nearly singular. Split f = C + psi with
  // (kappa|psi) = 0 and carry rho C as an extra unknown, rho = max reaction.
  const bool split = (l == 0);
  const double rho = std::max(coef.reaction_inner, coef.reaction_outer);
  const int size = Ni + No + (split ? 1 : 0);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(size, size);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(size);
  int row = 0;
  detail::put_scalar_operator(A, row, 0, ri, Di1, Di2, n, c, coef.d_inner, coef.reaction_inner, 0,
                              Ni - 2);
  if (split) {
    for (int i = 0; i <= Ni - 2; ++i) A(row + i, size - 1) = -coef.reaction_inner / rho;
    for (int i = 0; i < No - 2; ++i) A(row + Ni - 1 + i, size - 1) = -coef.reaction_outer / rho;
  }
  row += Ni - 1;
  detail::put_scalar_operator(A, row, Ni, ro, Do1, Do2, n, c, coef.d_outer, coef.reaction_outer, 1,
                              No - 2);
  row += No - 2;
  // continuity
  A(row, Ni - 1) = 1.0;
  A(row, Ni) = -1.0;
  ++row;
  // flux jump: d_1 f_1'(R) - d_2 f_2'(R) = g
  for (int j = 0; j < Ni; ++j) A(row, j) += coef.d_inner * Di1(Ni - 1, j);
  for (int j = 0; j < No; ++j) A(row, Ni + j) -= coef.d_outer * Do1(0, j);
  b(row) = 1.0;
  ++row;
  // Neumann at the wall
  for (int j = 0; j < No; ++j) A(row, Ni + j) = Do1(No - 1, j);
  double shift = 0.0;
  if (split) {
    ++row;
    const Eigen::VectorXd w = detail::even_cardinal_weights(mesh, n);
    for (int j = 0; j < Ni; ++j) A(row, j) = coef.reaction_inner / rho * w(j);
    for (int j = 0; j < No; ++j) A(row, Ni + j) = coef.reaction_outer / rho * w(Ni + j);
  }

  ScalarModeSolution out{RadialField(mesh, l, p), {}};
  const Eigen::VectorXd x = g * detail::dense_solve(A, b, opts, out.diagnostics, "scalar mode");
  if (split) shift = x(size - 1) / rho;
  for (int k = 0; k < Ni; ++k) out.field.inner[k] = x(k) + shift;
  for (int k = 0; k < No; ++k) out.field.outer[k] = x(Ni + k) + shift;
  return out;
}

struct NeumannCompatibleResult {
  RadialField field;
  double compatibility_defect = 0.0;  // |int rhs + g |Gamma||, relative
  double multiplier = 0.0;            // bordering multiplier (discrete defect)
  SolveDiagnostics diagnostics;
};

/// Radial (mode 0) pure-Neumann problem
///   -d_i (f'' + (n-1)/r f') = rhs_i(r),  [[f]] = 0,  -[[d f']] = g,  f'(R_outer) = 0,
/// normalised by (kappa|f)_Omega = 0. The data must satisfy
/// int_Omega rhs dx + g |Gamma| = 0 to 1e-12 (relative); IncompatibleData
/// otherwise. The singular collocation matrix is bordered with the
/// normalisation row and a multiplier column on the interior equations.
template <class RhsInner, class RhsOuter>
NeumannCompatibleResult solve_neumann_compatible(const RadialMesh& mesh, int n, double d_inner,
                                                 double d_outer, double kappa_inner,
                                                 double kappa_outer, RhsInner&& rhs_inner,
                                                 RhsOuter&& rhs_outer, double g,
                                                 const BvpOptions& opts = {}) {
  const double area = unit_sphere_area(n) * std::pow(mesh.R(), n - 1);
  const double rhs_int =
      mesh.integrate(n, [&](double r, int phase) { return phase == 1 ? rhs_inner(r) : rhs_outer(r); });
  const double rhs_abs = mesh.integrate(
      n, [&](double r, int phase) { return std::abs(phase == 1 ? rhs_inner(r) : rhs_outer(r)); });
  const double defect = std::abs(rhs_int + g * area) / (rhs_abs + std::abs(g) * area + 1e-300);
  if (defect > 1e-12) {
    std::ostringstream os;
    os << "Neumann compatibility violated: int rhs + g|Gamma| = " << rhs_int + g * area
       << " (relative " << defect << ")";
    throw Error(ErrorKind::IncompatibleData, os.str());
  }

  const auto& gi = mesh.inner();
  const auto& go = mesh.outer();
  const int Ni = gi.size(), No = go.size();
  const auto ri = gi.nodes();
  const auto ro = go.nodes();
  const Eigen::MatrixXd Di1 = gi.D1(1), Di2 = gi.D2(1);
  const Eigen::MatrixXd& Do1 = go.D1();
  const Eigen::MatrixXd& Do2 = go.D2();

  const int size = Ni + No + 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(size, size);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(size);
  int row = 0;
  // -d Laplacian f = rhs, written as d Laplacian f = -rhs.
  detail::put_scalar_operator(A, row, 0, ri, Di1, Di2, n, 0.0, d_inner, 0.0, 0, Ni - 2);
  for (int i = 0; i <= Ni - 2; ++i) {
    b(row + i) = -rhs_inner(ri[i]);
    A(row + i, size - 1) = 1.0;
  }
  row += Ni - 1;
  detail::put_scalar_operator(A, row, Ni, ro, Do1, Do2, n, 0.0, d_outer, 0.0, 1, No - 2);
  for (int i = 1; i <= No - 2; ++i) {
    b(row + i - 1) = -rhs_outer(ro[i]);
    A(row + i - 1, size - 1) = 1.0;
  }
  row += No - 2;
  A(row, Ni - 1) = 1.0;
  A(row, Ni) = -1.0;
  ++row;
  for (int j = 0; j < Ni; ++j) A(row, j) += d_inner * Di1(Ni - 1, j);
  for (int j = 0; j < No; ++j) A(row, Ni + j) -= d_outer * Do1(0, j);
  b(row) = g;
  ++row;
  for (int j = 0; j < No; ++j) A(row, Ni + j) = Do1(No - 1, j);
  ++row;
  // Normalisation (kappa|f) = 0 via the quadrature of the nodal interpolant.
  const Eigen::VectorXd w = detail::even_cardinal_weights(mesh, n);
  for (int j = 0; j < Ni; ++j) A(row, j) = kappa_inner * w(j);
  for (int j = 0; j < No; ++j) A(row, Ni + j) = kappa_outer * w(Ni + j);

  NeumannCompatibleResult out{RadialField(mesh, 0, 1), defect, 0.0, {}};
  const Eigen::VectorXd x = detail::dense_solve(A, b, opts, out.diagnostics, "Neumann problem");
  for (int k = 0; k < Ni; ++k) out.field.inner[k] = x(k);
  for (int k = 0; k < No; ++k) out.field.outer[k] = x(Ni + k);
  out.multiplier = x(size - 1);
  return out;
}

/// Subtract the constant that makes (kappa|f)_Omega vanish (mode 0 only).
inline RadialField normalize_kappa_mean(const RadialField& f, int n, double kappa_inner,
                                        double kappa_outer) {
  const double mass = f.mesh.integrate(n, [&](double, int phase) {
    return phase == 1 ? kappa_inner : kappa_outer;
  });
  const double mean = f.mesh.integrate(n, [&](double r, int phase) {
    return (phase == 1 ? kappa_inner : kappa_outer) * f.at(r, phase);
  }) / mass;
  RadialField out = f;
  for (auto& v : out.inner) v -= mean;
  for (auto& v : out.outer) v -= mean;
  return out;
}

/// Poloidal velocity/pressure of one mode:
///   u = u_r(r) Y e_r + u_t(r) grad_S Y,  p = p(r) Y,
/// with normal stress S = 2 mu u_r' - p and shear stress
/// T = mu (u_t' + (u_r - u_t)/r).
struct StokesModeSolution {
  RadialField u_r;
  RadialField u_t;
  RadialField p;
  RadialField normal_stress;
  RadialField shear_stress;
  double mu_inner = 1.0;
  double mu_outer = 1.0;
  double divergence_residual = 0.0;  // max over all nodes of |div u| (per mode)
  SolveDiagnostics diagnostics;
};

/// lambda u - mu Lap u + grad p = 0, div u = 0 in each phase, [[u]] = 0,
/// -[[T nu]] = g nu at R*, u = 0 at R_outer, for one mode l >= 1.
///
/// First-order system in (u_r, u_t, S, T):
///   u_r' = -(n-1) u_r/r + c u_t/r
///   u_t' = T/mu + (u_t - u_r)/r
///   S'   = lambda u_r + c T/r + (2 n mu/r^2) ((n-1) u_r - c u_t)
///   T'   = lambda u_t - S/r - n T/r + (mu/r^2) ((4c - 2n + 4) u_t - 2 n u_r)
/// Inner parities: (-1)^(l-1) for u_r, u_t and (-1)^l for S, T.
namespace detail {

struct StokesSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;  // unit normal-traction jump
  int Ni = 0, No = 0;
  int pv = 1, ps = -1;

  int col(int phase, int comp, int k) const {
    return phase == 1 ? comp * Ni + k : 4 * Ni + comp * No + k;
  }
};

inline StokesSystem assemble_stokes(const RadialMesh& mesh, int n, double mu_inner,
                                    double mu_outer, int l, double lambda) {
  const double c = angular_eigenvalue(n, l);
  const int pv = detail::mode_parity(l - 1);  // velocity parity
  const int ps = -pv;                         // stress parity
  const auto& gi = mesh.inner();
  const auto& go = mesh.outer();
  const int Ni = gi.size(), No = go.size();
  const auto ri = gi.nodes();
  const auto ro = go.nodes();
  const Eigen::MatrixXd Dv = gi.D1(pv), Ds = gi.D1(ps);
  const Eigen::MatrixXd& Do = go.D1();

  // Unknown layout: [U_in, V_in, S_in, T_in, U_out, V_out, S_out, T_out].
  StokesSystem sys;
  sys.Ni = Ni;
  sys.No = No;
  sys.pv = pv;
  sys.ps = ps;
  auto col = [&](int phase, int comp, int k) { return sys.col(phase, comp, k); };
  const int size = 4 * (Ni + No);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(size, size);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(size);
  int row = 0;

  auto put_equation = [&](int phase, int eq, int i) {
    const bool in = phase == 1;
    const double r = in ? ri[i] : ro[i];
    const double mu = in ? mu_inner : mu_outer;
    const int N = in ? Ni : No;
    const Eigen::MatrixXd& D = in ? (eq < 2 ? Dv : Ds) : Do;
    const int comp = eq;  // equation k differentiates component k
    for (int j = 0; j < N; ++j) A(row, col(phase, comp, j)) += D(i, j);
    const int U = col(phase, 0, i), V = col(phase, 1, i), S = col(phase, 2, i), T = col(phase, 3, i);
    switch (eq) {
      case 0:
        A(row, U) += (n - 1) / r;
        A(row, V) -= c / r;
        break;
      case 1:
        A(row, T) -= 1.0 / mu;
        A(row, V) -= 1.0 / r;
        A(row, U) += 1.0 / r;
        break;
      case 2:
        A(row, U) -= lambda + 2.0 * n * mu * (n - 1) / (r * r);
        A(row, T) -= c / r;
        A(row, V) += 2.0 * n * mu * c / (r * r);
        break;
      case 3:
        A(row, V) -= lambda + mu * (4.0 * c - 2.0 * n + 4.0) / (r * r);
        A(row, S) += 1.0 / r;
        A(row, T) += n / r;
        A(row, U) += 2.0 * n * mu / (r * r);
        break;
    }
    ++row;
  };

  for (int eq = 0; eq < 4; ++eq) {
    // Inner: the stress equations are replaced at R* by interface rows.
    const int last_inner = (eq >= 2) ? Ni - 2 : Ni - 1;
    for (int i = 0; i <= last_inner; ++i) put_equation(1, eq, i);
    // Outer: the kinematic equations give way at R*, the stress equations at the wall.
    const int first_outer = (eq < 2) ? 1 : 0;
    const int last_outer = (eq < 2) ? No - 1 : No - 2;
    for (int i = first_outer; i <= last_outer; ++i) put_equation(2, eq, i);
  }
  // Interface: u_r, u_t, T continuous; S_in - S_out = g.
  for (int comp = 0; comp < 4; ++comp) {
    A(row, col(1, comp, Ni - 1)) = 1.0;
    A(row, col(2, comp, 0)) = -1.0;
    if (comp == 2) b(row) = 1.0;
    ++row;
  }
  // No slip.
  A(row++, col(2, 0, No - 1)) = 1.0;
  A(row++, col(2, 1, No - 1)) = 1.0;
  sys.A = std::move(A);
  sys.b = std::move(b);
  return sys;
}

}  // namespace detail

inline StokesModeSolution solve_stokes_mode(const RadialMesh& mesh, int n, double mu_inner,
                                            double mu_outer, int l, double lambda, double g,
                                            const BvpOptions& opts = {}) {
  if (l < 1) throw Error(ErrorKind::UnsupportedMode, "Stokes mode 0 is handled analytically");
  if (lambda < 0.0) throw Error(ErrorKind::SingularProblem, "lambda must be >= 0");
  const auto sys = detail::assemble_stokes(mesh, n, mu_inner, mu_outer, l, lambda);
  const int Ni = sys.Ni, No = sys.No, pv = sys.pv, ps = sys.ps;
  const double c = angular_eigenvalue(n, l);
  const auto ri = mesh.inner().nodes();
  const auto ro = mesh.outer().nodes();
  auto col = [&](int phase, int comp, int k) { return sys.col(phase, comp, k); };

  StokesModeSolution out{RadialField(mesh, l, pv), RadialField(mesh, l, pv),
                         RadialField(mesh, l, ps), RadialField(mesh, l, ps),
                         RadialField(mesh, l, ps), mu_inner, mu_outer, 0.0, {}};
  const Eigen::VectorXd x =
      g * detail::dense_solve(sys.A, sys.b, opts, out.diagnostics, "Stokes mode");
  for (int k = 0; k < Ni; ++k) {
    out.u_r.inner[k] = x(col(1, 0, k));
    out.u_t.inner[k] = x(col(1, 1, k));
    out.normal_stress.inner[k] = x(col(1, 2, k));
    out.shear_stress.inner[k] = x(col(1, 3, k));
  }
  for (int k = 0; k < No; ++k) {
    out.u_r.outer[k] = x(col(2, 0, k));
    out.u_t.outer[k] = x(col(2, 1, k));
    out.normal_stress.outer[k] = x(col(2, 2, k));
    out.shear_stress.outer[k] = x(col(2, 3, k));
  }
  // Pressure from p = 2 mu u_r' - S, and the divergence residual, both with
  // the spectral derivative of u_r.
  const RadialField dU = out.u_r.derivative();
  double div_max = 0.0;
  for (int k = 0; k < Ni; ++k) {
    const double r = ri[k];
    out.p.inner[k] = 2.0 * mu_inner * dU.inner[k] - out.normal_stress.inner[k];
    div_max = std::max(div_max, std::abs(dU.inner[k] + (n - 1) * out.u_r.inner[k] / r -
                                         c * out.u_t.inner[k] / r));
  }
  for (int k = 0; k < No; ++k) {
    const double r = ro[k];
    out.p.outer[k] = 2.0 * mu_outer * dU.outer[k] - out.normal_stress.outer[k];
    div_max = std::max(div_max, std::abs(dU.outer[k] + (n - 1) * out.u_r.outer[k] / r -
                                         c * out.u_t.outer[k] / r));
  }
  out.divergence_residual = div_max;
  return out;
}

/// Per-mode energy forms (angular integrals carried out for a mean-square-one
/// harmonic, so the result is the value of the volume integral).

/// lambda int kappa f^2 + int d |grad (f Y)|^2.
inline double scalar_energy(const RadialField& f, int n, double kappa_inner, double kappa_outer,
                            double d_inner, double d_outer, double lambda) {
  const RadialField df = f.derivative();
  const double c = angular_eigenvalue(n, f.mode);
  return f.mesh.integrate(n, [&](double r, int phase) {
    const double v = f.at(r, phase);
    const double dv = df.at(r, phase);
    const double kappa = phase == 1 ? kappa_inner : kappa_outer;
    const double d = phase == 1 ? d_inner : d_outer;
    return lambda * kappa * v * v + d * (dv * dv + c * v * v / (r * r));
  });
}

/// lambda int |u|^2 + 2 int mu |D u|^2 for a poloidal mode.
inline double stokes_energy(const StokesModeSolution& s, int n, double lambda) {
  const RadialField dU = s.u_r.derivative();
  const RadialField dV = s.u_t.derivative();
  const double c = angular_eigenvalue(n, s.u_r.mode);
  return s.u_r.mesh.integrate(n, [&](double r, int phase) {
    const double U = s.u_r.at(r, phase), V = s.u_t.at(r, phase);
    const double Up = dU.at(r, phase), Vp = dV.at(r, phase);
    const double mu = phase == 1 ? s.mu_inner : s.mu_outer;
    const double shear = Vp + (U - V) / r;
    const double dd = Up * Up + 0.5 * c * shear * shear +
                      ((n - 1) * U * U - 2.0 * c * U * V + (c * c - (n - 2) * c) * V * V) / (r * r);
    return lambda * (U * U + c * V * V) + 2.0 * mu * dd;
  });
}

}  // namespace interphase
