#pragma once

// Chebyshev-Gauss-Lobatto machinery for the radial solvers.
//
// Two kinds of subdomain are used:
//  * IntervalGrid: plain CGL grid on [a, b] (the outer shell).
//  * ParityGrid:   CGL grid of odd degree M = 2N+1 on [-R, R] restricted to
//                  the N+1 positive nodes, for functions of known parity
//                  f(-r) = p f(r). The origin is never a node, and regularity
//                  at r = 0 is carried by the parity of the basis.
// Both expose increasing nodes, first/second differentiation matrices and
// barycentric interpolation of the underlying polynomial.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace interphase::cheb {

/// x_j = cos(pi j / M), j = 0..M (decreasing).
inline std::vector<double> lobatto_points(int M) {
  std::vector<double> x(M + 1);
  for (int j = 0; j <= M; ++j) {
    // sin form keeps the points exactly antisymmetric.
    x[j] = std::sin(std::numbers::pi * (M - 2.0 * j) / (2.0 * M));
  }
  return x;
}

/// Differentiation matrix on lobatto_points(M) (Trefethen, Spectral Methods
/// in MATLAB, cheb.m), with the negative-sum trick on the diagonal.
inline Eigen::MatrixXd lobatto_diff(int M) {
  const auto x = lobatto_points(M);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(M + 1, M + 1);
  auto c = [M](int j) { return ((j == 0 || j == M) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0); };
  for (int i = 0; i <= M; ++i) {
    for (int j = 0; j <= M; ++j) {
      if (i != j) D(i, j) = c(i) / c(j) / (x[i] - x[j]);
    }
  }
  for (int i = 0; i <= M; ++i) D(i, i) = -D.row(i).sum();
  return D;
}

inline std::vector<double> lobatto_bary_weights(int M) {
  std::vector<double> w(M + 1);
  for (int j = 0; j <= M; ++j) {
    w[j] = (j % 2) ? -1.0 : 1.0;
    if (j == 0 || j == M) w[j] *= 0.5;
  }
  return w;
}

/// Barycentric evaluation of the polynomial through (x_j, f_j).
inline double bary_eval(std::span<const double> x, std::span<const double> w,
                        std::span<const double> f, double t) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = t - x[j];
    if (diff == 0.0) return f[j];
    const double q = w[j] / diff;
    num += q * f[j];
    den += q;
  }
  return num / den;
}

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;
};

/// K-point Gauss-Legendre rule by Newton iteration on P_K.
inline GaussRule gauss_legendre(int K) {
  GaussRule g;
  g.nodes.resize(K);
  g.weights.resize(K);
  for (int i = 0; i < K; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (K + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= K; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (K == 1) p0 = 1.0;
      dp = K * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= K; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (K == 1) p0 = 1.0;
    dp = K * (x * p1 - p0) / (x * x - 1.0);
    g.nodes[K - 1 - i] = x;
    g.weights[K - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

/// Plain CGL grid on [a, b], nodes increasing from a to b.
class IntervalGrid {
 public:
  IntervalGrid(double a, double b, int order) : a_(a), b_(b), order_(order) {
    const auto x = lobatto_points(order);
    const Eigen::MatrixXd Dx = lobatto_diff(order);
    const double half = 0.5 * (b - a);
    // r = (a+b)/2 - half * x_j  reversed into increasing order: r_k uses x_{M-k}.
    const int M = order;
    nodes_.resize(M + 1);
    xs_.resize(M + 1);
    for (int k = 0; k <= M; ++k) {
      xs_[k] = x[M - k];
      nodes_[k] = 0.5 * (a + b) + half * xs_[k];
    }
    nodes_.front() = a;
    nodes_.back() = b;
    D1_.resize(M + 1, M + 1);
    for (int i = 0; i <= M; ++i)
      for (int j = 0; j <= M; ++j) D1_(i, j) = Dx(M - i, M - j) / half;
    D2_ = D1_ * D1_;
    const auto w = lobatto_bary_weights(M);
    weights_.resize(M + 1);
    for (int k = 0; k <= M; ++k) weights_[k] = w[M - k];
  }

  int order() const { return order_; }
  int size() const { return order_ + 1; }
  double a() const { return a_; }
  double b() const { return b_; }
  std::span<const double> nodes() const { return nodes_; }
  const Eigen::MatrixXd& D1() const { return D1_; }
  const Eigen::MatrixXd& D2() const { return D2_; }

  double interpolate(std::span<const double> values, double r) const {
    const double x = (2.0 * r - a_ - b_) / (b_ - a_);
    return bary_eval(xs_, weights_, values, x);
  }

 private:
  double a_, b_;
  int order_;
  std::vector<double> nodes_;
  std::vector<double> xs_;
  std::vector<double> weights_;
  Eigen::MatrixXd D1_, D2_;
};

/// Parity-reduced CGL grid on [0, R]: N+1 positive nodes of the degree 2N+1
/// grid on [-R, R], nodes increasing and ending at R.
class ParityGrid {
 public:
  ParityGrid(double R, int half_order) : R_(R), N_(half_order), M_(2 * half_order + 1) {
    full_x_ = lobatto_points(M_);
    full_w_ = lobatto_bary_weights(M_);
    full_D1_ = lobatto_diff(M_) / R;
    full_D2_ = full_D1_ * full_D1_;
    nodes_.resize(N_ + 1);
    for (int k = 0; k <= N_; ++k) nodes_[k] = R * full_x_[N_ - k];
    nodes_.back() = R;
  }

  int size() const { return N_ + 1; }
  int full_degree() const { return M_; }
  double R() const { return R_; }
  std::span<const double> nodes() const { return nodes_; }

  /// Reduced first derivative acting on functions of parity p (+1 or -1).
  Eigen::MatrixXd D1(int parity) const { return reduce(full_D1_, parity); }
  Eigen::MatrixXd D2(int parity) const { return reduce(full_D2_, parity); }

  double interpolate(std::span<const double> values, int parity, double r) const {
    std::vector<double> full(M_ + 1);
    for (int j = 0; j <= M_; ++j) {
      if (j <= N_) {
        full[j] = values[N_ - j];
      } else {
        full[j] = parity * values[N_ - (M_ - j)];
      }
    }
    return bary_eval(full_x_, full_w_, full, r / R_);
  }

 private:
  // Full index j (decreasing x) -> reduced index N - j for j <= N; the mirror
  // of j is M - j.
  Eigen::MatrixXd reduce(const Eigen::MatrixXd& full, int parity) const {
    Eigen::MatrixXd out(N_ + 1, N_ + 1);
    for (int i = 0; i <= N_; ++i) {
      const int fi = N_ - i;
      for (int j = 0; j <= N_; ++j) {
        const int fj = N_ - j;
        out(i, j) = full(fi, fj) + parity * full(fi, M_ - fj);
      }
    }
    return out;
  }

  double R_;
  int N_, M_;
  std::vector<double> full_x_, full_w_;
  Eigen::MatrixXd full_D1_, full_D2_;
  std::vector<double> nodes_;
};

}  // namespace interphase::cheb
