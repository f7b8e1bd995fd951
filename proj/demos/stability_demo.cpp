// Two equilibria of the same pair of phases, one on each side of s = 0:
// classification, the unstable eigenvalue and the growth rate seen by a
// mode-0 simulation.

#include <cstdio>

#include "interphase/interphase.hpp"

using namespace interphase;

int main() {
  const ThetaRange range{0.2, 3.0};
  // psi_1 = -theta log theta, psi_2 = 1 - 2 theta log theta
  const MaterialPair pair(PhaseModel::simple(0.0, 0.0, 1.0, range),
                          PhaseModel::simple(1.0, 0.0, 2.0, range), 0.5);

  for (double R_outer : {1.2, 2.0}) {
    Geometry g;
    g.n = 3;
    g.R_outer = R_outer;
    const auto eq = solve_equilibrium_radius(pair, g, 1.0);
    ClassifyOptions opts;
    opts.with_table = false;
    const auto rep = classify(eq, &pair, opts);

    std::printf("R_outer = %.2f  R* = %.4f  s = %+.6f  phi' = %+.6f\n", R_outer, eq.geometry.R_star,
                rep.s, rep.phi_prime.value_or(0.0));
    std::printf("  %s, %d positive eigenvalue(s), kernel dimension %d\n",
                std::string(classification_name(rep.classification)).c_str(), rep.positive_count,
                rep.kernel_dim);

    const RadialMesh mesh(kDefaultOrder, eq.geometry.R_star, eq.geometry.R_outer);
    const auto init = bump_initial(eq, mesh);
    const double T = rep.lambda0 ? 6.0 / *rep.lambda0 : 10.0;
    const auto tr = simulate_mode0(eq, init.theta_field, init.h, T, T / 600);
    const auto fit = fit_rate(eq, tr);
    if (rep.lambda0) {
      std::printf("  lambda0 = %.8f   fitted growth rate = %.8f\n", *rep.lambda0, fit.rate);
    } else {
      std::printf("  no unstable eigenvalue; fitted decay rate = %.6f\n", fit.rate);
    }
    std::printf("  Q drift %.2e, Gibbs-Thomson residual %.2e\n", tr.max_Q_drift, tr.max_constraint_residual);
  }
  return 0;
}
