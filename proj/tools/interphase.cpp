#include <string>
#include <vector>

#include "CLI11.hpp"

#include "interphase/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stability of spherical equilibria in a two-phase Stefan-Stokes model"};
  interphase::cli::Options opt;
  const std::vector<std::string> modes{"equilibrium", "classify", "dispersion-sweep", "evolve", "sweep", "validate"};
  app.add_option("mode", opt.mode, "equilibrium | classify | dispersion-sweep | evolve | sweep | validate")
      ->required()
      ->check(CLI::IsMember(modes));
  app.add_option("--config", opt.config, "run configuration file")->required();
  app.add_option("--out", opt.out, "output directory (default: the config's output key)");
  app.add_option("--threads", opt.threads, "worker threads for sweeps")->check(CLI::Range(1u, 256u));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : interphase::cli::kExitValidation;
  }
  return interphase::cli::run(opt);
}
