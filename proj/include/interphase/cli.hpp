#pragma once

// Pipelines behind the command-line tool. Each run writes report.txt, a
// summary.json machine block and the CSV tables of its mode. The report is
// rendered from the same ordered summary, so every number it shows is in
// the JSON as well.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "interphase/config.hpp"
#include "interphase/csv.hpp"
#include "interphase/evolution.hpp"
#include "interphase/ntd.hpp"
#include "interphase/parallel.hpp"
#include "interphase/spectrum.hpp"

namespace interphase::cli {

using json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSolver = 3;

struct Options {
  std::string mode;
  std::string config;
  std::string out;  // overrides the config's output key when set
  unsigned threads = 1;
};

namespace detail {

inline json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline json num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

inline json num_list(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

inline std::string render_value(const json& v) {
  if (v.is_null()) return "none";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return csv::format_double(v.get<double>());
  if (v.is_array()) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + render_value(v[i]);
    return s + "]";
  }
  return v.dump();
}

}  // namespace detail

/// Human report: one "key: value" line per summary entry, sections as headers.
inline std::string render_report(const json& summary) {
  std::ostringstream os;
  for (const auto& [section, body] : summary.items()) {
    if (!body.is_object()) {
      os << section << ": " << detail::render_value(body) << '\n';
      continue;
    }
    os << '\n' << "[" << section << "]\n";
    for (const auto& [k, v] : body.items()) os << k << ": " << detail::render_value(v) << '\n';
  }
  return os.str();
}

inline json equilibrium_block(const EquilibriumState& eq, const MaterialPair& pair) {
  json b;
  b["theta_star"] = eq.theta_star;
  b["R_star"] = eq.geometry.R_star;
  b["R_outer"] = eq.geometry.R_outer;
  b["n"] = eq.geometry.n;
  b["m"] = eq.geometry.m;
  b["sigma"] = eq.sigma;
  b["pressure_jump"] = eq.pressure_jump;
  b["l_star"] = eq.l_star;
  b["c_star"] = eq.c_star;
  b["kappa_star_1"] = eq.kappa_star_1;
  b["kappa_star_2"] = eq.kappa_star_2;
  b["d_star_1"] = eq.d_star_1;
  b["d_star_2"] = eq.d_star_2;
  b["mu_star_1"] = eq.mu_star_1;
  b["mu_star_2"] = eq.mu_star_2;
  b["kappa_mass"] = eq.kappa_mass;
  b["interface_area"] = eq.interface_area();
  b["a0"] = eq.a0();
  b["energy"] = equilibrium_energy(eq, pair);
  json w = json::array();
  for (const auto& s : eq.warnings) w.push_back(s);
  b["warnings"] = w;
  return b;
}

inline std::string s_condition(const StabilityReport& r, const EquilibriumState& eq) {
  const double tol = stability_tolerance(eq);
  return r.s < -tol ? "s < 0" : r.s > tol ? "s > 0" : "s = 0";
}

inline json stability_block(const StabilityReport& r, const EquilibriumState& eq) {
  json b;
  b["s"] = r.s;
  b["condition"] = s_condition(r, eq);
  b["curvature_term"] = r.curvature_term;
  b["latent_term"] = r.latent_term;
  b["phi_prime"] = detail::num(r.phi_prime);
  b["phi_prime_error"] = detail::num(r.phi_prime_error);
  b["classification"] = std::string(classification_name(r.classification));
  b["lambda0"] = detail::num(r.lambda0);
  b["roots"] = detail::num_list(r.all_roots);
  b["positive_count"] = r.positive_count;
  b["kernel_dim"] = r.kernel_dim;
  b["b0_eigenvalues"] = detail::num_list(r.b0_eigenvalues);
  return b;
}

inline NtDOptions ntd_options(const config::RunConfig& c) {
  NtDOptions o;
  o.order = c.order;
  o.bvp.max_condition = c.max_condition;
  return o;
}

inline ClassifyOptions classify_options(const config::RunConfig& c, unsigned threads, bool table) {
  ClassifyOptions o;
  o.ntd = ntd_options(c);
  o.l_max = c.l_max;
  o.lambdas = default_lambda_grid(c.per_decade);
  o.threads = threads;
  o.with_table = table;
  return o;
}

struct Artifacts {
  json summary;
  std::vector<std::pair<std::string, csv::Table>> tables;
};

inline Artifacts run_equilibrium(const config::RunConfig& c) {
  const auto pair = config::make_pair(c);
  const auto eq = config::solve(c, pair);
  Artifacts a;
  a.summary["mode"] = "equilibrium";
  a.summary["equilibrium"] = equilibrium_block(eq, pair);
  const auto sn = stability_number(eq);
  json st;
  st["s"] = sn.s;
  st["curvature_term"] = sn.curvature_term;
  st["latent_term"] = sn.latent_term;
  try {
    const auto d = equilibrium_energy_derivative(eq, pair);
    st["phi_prime"] = d.value;
    st["phi_prime_error"] = d.error_estimate;
  } catch (const Error& e) {
    st["phi_prime"] = nullptr;
    st["phi_prime_note"] = std::string(e.what());
  }
  a.summary["stability_number"] = st;
  return a;
}

inline Artifacts run_classify(const config::RunConfig& c, unsigned threads) {
  const auto pair = config::make_pair(c);
  const auto eq = config::solve(c, pair);
  const auto rep = classify(eq, &pair, classify_options(c, threads, true));
  Artifacts a;
  a.summary["mode"] = "classify";
  a.summary["equilibrium"] = equilibrium_block(eq, pair);
  a.summary["stability"] = stability_block(rep, eq);
  if (!rep.dispersion.empty()) a.tables.emplace_back("dispersion.csv", dispersion_csv(rep.dispersion));
  return a;
}

inline Artifacts run_dispersion_sweep(const config::RunConfig& c, unsigned threads) {
  const auto pair = config::make_pair(c);
  const auto eq = config::solve(c, pair);
  const NtDOperator op(eq, ntd_options(c));
  const auto lambdas = default_lambda_grid(c.per_decade);
  std::vector<int> modes;
  for (int l = 0; l <= c.l_max; ++l) modes.push_back(l);
  const auto samples = ntd_sweep(eq, modes, lambdas, threads, ntd_options(c));
  const auto rows = dispersion_table(op, c.l_max, lambdas, threads);
  const auto zero = heat_zero_limit(eq, ntd_options(c));

  Artifacts a;
  a.summary["mode"] = "dispersion-sweep";
  a.summary["equilibrium"] = equilibrium_block(eq, pair);
  json b;
  b["l_max"] = c.l_max;
  b["lambda_count"] = static_cast<int>(lambdas.size());
  b["lambda_min_positive"] = lambdas.size() > 1 ? lambdas[1] : 0.0;
  b["lambda_max"] = lambdas.back();
  b["s"] = stability_number(eq).s;
  b["b0_zero_limit"] = dispersion(op, 0, 0.0).b_l;
  b["a0_closed_form"] = zero.closed_form;
  b["a0_extrapolated"] = zero.extrapolated;
  b["a0_rel_discrepancy"] = zero.rel_discrepancy;
  a.summary["dispersion"] = b;
  a.tables.emplace_back("ntd.csv", ntd_table(samples));
  a.tables.emplace_back("dispersion.csv", dispersion_csv(rows));
  return a;
}

inline Artifacts run_evolve(const config::RunConfig& c) {
  const auto pair = config::make_pair(c);
  const auto eq = config::solve(c, pair);
  if (!eq.geometry.pde_ready()) {
    throw Error(ErrorKind::UnsupportedGeometry, "evolution needs a single concentric sphere (m = 1)");
  }
  const auto root = find_unstable_eigenvalue(eq, ntd_options(c));
  const RadialMesh mesh(c.order, eq.geometry.R_star, eq.geometry.R_outer);
  const Mode0State init = [&] {
    if (c.evolution.init == "eigen") {
      if (!root.lambda0) throw Error(ErrorKind::Degenerate, "evolution.init = eigen needs an unstable eigenvalue");
      return eigen_initial(eq, mesh, *root.lambda0);
    }
    if (c.evolution.init == "custom-file") return custom_initial(eq, mesh, c.evolution.profile);
    return bump_initial(eq, mesh);
  }();
  const double T = c.evolution.T_end.value_or(root.lambda0 ? 6.0 / *root.lambda0 : 10.0);
  const double dt = c.evolution.dt.value_or(T / 600.0);
  EvolutionOptions eo;
  eo.order = c.order;
  const auto tr = simulate_mode0(eq, init.theta_field, init.h, T, dt, eo);
  const auto fit = fit_rate(eq, tr);

  Artifacts a;
  a.summary["mode"] = "evolve";
  a.summary["equilibrium"] = equilibrium_block(eq, pair);
  json b;
  b["init"] = c.evolution.init;
  b["T_end"] = T;
  b["dt"] = dt;
  b["steps"] = static_cast<long long>(std::llround(T / dt));
  b["projected_initial"] = tr.projected_initial;
  b["lambda0"] = detail::num(root.lambda0);
  b["fitted_rate"] = fit.rate;
  b["rate_rel_error"] = root.lambda0 ? detail::num(std::abs(fit.rate - *root.lambda0) / *root.lambda0)
                                     : json(nullptr);
  b["h_inf"] = fit.h_inf;
  b["fit_rms_residual"] = fit.rms_residual;
  b["fit_samples"] = fit.used;
  b["Q0"] = tr.samples.front().Q;
  b["max_Q_drift"] = tr.max_Q_drift;
  b["max_Q_drift_running"] = tr.max_Q_drift_running;
  b["max_constraint_residual"] = tr.max_constraint_residual;
  b["richardson_error"] = tr.richardson_error;
  a.summary["evolution"] = b;
  a.tables.emplace_back("trajectory.csv", trajectory_csv(tr));
  return a;
}

struct SweepRow {
  double value = 0.0;
  double s = std::numeric_limits<double>::quiet_NaN();
  double phi_prime = std::numeric_limits<double>::quiet_NaN();
  std::string classification;
  double lambda0 = std::numeric_limits<double>::quiet_NaN();
};

inline config::RunConfig with_parameter(config::RunConfig c, const std::string& p, double v) {
  if (p == "sigma") c.sigma = v;
  if (p == "R_outer") c.R_outer = v;
  if (p == "theta_star") c.theta_star = v, c.R_star.reset();
  if (p == "R_star") c.R_star = v, c.theta_star.reset();
  return c;
}

inline Artifacts run_sweep(const config::RunConfig& c, unsigned threads) {
  if (!c.sweep) throw Error(ErrorKind::ConfigError, "mode sweep needs a [sweep] block");
  const auto& sw = *c.sweep;
  const auto values = sw.values();
  std::vector<SweepRow> rows(values.size());
  parallel_for(values.size(), threads, [&](std::size_t i) {
    SweepRow r;
    r.value = values[i];
    try {
      const auto ci = with_parameter(c, sw.parameter, values[i]);
      const auto pair = config::make_pair(ci);
      const auto eq = config::solve(ci, pair);
      const auto rep = classify(eq, &pair, classify_options(ci, 1, false));
      r.s = rep.s;
      if (rep.phi_prime) r.phi_prime = *rep.phi_prime;
      r.classification = classification_name(rep.classification);
      if (rep.lambda0) r.lambda0 = *rep.lambda0;
    } catch (const Error& e) {
      r.classification = "error:" + std::string(error_name(e.kind()));
    }
    rows[i] = r;
  });

  csv::Table t({sw.parameter, "s", "phi_prime", "classification", "lambda0"});
  int failed = 0, stable = 0, unstable = 0;
  for (const auto& r : rows) {
    t.row().add(r.value).add(r.s).add(r.phi_prime).add(r.classification).add(r.lambda0);
    if (r.classification.rfind("error:", 0) == 0) ++failed;
    if (r.classification == "normally_stable") ++stable;
    if (r.classification == "normally_hyperbolic_unstable") ++unstable;
  }
  Artifacts a;
  a.summary["mode"] = "sweep";
  json b;
  b["parameter"] = sw.parameter;
  b["from"] = sw.from;
  b["to"] = sw.to;
  b["count"] = sw.count;
  b["normally_stable"] = stable;
  b["normally_hyperbolic_unstable"] = unstable;
  b["failed"] = failed;
  a.summary["sweep"] = b;
  a.tables.emplace_back("sweep.csv", std::move(t));
  return a;
}

inline void write_artifacts(const Artifacts& a, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::ConfigError, "cannot create output directory " + dir.string());
  {
    std::ofstream f(dir / "report.txt");
    if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + (dir / "report.txt").string());
    f << render_report(a.summary);
  }
  {
    std::ofstream f(dir / "summary.json");
    if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + (dir / "summary.json").string());
    f << a.summary.dump(2) << '\n';
  }
  for (const auto& [name, table] : a.tables) table.write((dir / name).string());
}

/// Entry point shared by the executable and the tests.
inline int run(const Options& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  config::LoadResult loaded;
  try {
    loaded = config::load(opt.config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  if (opt.mode == "validate") {
    for (const auto& d : loaded.diagnostics) out << config::to_string(d) << '\n';
    if (loaded.ok()) out << "ok\n";
    return loaded.ok() ? kExitOk : kExitValidation;
  }
  if (!loaded.ok()) {
    for (const auto& d : loaded.diagnostics) err << "config error: " << config::to_string(d) << '\n';
    return kExitValidation;
  }
  const auto& c = loaded.config;
  const std::string mode = opt.mode.empty() ? c.mode : opt.mode;
  const unsigned threads = std::max(1u, opt.threads);
  std::filesystem::path dir = opt.out;
  if (dir.empty()) {
    dir = c.output;
    if (dir.is_relative()) dir = c.base_dir / dir;
  }
  try {
    Artifacts a;
    if (mode == "equilibrium") {
      a = run_equilibrium(c);
    } else if (mode == "classify") {
      a = run_classify(c, threads);
    } else if (mode == "dispersion-sweep") {
      a = run_dispersion_sweep(c, threads);
    } else if (mode == "evolve") {
      a = run_evolve(c);
    } else if (mode == "sweep") {
      a = run_sweep(c, threads);
    } else {
      err << "error: unknown or missing mode '" << mode << "'\n";
      return kExitValidation;
    }
    write_artifacts(a, dir);
    out << render_report(a.summary);
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? kExitValidation : kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace interphase::cli
