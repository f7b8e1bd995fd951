#pragma once

// Run configuration: flat key = value text with optional [section] headers.
// A key k inside [sec] is stored as sec.k; '#' starts a comment.
//
//   sigma = 0.5
//   theta_range = [0.2, 3]
//   [phase1]
//   c = 1
//   poly = [0, 0, 0.1]
//   [geometry]
//   n = 3
//   R_outer = 2
//   theta_star = 1

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "interphase/equilibrium.hpp"
#include "interphase/materials.hpp"
#include "interphase/radial_bvp.hpp"

namespace interphase::config {

struct Diagnostic {
  std::string key;
  std::string message;
  int line = 0;
};

inline std::string to_string(const Diagnostic& d) {
  std::ostringstream os;
  os << d.key << ": " << d.message;
  if (d.line > 0) os << " (line " << d.line << ")";
  return os.str();
}

struct Entry {
  std::string raw;
  int line = 0;
  bool used = false;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::optional<double> parse_number(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

inline std::optional<std::vector<double>> parse_list(std::string_view s) {
  std::string t = trim(s);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') return std::nullopt;
  t = trim(std::string_view(t).substr(1, t.size() - 2));
  std::vector<double> out;
  if (t.empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto v = parse_number(item);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

}  // namespace detail

/// Raw key/value store. Syntax problems are collected, not thrown.
class Document {
 public:
  static Document parse(const std::string& text) {
    Document doc;
    std::istringstream in(text);
    std::string line, section;
    int no = 0;
    while (std::getline(in, line)) {
      ++no;
      if (auto p = line.find('#'); p != std::string::npos) line.erase(p);
      const std::string t = detail::trim(line);
      if (t.empty()) continue;
      if (t.front() == '[' && t.find('=') == std::string::npos) {
        if (t.back() != ']' || t.size() < 3) {
          doc.diagnostics.push_back({"<syntax>", "malformed section header '" + t + "'", no});
          continue;
        }
        section = detail::trim(std::string_view(t).substr(1, t.size() - 2));
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        doc.diagnostics.push_back({"<syntax>", "expected key = value, got '" + t + "'", no});
        continue;
      }
      std::string key = detail::trim(std::string_view(t).substr(0, eq));
      const std::string val = detail::trim(std::string_view(t).substr(eq + 1));
      if (key.empty()) {
        doc.diagnostics.push_back({"<syntax>", "empty key", no});
        continue;
      }
      if (!section.empty()) key = section + "." + key;
      if (doc.entries.count(key)) {
        doc.diagnostics.push_back({key, "duplicate key (first on line " +
                                            std::to_string(doc.entries[key].line) + ")", no});
        continue;
      }
      doc.entries[key] = Entry{val, no};
    }
    return doc;
  }

  static Document load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  bool has(const std::string& key) const { return entries.count(key) > 0; }

  std::optional<std::string> string(const std::string& key) {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    it->second.used = true;
    return it->second.raw;
  }

  std::optional<double> number(const std::string& key) {
    auto s = string(key);
    if (!s) return std::nullopt;
    auto v = detail::parse_number(*s);
    if (!v || !std::isfinite(*v)) {
      diagnostics.push_back({key, "expected a finite number, got '" + *s + "'", line(key)});
      return std::nullopt;
    }
    return v;
  }

  std::optional<int> integer(const std::string& key) {
    auto v = number(key);
    if (!v) return std::nullopt;
    if (*v != std::floor(*v) || std::abs(*v) > 1e9) {
      diagnostics.push_back({key, "expected an integer", line(key)});
      return std::nullopt;
    }
    return static_cast<int>(*v);
  }

  std::optional<std::vector<double>> list(const std::string& key) {
    auto s = string(key);
    if (!s) return std::nullopt;
    auto v = detail::parse_list(*s);
    if (!v) {
      diagnostics.push_back({key, "expected a list [x0, x1, ...], got '" + *s + "'", line(key)});
      return std::nullopt;
    }
    for (double x : *v) {
      if (!std::isfinite(x)) {
        diagnostics.push_back({key, "list entries must be finite", line(key)});
        return std::nullopt;
      }
    }
    return v;
  }

  int line(const std::string& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? 0 : it->second.line;
  }

  std::map<std::string, Entry> entries;
  std::vector<Diagnostic> diagnostics;
};

struct PhaseSpec {
  double a = 0.0, b = 0.0, c = 0.0;
  std::vector<double> poly;
  std::vector<double> mu{1.0};
  std::vector<double> d{1.0};
};

struct SweepSpec {
  std::string parameter = "sigma";  // sigma | theta_star | R_star | R_outer
  double from = 0.0, to = 0.0;
  int count = 0;

  std::vector<double> values() const {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = count == 1 ? from : from + (to - from) * i / (count - 1);
    return v;
  }
};

struct EvolutionSpec {
  std::optional<double> T_end;  // default: 6 / lambda0 when unstable, else 10
  std::optional<double> dt;     // default: T_end / 600
  std::string init = "bump";    // bump | eigen | custom-file
  std::string profile;          // file for custom-file
};

struct RunConfig {
  PhaseSpec phase1, phase2;
  double sigma = 0.0;
  ThetaRange range;
  int n = 3;
  int m = 1;
  double R_outer = 0.0;
  std::optional<double> R_star, theta_star, theta_guess;
  int order = kDefaultOrder;
  double max_condition = BvpOptions{}.max_condition;
  int l_max = 8;
  int per_decade = 4;
  EvolutionSpec evolution;
  std::optional<SweepSpec> sweep;
  std::string mode;
  std::string output = "out";
  std::filesystem::path base_dir;  // directory of the config file
};

struct LoadResult {
  RunConfig config;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

inline const std::vector<std::string>& modes() {
  static const std::vector<std::string> m{"equilibrium", "classify", "dispersion-sweep", "evolve", "sweep"};
  return m;
}

inline Polynomial to_poly(const std::vector<double>& c) { return Polynomial(c); }

inline PhaseModel make_phase(const PhaseSpec& p, ThetaRange range) {
  return PhaseModel(FreeEnergyCoeffs{p.a, p.b, p.c, p.poly}, to_poly(p.mu), to_poly(p.d), range);
}

inline MaterialPair make_pair(const RunConfig& c) {
  return MaterialPair(make_phase(c.phase1, c.range), make_phase(c.phase2, c.range), c.sigma);
}

inline Geometry make_geometry(const RunConfig& c) {
  Geometry g;
  g.n = c.n;
  g.m = c.m;
  g.R_outer = c.R_outer;
  g.concentric = (c.m == 1);
  g.R_star = c.R_star.value_or(0.5 * c.R_outer);
  return g;
}

inline EquilibriumState solve(const RunConfig& c, const MaterialPair& pair) {
  const Geometry g = make_geometry(c);
  if (c.R_star) return solve_equilibrium_temperature(pair, g, c.theta_guess);
  return solve_equilibrium_radius(pair, g, *c.theta_star);
}

namespace detail {

inline void read_phase(Document& doc, const std::string& name, PhaseSpec& p,
                       std::vector<Diagnostic>& diag) {
  if (auto v = doc.number(name + ".a")) p.a = *v;
  if (auto v = doc.number(name + ".b")) p.b = *v;
  if (auto v = doc.number(name + ".c")) {
    p.c = *v;
  } else if (!doc.has(name + ".c")) {
    diag.push_back({name + ".c", "required (heat-capacity coefficient)", 0});
  }
  if (auto v = doc.list(name + ".poly")) p.poly = *v;
  // mu and d accept a scalar or a coefficient list
  for (auto [key, dst] : {std::pair{".mu", &p.mu}, std::pair{".d", &p.d}}) {
    const std::string k = name + key;
    if (!doc.has(k)) continue;
    const std::string raw = detail::trim(doc.entries[k].raw);
    if (!raw.empty() && raw.front() == '[') {
      if (auto v = doc.list(k)) *dst = *v;
    } else if (auto v = doc.number(k)) {
      *dst = {*v};
    }
    if (dst->empty()) diag.push_back({k, "coefficient list must not be empty", doc.line(k)});
  }
}

// Positivity of kappa, mu, d on the sampling grid, reported per key.
inline void check_phase(const std::string& name, const PhaseSpec& p, ThetaRange r,
                        std::vector<Diagnostic>& diag) {
  const Polynomial tail(p.poly), mu(p.mu), d(p.d);
  const Polynomial t2 = tail.derivative().derivative();
  bool bad_k = false, bad_mu = false, bad_d = false;
  double at_k = 0, at_mu = 0, at_d = 0;
  for (int i = 0; i < kPositivitySamples; ++i) {
    const double th = r.min + (r.max - r.min) * i / (kPositivitySamples - 1);
    const double kappa = p.c - th * t2(th);
    if (!(kappa > 0.0) && !bad_k) bad_k = true, at_k = th;
    if (!(mu(th) > 0.0) && !bad_mu) bad_mu = true, at_mu = th;
    if (!(d(th) > 0.0) && !bad_d) bad_d = true, at_d = th;
  }
  auto where = [](double th) {
    std::ostringstream os;
    os << th;
    return os.str();
  };
  if (bad_k) {
    diag.push_back({name + ".c", "heat capacity kappa = c - theta p''(theta) must be > 0 on theta_range (fails at theta = " +
                                     where(at_k) + ")", 0});
  }
  if (bad_mu) diag.push_back({name + ".mu", "viscosity must be > 0 on theta_range (fails at theta = " + where(at_mu) + ")", 0});
  if (bad_d) diag.push_back({name + ".d", "conductivity must be > 0 on theta_range (fails at theta = " + where(at_d) + ")", 0});
}

}  // namespace detail

/// Schema and physics checks without solving. Every violation is listed.
inline LoadResult interpret(Document doc, const std::filesystem::path& base_dir = {}) {
  LoadResult out;
  auto& c = out.config;
  auto& diag = out.diagnostics;
  c.base_dir = base_dir;

  if (auto v = doc.number("sigma")) {
    c.sigma = *v;
    if (!(c.sigma > 0.0)) diag.push_back({"sigma", "surface tension must be > 0", doc.line("sigma")});
  } else if (!doc.has("sigma")) {
    diag.push_back({"sigma", "required", 0});
  }
  if (auto v = doc.list("theta_range")) {
    if (v->size() != 2) {
      diag.push_back({"theta_range", "expected [min, max]", doc.line("theta_range")});
    } else {
      c.range = {(*v)[0], (*v)[1]};
      if (!(c.range.min > 0.0 && c.range.max > c.range.min)) {
        diag.push_back({"theta_range", "must satisfy 0 < min < max", doc.line("theta_range")});
      }
    }
  } else if (!doc.has("theta_range")) {
    diag.push_back({"theta_range", "required", 0});
  }
  detail::read_phase(doc, "phase1", c.phase1, diag);
  detail::read_phase(doc, "phase2", c.phase2, diag);
  const bool range_ok = c.range.min > 0.0 && c.range.max > c.range.min;
  if (range_ok) {
    detail::check_phase("phase1", c.phase1, c.range, diag);
    detail::check_phase("phase2", c.phase2, c.range, diag);
  }

  if (auto v = doc.integer("geometry.n")) {
    c.n = *v;
    if (c.n != 2 && c.n != 3) diag.push_back({"geometry.n", "must be 2 or 3", doc.line("geometry.n")});
  }
  if (auto v = doc.integer("geometry.m")) {
    c.m = *v;
    if (c.m < 1) diag.push_back({"geometry.m", "must be >= 1", doc.line("geometry.m")});
  }
  if (auto v = doc.number("geometry.R_outer")) {
    c.R_outer = *v;
    if (!(c.R_outer > 0.0)) diag.push_back({"geometry.R_outer", "must be > 0", doc.line("geometry.R_outer")});
  } else if (!doc.has("geometry.R_outer")) {
    diag.push_back({"geometry.R_outer", "required", 0});
  }
  c.R_star = doc.number("geometry.R_star");
  c.theta_star = doc.number("geometry.theta_star");
  c.theta_guess = doc.number("geometry.theta_guess");
  const bool has_r = doc.has("geometry.R_star"), has_t = doc.has("geometry.theta_star");
  if (has_r && has_t) {
    diag.push_back({"geometry.R_star, geometry.theta_star",
                    "exactly one of R_star / theta_star may be given, not both", doc.line("geometry.theta_star")});
  } else if (!has_r && !has_t) {
    diag.push_back({"geometry.R_star, geometry.theta_star", "exactly one of R_star / theta_star is required", 0});
  }
  if (c.R_star) {
    if (!(*c.R_star > 0.0)) {
      diag.push_back({"geometry.R_star", "must be > 0", doc.line("geometry.R_star")});
    } else if (c.R_outer > 0.0 && !(*c.R_star < c.R_outer)) {
      diag.push_back({"geometry.R_star, geometry.R_outer", "R_star must be < R_outer", doc.line("geometry.R_star")});
    } else if (c.m > 1 && (c.n == 2 || c.n == 3) &&
               !(c.m * std::pow(*c.R_star, c.n) < std::pow(c.R_outer, c.n))) {
      diag.push_back({"geometry.m, geometry.R_star", "m balls of radius R_star do not fit in Omega", 0});
    }
  }
  if (c.theta_star && range_ok && !c.range.contains(*c.theta_star)) {
    diag.push_back({"geometry.theta_star", "must lie in theta_range", doc.line("geometry.theta_star")});
  }

  if (auto v = doc.integer("solver.order")) {
    c.order = *v;
    if (c.order < 4 || c.order > 256) diag.push_back({"solver.order", "must be in [4, 256]", doc.line("solver.order")});
  }
  if (auto v = doc.number("solver.max_condition")) {
    c.max_condition = *v;
    if (!(*v > 1.0)) diag.push_back({"solver.max_condition", "must be > 1", doc.line("solver.max_condition")});
  }
  if (auto v = doc.integer("solver.l_max")) {
    c.l_max = *v;
    if (c.l_max < 0 || c.l_max > 64) diag.push_back({"solver.l_max", "must be in [0, 64]", doc.line("solver.l_max")});
  }
  if (auto v = doc.integer("solver.per_decade")) {
    c.per_decade = *v;
    if (c.per_decade < 1 || c.per_decade > 100) {
      diag.push_back({"solver.per_decade", "must be in [1, 100]", doc.line("solver.per_decade")});
    }
  }

  c.evolution.T_end = doc.number("evolution.T_end");
  if (c.evolution.T_end && !(*c.evolution.T_end > 0.0)) {
    diag.push_back({"evolution.T_end", "must be > 0", doc.line("evolution.T_end")});
  }
  c.evolution.dt = doc.number("evolution.dt");
  if (c.evolution.dt) {
    if (!(*c.evolution.dt > 0.0)) {
      diag.push_back({"evolution.dt", "must be > 0", doc.line("evolution.dt")});
    } else if (c.evolution.T_end && *c.evolution.dt > *c.evolution.T_end) {
      diag.push_back({"evolution.dt, evolution.T_end", "dt must not exceed T_end", doc.line("evolution.dt")});
    }
  }
  if (auto v = doc.string("evolution.init")) {
    c.evolution.init = *v;
    if (*v != "bump" && *v != "eigen" && *v != "custom-file") {
      diag.push_back({"evolution.init", "must be bump, eigen or custom-file", doc.line("evolution.init")});
    }
  }
  if (auto v = doc.string("evolution.profile")) c.evolution.profile = *v;
  if (c.evolution.init == "custom-file") {
    if (c.evolution.profile.empty()) {
      diag.push_back({"evolution.profile", "required when evolution.init = custom-file", 0});
    } else {
      std::filesystem::path p(c.evolution.profile);
      if (p.is_relative()) p = base_dir / p;
      c.evolution.profile = p.string();
      if (!std::filesystem::exists(p)) {
        diag.push_back({"evolution.profile", "file not found: " + p.string(), doc.line("evolution.profile")});
      }
    }
  }

  const bool any_sweep = doc.has("sweep.parameter") || doc.has("sweep.from") || doc.has("sweep.to") ||
                         doc.has("sweep.count");
  if (any_sweep) {
    SweepSpec s;
    if (auto v = doc.string("sweep.parameter")) s.parameter = *v;
    if (s.parameter != "sigma" && s.parameter != "theta_star" && s.parameter != "R_star" &&
        s.parameter != "R_outer") {
      diag.push_back({"sweep.parameter", "must be sigma, theta_star, R_star or R_outer", doc.line("sweep.parameter")});
    }
    const auto from = doc.number("sweep.from"), to = doc.number("sweep.to");
    const auto count = doc.integer("sweep.count");
    if (!doc.has("sweep.from")) diag.push_back({"sweep.from", "required", 0});
    if (!doc.has("sweep.to")) diag.push_back({"sweep.to", "required", 0});
    if (!doc.has("sweep.count")) diag.push_back({"sweep.count", "required", 0});
    if (from) s.from = *from;
    if (to) s.to = *to;
    if (count) {
      s.count = *count;
      if (s.count < 1) diag.push_back({"sweep.count", "must be >= 1", doc.line("sweep.count")});
      if (s.count > 1 && from && to && !(*to != *from)) {
        diag.push_back({"sweep.from, sweep.to", "range is empty", doc.line("sweep.to")});
      }
    }
    c.sweep = s;
  }

  if (auto v = doc.string("mode")) {
    c.mode = *v;
    if (std::find(modes().begin(), modes().end(), *v) == modes().end()) {
      diag.push_back({"mode", "unknown mode '" + *v + "'", doc.line("mode")});
    }
  }
  if (auto v = doc.string("output")) c.output = *v;

  for (const auto& [key, e] : doc.entries) {
    if (!e.used) diag.push_back({key, "unknown key", e.line});
  }
  diag.insert(diag.begin(), doc.diagnostics.begin(), doc.diagnostics.end());
  return out;
}

inline LoadResult load(const std::string& path) {
  const auto dir = std::filesystem::absolute(path).parent_path();
  return interpret(Document::load(path), dir);
}

}  // namespace interphase::config
