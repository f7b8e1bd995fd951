#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "interphase/cli.hpp"

using namespace interphase;
namespace fs = std::filesystem;

namespace {

const char* kReference = R"(# psi_1 = -theta log theta, psi_2 = 1 - 2 theta log theta
sigma = 0.5
theta_range = [0.2, 3]

[phase1]
c = 1

[phase2]
a = 1
c = 2

[geometry]
n = 3
R_outer = 1.2
theta_star = 1

[solver]
order = 24
l_max = 2
per_decade = 1
)";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("interphase_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& file, const std::string& text) const {
    std::ofstream(path / file) << text;
    return path / file;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

config::LoadResult parse(const std::string& text) { return config::interpret(config::Document::parse(text)); }

bool names_key(const config::LoadResult& r, const std::string& key) {
  for (const auto& d : r.diagnostics) {
    if (d.key.find(key) != std::string::npos) return true;
  }
  return false;
}

int run(const std::string& mode, const fs::path& cfg, const fs::path& out, std::string* err_text = nullptr,
        unsigned threads = 1) {
  std::ostringstream o, e;
  const int code = cli::run({mode, cfg.string(), out.string(), threads}, o, e);
  if (err_text) *err_text = e.str();
  return code;
}

}  // namespace

TEST(Config, ParsesSectionsAndLists) {
  const auto r = parse(kReference);
  ASSERT_TRUE(r.ok()) << config::to_string(r.diagnostics.front());
  EXPECT_EQ(r.config.sigma, 0.5);
  EXPECT_EQ(r.config.range.min, 0.2);
  EXPECT_EQ(r.config.range.max, 3.0);
  EXPECT_EQ(r.config.phase2.a, 1.0);
  EXPECT_EQ(r.config.phase2.c, 2.0);
  EXPECT_EQ(r.config.R_outer, 1.2);
  ASSERT_TRUE(r.config.theta_star.has_value());
  EXPECT_FALSE(r.config.R_star.has_value());
  EXPECT_EQ(r.config.order, 24);
  EXPECT_EQ(r.config.phase1.mu, std::vector<double>{1.0});
}

TEST(Config, ScalarAndListCoefficients) {
  const auto r = parse(std::string(kReference) + "[phase1]\nmu = 2.5\nd = [1, 0.5]\npoly = [0, 0, -0.01]\n");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.config.phase1.mu, std::vector<double>{2.5});
  EXPECT_EQ(r.config.phase1.d, (std::vector<double>{1.0, 0.5}));
  EXPECT_EQ(r.config.phase1.poly.size(), 3u);
}

TEST(Config, ValidFileHasNoDiagnostics) { EXPECT_TRUE(parse(kReference).diagnostics.empty()); }

TEST(Config, NonPositiveHeatCapacityNamesKey) {
  std::string t = kReference;
  t.replace(t.find("[phase1]\nc = 1"), 14, "[phase1]\nc = 0");
  const auto r = parse(t);
  EXPECT_TRUE(names_key(r, "phase1.c"));
  EXPECT_FALSE(names_key(r, "phase2.c"));
}

TEST(Config, RadiusBeyondDomainNamesGeometryKeys) {
  std::string t = kReference;
  t.replace(t.find("theta_star = 1"), 14, "R_star = 1.5");
  const auto r = parse(t);
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_NE(r.diagnostics[0].key.find("geometry.R_star"), std::string::npos);
  EXPECT_NE(r.diagnostics[0].key.find("geometry.R_outer"), std::string::npos);
}

TEST(Config, ExactlyOneOfRadiusAndTemperature) {
  const auto both = parse(std::string(kReference) + "[geometry]\nR_star = 0.5\n");
  EXPECT_TRUE(names_key(both, "geometry.R_star"));
  EXPECT_TRUE(names_key(both, "geometry.theta_star"));
  std::string none = kReference;
  none.erase(none.find("theta_star = 1"), 14);
  EXPECT_TRUE(names_key(parse(none), "geometry.theta_star"));
}

TEST(Config, ListsEveryViolation) {
  const auto r = parse(
      "sigma = -1\ntheta_range = [3, 1]\nphase1.c = x\n[geometry]\nn = 4\nR_outer = 2\n"
      "theta_star = 1\nm = 0\nfoo = 1\n[sweep]\ncount = 0\n");
  for (const char* key : {"sigma", "theta_range", "phase1.c", "phase2.c", "geometry.n", "geometry.m",
                          "geometry.foo", "sweep.count", "sweep.from", "sweep.to"}) {
    EXPECT_TRUE(names_key(r, key)) << key;
  }
}

TEST(Config, SyntaxErrorsCarryLines) {
  const auto r = parse("sigma = 0.5\njust words\nsigma = 0.6\n");
  ASSERT_GE(r.diagnostics.size(), 2u);
  EXPECT_EQ(r.diagnostics[0].line, 2);
  EXPECT_EQ(r.diagnostics[1].key, "sigma");
  EXPECT_EQ(r.diagnostics[1].line, 3);
}

TEST(Config, SweepValues) {
  config::SweepSpec s{"sigma", 0.1, 0.5, 5};
  const auto v = s.values();
  ASSERT_EQ(v.size(), 5u);
  EXPECT_DOUBLE_EQ(v[2], 0.3);
  EXPECT_EQ(v.back(), 0.5);
  EXPECT_EQ((config::SweepSpec{"sigma", 0.2, 0.9, 1}).values(), std::vector<double>{0.2});
}

TEST(Cli, ClassifyStableReference) {
  TempDir dir("classify");
  const auto cfg = dir.write("run.cfg", kReference);
  ASSERT_EQ(run("classify", cfg, dir.path / "out"), cli::kExitOk);
  const std::string report = slurp(dir.path / "out" / "report.txt");
  EXPECT_NE(report.find("classification: normally_stable"), std::string::npos);
  EXPECT_NE(report.find("condition: s < 0"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir.path / "out" / "summary.json"));
  const std::string table = slurp(dir.path / "out" / "dispersion.csv");
  EXPECT_EQ(table.substr(0, table.find('\n')), "l,lambda,a_l,t_l,b_l");
}

TEST(Cli, ReportIsProjectionOfSummary) {
  TempDir dir("projection");
  const auto cfg = dir.write("run.cfg", kReference);
  ASSERT_EQ(run("classify", cfg, dir.path / "out"), cli::kExitOk);
  const std::string report = slurp(dir.path / "out" / "report.txt");
  const auto summary = cli::json::parse(slurp(dir.path / "out" / "summary.json"));
  std::vector<double> numbers;
  std::function<void(const cli::json&)> collect = [&](const cli::json& j) {
    if (j.is_number()) numbers.push_back(j.get<double>());
    if (j.is_structured()) {
      for (const auto& x : j) collect(x);
    }
  };
  collect(summary);
  const std::regex num(R"([-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?)");
  int checked = 0;
  std::istringstream lines(report);
  std::string line;
  while (std::getline(lines, line)) {
    const auto colon = line.find(": ");
    if (colon == std::string::npos) continue;
    const std::string value = line.substr(colon + 2);
    for (auto it = std::sregex_iterator(value.begin(), value.end(), num); it != std::sregex_iterator(); ++it) {
      const double v = std::stod(it->str());
      EXPECT_NE(std::find(numbers.begin(), numbers.end(), v), numbers.end()) << line;
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(Cli, ConflictingRadiusAndTemperatureExitsTwo) {
  TempDir dir("conflict");
  const auto cfg = dir.write("run.cfg", std::string(kReference) + "[geometry]\nR_star = 1\n");
  std::string err;
  EXPECT_EQ(run("classify", cfg, dir.path / "out", &err), cli::kExitValidation);
  EXPECT_NE(err.find("R_star"), std::string::npos);
  EXPECT_NE(err.find("theta_star"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir.path / "out" / "report.txt"));
}

TEST(Cli, SolverFailureExitsThree) {
  TempDir dir("noeq");
  std::string t = kReference;
  t.replace(t.find("theta_star = 1"), 14, "theta_star = 2.9");
  const auto cfg = dir.write("run.cfg", t);
  std::string err;
  EXPECT_EQ(run("equilibrium", cfg, dir.path / "out", &err), cli::kExitSolver);
  EXPECT_NE(err.find("NoEquilibrium"), std::string::npos);
}

TEST(Cli, MissingConfigExitsTwo) {
  std::string err;
  EXPECT_EQ(run("classify", "/nonexistent/run.cfg", "/tmp/never", &err), cli::kExitValidation);
}

TEST(Cli, ValidateMode) {
  TempDir dir("validate");
  std::ostringstream o, e;
  const auto good = dir.write("good.cfg", kReference);
  EXPECT_EQ(cli::run({"validate", good.string(), "", 1}, o, e), cli::kExitOk);
  EXPECT_EQ(o.str(), "ok\n");
  std::string bad = kReference;
  bad.replace(bad.find("[phase1]\nc = 1"), 14, "[phase1]\nc = -2");
  const auto badp = dir.write("bad.cfg", bad);
  std::ostringstream o2;
  EXPECT_EQ(cli::run({"validate", badp.string(), "", 1}, o2, e), cli::kExitValidation);
  EXPECT_NE(o2.str().find("phase1.c"), std::string::npos);
}

TEST(Cli, SigmaSweepFiftyRowsDeterministic) {
  TempDir dir("sweep");
  std::string t = kReference;
  t.replace(t.find("R_outer = 1.2"), 13, "R_outer = 2");
  t += "[solver]\norder = 16\n";
  t.erase(t.find("order = 24\n"), 11);
  t += "[sweep]\nparameter = sigma\nfrom = 0.05\nto = 0.9\ncount = 50\n";
  const auto cfg = dir.write("run.cfg", t);
  ASSERT_EQ(run("sweep", cfg, dir.path / "a", nullptr, 2), cli::kExitOk);
  ASSERT_EQ(run("sweep", cfg, dir.path / "b", nullptr, 1), cli::kExitOk);
  const std::string a = slurp(dir.path / "a" / "sweep.csv");
  EXPECT_EQ(a, slurp(dir.path / "b" / "sweep.csv"));
  EXPECT_EQ(slurp(dir.path / "a" / "summary.json"), slurp(dir.path / "b" / "summary.json"));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 51);
  EXPECT_EQ(a.substr(0, a.find('\n')), "sigma,s,phi_prime,classification,lambda0");
  EXPECT_EQ(a.find("error:"), std::string::npos);
  EXPECT_NE(a.find("normally_stable"), std::string::npos);
  EXPECT_NE(a.find("normally_hyperbolic_unstable"), std::string::npos);
}

TEST(Cli, EvolveWritesTrajectory) {
  TempDir dir("evolve");
  std::string t = kReference;
  t.replace(t.find("R_outer = 1.2"), 13, "R_outer = 2");
  t += "[evolution]\ninit = eigen\n";
  const auto cfg = dir.write("run.cfg", t);
  ASSERT_EQ(run("evolve", cfg, dir.path / "out"), cli::kExitOk);
  const std::string traj = slurp(dir.path / "out" / "trajectory.csv");
  EXPECT_EQ(traj.substr(0, traj.find('\n')), "t,h,theta_interface,Q");
  EXPECT_EQ(std::count(traj.begin(), traj.end(), '\n'), 602);
  const auto s = cli::json::parse(slurp(dir.path / "out" / "summary.json"));
  EXPECT_LT(s["evolution"]["rate_rel_error"].get<double>(), 0.01);
}

TEST(Cli, DispersionSweepTables) {
  TempDir dir("dispersion");
  const auto cfg = dir.write("run.cfg", kReference);
  ASSERT_EQ(run("dispersion-sweep", cfg, dir.path / "out", nullptr, 2), cli::kExitOk);
  const std::string ntd = slurp(dir.path / "out" / "ntd.csv");
  EXPECT_EQ(ntd.substr(0, ntd.find('\n')), "l,lambda,N_heat,N_stokes");
  // l = 0..2, lambda = 0 and 1e-3 .. 1e4 at one point per decade
  EXPECT_EQ(std::count(ntd.begin(), ntd.end(), '\n'), 1 + 3 * 9);
}
