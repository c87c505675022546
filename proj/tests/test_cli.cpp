#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cli.hpp"
#include "config.hpp"
#include "pseudopt/error.hpp"
#include "pseudopt/io.hpp"

using namespace pseudopt;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("pseudopt_cli_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& s) const { return path_ / s; }
  std::string str(const std::string& s) const { return (path_ / s).string(); }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

io::Json read_json(const fs::path& p) { return io::Json::parse(slurp(p)); }

std::string phi_csv(int n, const std::function<Complex(double)>& f) {
  io::Table t{{"phi", "re", "im"}, {}};
  for (int j = 0; j < n; ++j) {
    const double p = 2.0 * kPi * j / n;
    const Complex v = f(p);
    t.rows.push_back({p, v.real(), v.imag()});
  }
  return io::to_csv(t);
}

const char* kMinimal = R"(schema_version: 1
potential:
  radial: {type: coulomb, strength: 1.0}
  polar: {type: zero}
  azimuthal: {type: complex_exp, a: 1.0}
quantum: {n_r: 0, k_or_l: 0, m: 0}
)";

}  // namespace

TEST_CASE("preset coulomb-a1 gives the hydrogen ground state") {
  TempDir d("a1");
  const auto r = run({"solve", "--preset", "coulomb-a1", "--out", d.str("o"), "--json"});
  REQUIRE(r.code == 0);
  const auto j = read_json(d / "o/solve.json");
  CHECK(std::abs(j["states"][0]["lambda"].get<double>() + 0.25) < 1e-4);
  CHECK(io::Json::parse(r.out) == j);
  CHECK(fs::exists(d / "o/radial_nr0_k0_m0.csv"));
  CHECK(fs::exists(d / "o/theta_nr0_k0_m0.csv"));
  CHECK(fs::exists(d / "o/phi_nr0_k0_m0.csv"));
}

TEST_CASE("preset hartmann runs with a constant polar potential") {
  TempDir d("hartmann");
  REQUIRE(run({"solve", "--preset", "hartmann", "--out", d.str("o")}).code == 0);
  const auto j = read_json(d / "o/solve.json");
  CHECK(j["potential"]["polar"] == "constant");
  const auto& s = j["states"][0];
  // mu = sqrt(m^2 - b^2), Lambda = mu (mu + 1)
  const double mu = std::sqrt(1.0 - 0.25);
  CHECK(s["Lambda"].get<double>() == doctest::Approx(mu * (mu + 1.0)).epsilon(1e-11));
}

TEST_CASE("every preset solves") {
  for (const auto& name : cli::preset_names()) {
    TempDir d("preset_" + name);
    CAPTURE(name);
    CHECK(run({"solve", "--preset", name, "--out", d.str("o")}).code == 0);
  }
}

TEST_CASE("dirac-coulomb preset matches the closed form") {
  TempDir d("dirac");
  REQUIRE(run({"solve", "--preset", "dirac-coulomb", "--out", d.str("o")}).code == 0);
  const auto j = read_json(d / "o/solve.json");
  for (const auto& s : j["states"]) {
    const double N = s["n_r"].get<int>() + s["k_or_l"].get<int>() + 1.0;
    const double a = 0.1;
    CHECK(s["E"].get<double>() == doctest::Approx((N * N - a * a) / (N * N + a * a)).epsilon(1e-10));
  }
}

TEST_CASE("malformed configs exit 1 with a line and write nothing") {
  TempDir d("bad");
  const std::vector<std::pair<std::string, int>> cases{
      {"schema_version: 1\npotential:\n  radial: {type: coulomb}\n  bogus: 3\n", 4},
      {"schema_version: 2\npotential: {}\n", 1},
      {"potential: {}\n", 1},
      {"schema_version: 1\npotential:\n  polar: {type: half\n", 4},
      {"schema_version: 1\nequation: dirac\npotential: {}\n", 1},
      {"schema_version: 1\npotential:\n  azimuthal: {type: complex_exp, a: -1}\n", 3},
      {"schema_version: 1\npotential: {}\nquantum:\n  n_r: x\n", 4},
      {"schema_version: 1\npotential:\n  azimuthal: {type: generated, form: cos, m: 1}\nquantum:\n  m: 2\n", 5},
  };
  for (const auto& [text, line] : cases) {
    CAPTURE(text);
    write(d / "c.yaml", text);
    const auto r = run({"solve", "--config", d.str("c.yaml"), "--out", d.str("o")});
    CHECK(r.code == 1);
    CHECK_FALSE(fs::exists(d / "o"));
    CHECK(r.err.find("line " + std::to_string(line) + ":") != std::string::npos);
    try {
      cli::load_config(d / "c.yaml");
      FAIL("no ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.line() == line);
    }
  }
}

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"solve"}).code == 1);
  CHECK(run({"solve", "--preset", "nope"}).code == 1);
  CHECK(run({"solve", "--preset", "fig1", "--config", "x.yaml"}).code == 1);
  CHECK(run({"solve", "--preset", "fig1", "--grid-n", "7"}).code == 1);
  CHECK(run({"solve", "--preset", "fig1", "--tol", "-1"}).code == 1);
  CHECK(run({"generate", "--form", "sin", "--m", "1"}).code == 1);
  CHECK(run({"generate", "--form", "bessel", "--m", "1"}).code == 1);
  CHECK(run({"density", "--preset", "coulomb-a1", "--sweep", "1,x"}).code == 1);
  CHECK(run({"density", "--preset", "coulomb-a1"}).code == 1);
  CHECK(run({"density", "--preset", "hartmann", "--sweep", "1"}).code == 1);
  CHECK(run({"solve", "--help"}).code == 0);
}

TEST_CASE("solver failures exit 2 and write nothing") {
  TempDir d("fail");
  write(d / "c.yaml", "schema_version: 1\npotential:\n  radial: {type: zero}\n");
  const auto r = run({"solve", "--config", d.str("c.yaml"), "--out", d.str("o")});
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(d / "o"));
  CHECK(r.err.find("no bound states") != std::string::npos);
}

TEST_CASE("complex m^2 exits 3") {
  TempDir d("reality");
  write(d / "v.csv", phi_csv(64, [](double) { return Complex{0.0, 1e-3}; }));
  write(d / "c.yaml", "schema_version: 1\npotential:\n  azimuthal: {type: tabulated, file: v.csv}\n");
  const auto r = run({"solve", "--config", d.str("c.yaml"), "--out", d.str("o")});
  CHECK(r.code == 3);
  CHECK_FALSE(fs::exists(d / "o"));
}

TEST_CASE("check reports PT defects and single-valuedness") {
  TempDir d("check");
  write(d / "c.yaml", kMinimal);
  const auto ok = run({"check", "--config", d.str("c.yaml"), "--out", d.str("o"), "--json"});
  REQUIRE(ok.code == 0);
  const auto j = io::Json::parse(ok.out);
  CHECK(j["status"] == "PASS");
  CHECK(j["checks"][0]["name"] == "pt_defect azimuthal");
  CHECK(j["checks"][0]["status"] == "PASS");
  CHECK(j["checks"][0]["value"].get<double>() < 1e-12);

  const auto k = run({"check", "--config", d.str("c.yaml"), "--out", d.str("k"), "--k-probe"});
  CHECK(k.code == 0);
  CHECK(k.out.find("single_valuedness K m=0") != std::string::npos);
  const auto kj = read_json(d / "k/check.json");
  bool found = false;
  for (const auto& c : kj["checks"]) {
    if (c["name"] == "single_valuedness K m=0") {
      found = true;
      CHECK(c["value"].get<double>() > 0.1);
    }
  }
  CHECK(found);

  write(d / "iphi.csv", phi_csv(64, [](double p) { return Complex{0.0, p}; }));
  write(d / "t.yaml", "schema_version: 1\npotential:\n  azimuthal: {type: tabulated, file: iphi.csv}\n");
  const auto bad = run({"check", "--config", d.str("t.yaml"), "--out", d.str("t"), "--json"});
  CHECK(bad.code == 3);
  const auto bj = io::Json::parse(bad.out);
  CHECK(bj["status"] == "FAIL");
  CHECK(bj["checks"][0]["status"] == "FAIL");
  CHECK(bj["checks"][0]["value"].get<double>() == doctest::Approx(2.0 * kPi).epsilon(1e-11));
}

TEST_CASE("generate: cos gives -[1 + 2 i m tan phi] off the poles") {
  TempDir d("gen");
  REQUIRE(run({"generate", "--form", "cos", "--m", "1", "--out", d.str("o")}).code == 0);
  const auto t = io::read_csv(d / "o/potential.csv");
  int excluded = 0;
  for (const auto& row : t.rows) {
    if (std::isnan(row[1])) {
      ++excluded;
      CHECK(std::abs(std::cos(row[0])) < 1e-10);
      continue;
    }
    const Complex want = -(1.0 + 2.0 * Complex{0.0, 1.0} * std::tan(row[0]));
    CHECK(std::abs(Complex{row[1], row[2]} - want) < 1e-10 * std::max(1.0, std::abs(want)));
  }
  CHECK(excluded == 2);
  const auto j = read_json(d / "o/potential.json");
  CHECK(j["pt_defect"].get<double>() < 1e-12);
  CHECK(j["excluded"] == 2);
}

TEST_CASE("generate: const gives zero and bessel gives -e^{i phi}") {
  TempDir d("gen2");
  REQUIRE(run({"generate", "--form", "const", "--m", "2", "--out", d.str("c")}).code == 0);
  for (const auto& row : io::read_csv(d / "c/potential.csv").rows) {
    CHECK(std::abs(row[1]) < 1e-12);
    CHECK(std::abs(row[2]) < 1e-12);
  }
  REQUIRE(run({"generate", "--form", "bessel", "--omega", "2", "--m", "1", "--grid-n", "64", "--out", d.str("b")})
              .code == 0);
  const auto t = io::read_csv(d / "b/potential.csv");
  CHECK(t.rows.size() == 64);
  for (const auto& row : t.rows) {
    const Complex want = -std::exp(Complex{0.0, row[0]});
    CHECK(std::abs(Complex{row[1], row[2]} - want) < 1e-8);
  }
}

TEST_CASE("generate: too many zeros of F is a solver failure") {
  TempDir d("gen3");
  write(d / "f.csv", phi_csv(64, [](double p) { return p < 2.0 ? Complex{0.0, 0.0} : Complex{1.0, 0.0}; }));
  const auto r = run({"generate", "--form", "tabulated", "--table", d.str("f.csv"), "--m", "0", "--out", d.str("o")});
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(d / "o"));
}

TEST_CASE("density sweeps") {
  TempDir d("density");
  const auto zero = run({"density", "--preset", "fig1", "--sweep", "0", "--out", d.str("z")});
  REQUIRE(zero.code == 0);
  const auto zt = io::read_csv(d / "z/localization.csv");
  REQUIRE(zt.rows.size() == 1);
  CHECK(std::abs(zt.rows[0][1] - 1.0) < 1e-10);

  for (const std::string preset : {"fig1", "fig2"}) {
    CAPTURE(preset);
    REQUIRE(run({"density", "--preset", preset, "--out", d.str(preset)}).code == 0);
    const auto t = io::read_csv(d / (preset + "/localization.csv"));
    REQUIRE(t.rows.size() == 4);
    for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i][1] > t.rows[i - 1][1]);
    // argmax of each exported slice sits at phi = 0 for a >= 1
    for (const std::string a : {"1", "2", "4"}) {
      const auto s = io::read_csv(d / (preset + "/slice_a" + a + ".csv"));
      std::size_t best = 0;
      for (std::size_t i = 0; i < s.rows.size(); ++i) {
        if (s.rows[i][1] > s.rows[best][1]) best = i;
      }
      CHECK(s.rows[best][0] == 0.0);
    }
    const auto side = read_json(d / (preset + "/density_a2.json"));
    CHECK(side["a"] == 2.0);
    CHECK(side["n"] == (preset == "fig1" ? 1 : 2));
    const auto grid = io::read_csv(d / (preset + "/density_a2.csv"));
    CHECK(grid.header == std::vector<std::string>{"r", "theta", "phi", "density"});
    CHECK(grid.rows.size() == 40u * 24u * 64u);
  }
}

TEST_CASE("outputs are byte-identical across runs and thread counts") {
  TempDir d("det");
  ::setenv("PSEUDO_PT_THREADS", "1", 1);
  REQUIRE(run({"solve", "--preset", "coulomb-half", "--out", d.str("a")}).code == 0);
  REQUIRE(run({"density", "--preset", "fig1", "--out", d.str("da")}).code == 0);
  ::setenv("PSEUDO_PT_THREADS", "4", 1);
  REQUIRE(run({"solve", "--preset", "coulomb-half", "--out", d.str("b")}).code == 0);
  REQUIRE(run({"density", "--preset", "fig1", "--out", d.str("db")}).code == 0);
  CHECK(slurp(d / "a/solve.json") == slurp(d / "b/solve.json"));
  for (const auto& e : fs::directory_iterator(d / "da")) {
    CAPTURE(e.path().filename().string());
    CHECK(slurp(e.path()) == slurp(d / "db" / e.path().filename()));
  }
  ::setenv("PSEUDO_PT_THREADS", "zero", 1);
  CHECK(run({"solve", "--preset", "coulomb-a1", "--out", d.str("c")}).code == 1);
  ::unsetenv("PSEUDO_PT_THREADS");
}

TEST_CASE("config overrides and relative table paths") {
  TempDir d("cfg");
  fs::create_directories(d / "sub");
  write(d / "sub/gen.yaml",
        "schema_version: 1\nname: g\npotential:\n  azimuthal: {type: generated, form: bessel, m: 1, omega: 1.5}\n"
        "quantum: {n_r: 0, k_or_l: 1, m: 1}\nsolver: {n_phi: 64}\n");
  auto cfg = cli::load_config(d / "sub/gen.yaml");
  CHECK(cfg.solver.n_phi == 64);
  CHECK(std::get<GeneratedAzimuthal>(cfg.spec.azimuthal).generator.values.size() == 64);
  cli::apply_grid_n(cfg, 96);
  CHECK(std::get<GeneratedAzimuthal>(cfg.spec.azimuthal).generator.values.size() == 96);
  cli::apply_tol(cfg, 1e-9);
  CHECK(cfg.solver.tol == 1e-9);

  write(d / "sub/r.csv", [] {
    io::Table t{{"r", "v"}, {}};
    for (int i = 0; i <= 6000; ++i) t.rows.push_back({0.01 + 0.02 * i, -1.0 / (0.01 + 0.02 * i)});
    return io::to_csv(t);
  }());
  write(d / "sub/tab.yaml", "schema_version: 1\npotential:\n  radial: {type: tabulated, file: r.csv}\n"
                            "quantum: {k_or_l: 1}\n");
  const auto r = run({"solve", "--config", d.str("sub/tab.yaml"), "--out", d.str("o")});
  REQUIRE(r.code == 0);
  const auto j = read_json(d / "o/solve.json");
  CHECK(std::abs(j["states"][0]["lambda"].get<double>() / -0.0625 - 1.0) < 1e-3);
}

TEST_CASE("the installed binary reports exit codes") {
  TempDir d("bin");
  const std::string bin = PSEUDOPT_BINARY;
  CHECK(std::system((bin + " solve --preset coulomb-a1 --out " + d.str("o") + " > /dev/null").c_str()) == 0);
  const int bad = std::system((bin + " solve --preset nope 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(bad) == 1);
}
