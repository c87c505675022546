#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pseudopt/error.hpp"
#include "pseudopt/io.hpp"

namespace pseudopt::cli {
namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

class Reader {
 public:
  Reader(std::string source, std::filesystem::path base) : source_(std::move(source)), base_(std::move(base)) {}

  [[noreturn]] void fail(const std::string& msg, const YAML::Node& at) const {
    throw ConfigError(source_ + ": " + msg, line_of(at));
  }

  void require_map(const YAML::Node& n, const std::string& what) const {
    if (!n.IsMap()) fail(what + " must be a mapping", n);
  }

  void check_keys(const YAML::Node& n, const std::set<std::string>& allowed, const std::string& what) const {
    require_map(n, what);
    for (auto it = n.begin(); it != n.end(); ++it) {
      const auto key = it->first.as<std::string>();
      if (!allowed.count(key)) fail("unknown key '" + key + "' in " + what, it->first);
    }
  }

  template <class T>
  T scalar(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(what + " must be a scalar", n);
    try {
      return n.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(what + " has the wrong type: '" + n.Scalar() + "'", n);
    }
  }

  template <class T>
  T get(const YAML::Node& parent, const std::string& key, T fallback) const {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    return scalar<T>(n, key);
  }

  template <class T>
  T need(const YAML::Node& parent, const std::string& key, const std::string& what) const {
    const YAML::Node n = parent[key];
    if (!n) fail(what + " needs '" + key + "'", parent);
    return scalar<T>(n, key);
  }

  std::vector<int> int_list(const YAML::Node& parent, const std::string& key) const {
    const YAML::Node n = parent[key];
    if (!n) return {0};
    std::vector<int> out;
    if (n.IsSequence()) {
      for (const auto& v : n) out.push_back(scalar<int>(v, key));
    } else {
      out.push_back(scalar<int>(n, key));
    }
    if (out.empty()) fail(key + " must not be empty", n);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  io::Table table(const YAML::Node& parent, const std::string& what) const {
    const auto file = need<std::string>(parent, "file", what);
    std::filesystem::path p(file);
    if (p.is_relative()) p = base_ / p;
    try {
      return io::read_csv(p);
    } catch (const ConfigError& e) {
      fail(std::string(e.what()), parent["file"]);
    }
  }

  RadialPotential radial(const YAML::Node& n) const {
    require_map(n, "potential.radial");
    const auto type = need<std::string>(n, "type", "potential.radial");
    if (type == "coulomb") {
      check_keys(n, {"type", "strength"}, "potential.radial");
      return CoulombRadial{get<double>(n, "strength", 1.0)};
    }
    if (type == "zero") {
      check_keys(n, {"type"}, "potential.radial");
      return ZeroRadial{};
    }
    if (type == "tabulated") {
      check_keys(n, {"type", "file"}, "potential.radial");
      auto [r, v] = io::xy_columns(table(n, "potential.radial"));
      return TabulatedRadial{r, v};
    }
    fail("unknown radial type '" + type + "' (coulomb, zero, tabulated)", n["type"]);
  }

  PolarPotential polar(const YAML::Node& n) const {
    require_map(n, "potential.polar");
    const auto type = need<std::string>(n, "type", "potential.polar");
    if (type == "zero" || type == "half" || type == "inverse_cos_squared") {
      check_keys(n, {"type"}, "potential.polar");
      if (type == "zero") return ZeroPolar{};
      if (type == "half") return HalfPolar{};
      return InverseCosSquaredPolar{};
    }
    if (type == "constant") {
      check_keys(n, {"type", "value"}, "potential.polar");
      return ConstantPolar{need<double>(n, "value", "potential.polar")};
    }
    if (type == "tabulated") {
      check_keys(n, {"type", "file"}, "potential.polar");
      auto [t, v] = io::xy_columns(table(n, "potential.polar"));
      return TabulatedPolar{t, v};
    }
    fail("unknown polar type '" + type + "' (zero, half, inverse_cos_squared, constant, tabulated)", n["type"]);
  }

  AzimuthalPotential azimuthal(const YAML::Node& n, int n_phi, std::optional<NamedGenerator>& named) const {
    require_map(n, "potential.azimuthal");
    const auto type = need<std::string>(n, "type", "potential.azimuthal");
    if (type == "complex_exp") {
      check_keys(n, {"type", "a"}, "potential.azimuthal");
      const double a = get<double>(n, "a", 0.0);
      if (!(a >= 0.0)) fail("coupling a must be non-negative", n["a"]);
      return ComplexExpAzimuthal{a};
    }
    if (type == "generated") {
      check_keys(n, {"type", "form", "m", "omega", "file"}, "potential.azimuthal");
      const auto form = need<std::string>(n, "form", "potential.azimuthal");
      const int m = need<int>(n, "m", "potential.azimuthal");
      if (form == "cos" || form == "const" || form == "bessel") {
        named = NamedGenerator{form, m, form == "bessel" ? need<double>(n, "omega", "bessel generator") : 0.0};
        return GeneratedAzimuthal{make_generator(*named, n_phi)};
      }
      if (form == "tabulated") {
        try {
          return GeneratedAzimuthal{GeneratorFunction{io::phi_grid_from_table(table(n, "generator")), m}};
        } catch (const ConfigError& e) {
          fail(e.what(), n["file"]);
        }
      }
      fail("unknown generator form '" + form + "' (cos, const, bessel, tabulated)", n["form"]);
    }
    if (type == "tabulated") {
      check_keys(n, {"type", "file"}, "potential.azimuthal");
      try {
        return TabulatedAzimuthal{io::phi_grid_from_table(table(n, "potential.azimuthal"))};
      } catch (const ConfigError& e) {
        fail(e.what(), n["file"]);
      }
    }
    fail("unknown azimuthal type '" + type + "' (complex_exp, generated, tabulated)", n["type"]);
  }

 private:
  std::string source_;
  std::filesystem::path base_;
};

const std::map<std::string, std::string>& presets() {
  static const std::map<std::string, std::string> p{
      {"coulomb-a1", R"(schema_version: 1
name: coulomb-a1
equation: schroedinger
potential:
  radial: {type: coulomb, strength: 1.0}
  polar: {type: zero}
  azimuthal: {type: complex_exp, a: 1.0}
quantum: {n_r: 0, k_or_l: 0, m: 0}
)"},
      {"hartmann", R"(schema_version: 1
name: hartmann
equation: schroedinger
potential:
  radial: {type: coulomb, strength: 1.0}
  polar: {type: constant, value: -0.25}
  azimuthal: {type: complex_exp, a: 0.0}
quantum: {n_r: [0, 1], k_or_l: [0, 1], m: 1}
)"},
      {"coulomb-half", R"(schema_version: 1
name: coulomb-half
equation: schroedinger
potential:
  radial: {type: coulomb, strength: 1.0}
  polar: {type: half}
  azimuthal: {type: complex_exp, a: 1.0}
quantum: {n_r: 0, k_or_l: [0, 1, 2], m: [0, 1]}
)"},
      {"coulomb-sec2", R"(schema_version: 1
name: coulomb-sec2
equation: schroedinger
potential:
  radial: {type: coulomb, strength: 1.0}
  polar: {type: inverse_cos_squared}
  azimuthal: {type: complex_exp, a: 1.0}
quantum: {n_r: 0, k_or_l: [0, 1], m: [0, 1]}
)"},
      {"dirac-coulomb", R"(schema_version: 1
name: dirac-coulomb
equation: dirac
mass: 1.0
potential:
  radial: {type: coulomb, strength: 0.1}
  polar: {type: zero}
  azimuthal: {type: complex_exp, a: 1.0}
quantum: {n_r: [0, 1], k_or_l: [0, 1], m: 0}
)"},
      {"fig1", R"(schema_version: 1
name: fig1
equation: schroedinger
potential:
  radial: {type: coulomb, strength: 1.0}
  polar: {type: zero}
  azimuthal: {type: complex_exp, a: 0.0}
quantum: {n_r: 0, k_or_l: 0, m: 0}
density:
  sweep: [0.5, 1, 2, 4]
)"},
      {"fig2", R"(schema_version: 1
name: fig2
equation: schroedinger
potential:
  radial: {type: coulomb, strength: 1.0}
  polar: {type: zero}
  azimuthal: {type: complex_exp, a: 0.0}
quantum: {n_r: 1, k_or_l: 0, m: 0}
density:
  sweep: [0.5, 1, 2, 4]
)"},
  };
  return p;
}

}  // namespace

GeneratorFunction make_generator(const NamedGenerator& g, int n) {
  if (g.form == "cos") return generator_cos(g.m, n);
  if (g.form == "const") return generator_const(g.m, n);
  if (g.form == "bessel") return generator_bessel(g.m, g.omega, n);
  throw ConfigError("unknown generator form '" + g.form + "' (cos, const, bessel)");
}

RunConfig parse_config(const std::string& text, const std::string& source, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(source + ": " + e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
  const Reader rd(source, base_dir);
  if (!root || root.IsNull()) throw ConfigError(source + ": empty configuration");
  rd.check_keys(root, {"schema_version", "name", "equation", "mass", "potential", "quantum", "solver", "density"},
                "the top level");
  if (!root["schema_version"]) rd.fail("missing schema_version", root);
  const int version = rd.scalar<int>(root["schema_version"], "schema_version");
  if (version != Defaults::schema_version) {
    rd.fail("unsupported schema_version " + std::to_string(version) + " (expected " +
                std::to_string(Defaults::schema_version) + ")",
            root["schema_version"]);
  }
  RunConfig cfg;
  cfg.name = rd.get<std::string>(root, "name", "run");

  const auto eq = rd.get<std::string>(root, "equation", "schroedinger");
  if (eq == "schroedinger") {
    if (root["mass"]) rd.fail("mass is only meaningful for equation: dirac", root["mass"]);
    cfg.kind = EquationKind::schroedinger();
  } else if (eq == "dirac") {
    const double mass = rd.need<double>(root, "mass", "equation: dirac");
    if (!(mass > 0.0)) rd.fail("mass must be positive", root["mass"]);
    cfg.kind = EquationKind::dirac(mass);
  } else {
    rd.fail("equation must be schroedinger or dirac", root["equation"]);
  }

  const YAML::Node solver = root["solver"];
  if (solver) {
    rd.check_keys(solver,
                  {"n_phi", "n_radial", "r_max", "numeric_coulomb", "n_theta_basis", "n_theta_grid", "tol",
                   "negative_branch"},
                  "solver");
  }
  const YAML::Node sv = solver ? solver : YAML::Node(YAML::NodeType::Map);
  auto& o = cfg.solver;
  o.n_phi = rd.get<int>(sv, "n_phi", Defaults::n_phi);
  o.radial.n_grid = rd.get<int>(sv, "n_radial", Defaults::n_radial);
  o.radial.r_max = rd.get<double>(sv, "r_max", 0.0);
  o.radial.numeric_coulomb = rd.get<bool>(sv, "numeric_coulomb", false);
  o.theta.n_basis = rd.get<int>(sv, "n_theta_basis", Defaults::n_theta_basis);
  o.theta.n_grid = rd.get<int>(sv, "n_theta_grid", Defaults::n_theta_grid);
  o.tol = rd.get<double>(sv, "tol", Defaults::tol);
  o.negative_branch = rd.get<bool>(sv, "negative_branch", false);
  if (o.n_phi < 8 || o.n_phi % 2 != 0) rd.fail("n_phi must be even and at least 8", sv["n_phi"] ? sv["n_phi"] : sv);
  if (o.radial.n_grid < 10) rd.fail("n_radial must be at least 10", sv["n_radial"]);
  if (o.radial.r_max < 0.0) rd.fail("r_max must be non-negative", sv["r_max"]);
  if (o.theta.n_basis < 4) rd.fail("n_theta_basis must be at least 4", sv["n_theta_basis"]);
  if (o.theta.n_grid < 4) rd.fail("n_theta_grid must be at least 4", sv["n_theta_grid"]);
  if (!(o.tol > 0.0)) rd.fail("tol must be positive", sv["tol"]);

  const YAML::Node pot = root["potential"];
  if (!pot) rd.fail("missing potential", root);
  rd.check_keys(pot, {"radial", "polar", "azimuthal"}, "potential");
  if (pot["radial"]) cfg.spec.radial = rd.radial(pot["radial"]);
  if (pot["polar"]) cfg.spec.polar = rd.polar(pot["polar"]);
  if (pot["azimuthal"]) cfg.spec.azimuthal = rd.azimuthal(pot["azimuthal"], o.n_phi, cfg.generator);

  const YAML::Node q = root["quantum"];
  if (q) {
    rd.check_keys(q, {"n_r", "k_or_l", "m"}, "quantum");
    cfg.n_r = rd.int_list(q, "n_r");
    cfg.k_or_l = rd.int_list(q, "k_or_l");
    cfg.m = rd.int_list(q, "m");
    if (cfg.n_r.front() < 0) rd.fail("n_r must be non-negative", q["n_r"]);
    if (cfg.k_or_l.front() < 0) rd.fail("k_or_l must be non-negative", q["k_or_l"]);
  }
  if (const auto* g = std::get_if<GeneratedAzimuthal>(&cfg.spec.azimuthal)) {
    for (int m : cfg.m) {
      if (m != g->generator.m) {
        rd.fail("quantum m = " + std::to_string(m) + " differs from the generator's m = " +
                    std::to_string(g->generator.m),
                q && q["m"] ? q["m"] : pot["azimuthal"]);
      }
    }
  }

  const YAML::Node den = root["density"];
  if (den) {
    rd.check_keys(den, {"sweep", "n_r", "n_theta", "n_phi", "r_max"}, "density");
    if (den["sweep"]) {
      if (!den["sweep"].IsSequence()) rd.fail("density.sweep must be a list", den["sweep"]);
      for (const auto& v : den["sweep"]) {
        const double a = rd.scalar<double>(v, "density.sweep");
        if (!(a >= 0.0)) rd.fail("sweep couplings must be non-negative", v);
        cfg.density.sweep.push_back(a);
      }
    }
    auto& d = cfg.density;
    d.n_r = rd.get<int>(den, "n_r", d.n_r);
    d.n_theta = rd.get<int>(den, "n_theta", d.n_theta);
    d.n_phi = rd.get<int>(den, "n_phi", d.n_phi);
    d.r_max = rd.get<double>(den, "r_max", d.r_max);
    if (d.n_r < 1 || d.n_theta < 1 || d.n_phi < 2) rd.fail("density grid sizes must be positive", den);
    if (d.r_max < 0.0) rd.fail("density.r_max must be non-negative", den["r_max"]);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path.string(), path.parent_path());
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : presets()) out.push_back(k);
  return out;
}

std::string preset_text(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (" + known + ")");
  }
  return it->second;
}

RunConfig load_preset(const std::string& name) { return parse_config(preset_text(name), "preset " + name, "."); }

std::vector<QuantumNumbers> states(const RunConfig& cfg) {
  const bool legendre = std::holds_alternative<ZeroPolar>(cfg.spec.polar);
  std::vector<QuantumNumbers> out;
  for (int n_r : cfg.n_r) {
    for (int k : cfg.k_or_l) {
      for (int m : cfg.m) {
        if (legendre && std::abs(m) > k) continue;
        out.push_back({n_r, k, m});
      }
    }
  }
  return out;
}

void apply_grid_n(RunConfig& cfg, int n) {
  if (n < 8 || n % 2 != 0) throw ConfigError("--grid-n must be even and at least 8");
  cfg.solver.n_phi = n;
  // tabulated generators keep their own grid
  if (cfg.generator) cfg.spec.azimuthal = GeneratedAzimuthal{make_generator(*cfg.generator, n)};
}

void apply_tol(RunConfig& cfg, double tol) {
  if (!(tol > 0.0)) throw ConfigError("--tol must be positive");
  cfg.solver.tol = tol;
}

}  // namespace pseudopt::cli
