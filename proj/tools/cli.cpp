#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <thread>

#include "config.hpp"
#include "pseudopt/error.hpp"
#include "pseudopt/io.hpp"

namespace pseudopt::cli {
namespace fs = std::filesystem;
namespace {

constexpr double kPi = std::numbers::pi;

// Runs f(0..n-1) on up to worker_count() threads. Errors are rethrown in index
// order so failures are reported the same way whatever the scheduling.
template <class F>
void parallel_for(std::size_t n, F f) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(worker_count()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Files are staged in memory and committed together, so a failed run leaves nothing behind.
class Outputs {
 public:
  void add(std::string name, std::string text) { files_.emplace_back(std::move(name), std::move(text)); }

  void commit(const fs::path& dir) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
    std::vector<fs::path> staged;
    try {
      for (const auto& [name, text] : files_) {
        staged.push_back(dir / (name + ".tmp"));
        io::write_text(staged.back(), text);
      }
    } catch (...) {
      for (const auto& p : staged) fs::remove(p, ec);
      throw;
    }
    for (std::size_t i = 0; i < files_.size(); ++i) fs::rename(staged[i], dir / files_[i].first);
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

struct Common {
  std::string config;
  std::string preset;
  std::string out = "out";
  std::optional<int> grid_n;
  std::optional<double> tol;
  bool json = false;
};

RunConfig load(const Common& c) {
  if (c.config.empty() == c.preset.empty()) throw ConfigError("give exactly one of --config and --preset");
  RunConfig cfg = c.config.empty() ? load_preset(c.preset) : load_config(c.config);
  if (c.grid_n) apply_grid_n(cfg, *c.grid_n);
  if (c.tol) apply_tol(cfg, *c.tol);
  return cfg;
}

std::string state_tag(const QuantumNumbers& q) {
  return "nr" + std::to_string(q.n_r) + "_k" + std::to_string(q.k_or_l) + "_m" + std::to_string(q.m);
}

io::Json quantum_json(const QuantumNumbers& q) { return {{"n_r", q.n_r}, {"k_or_l", q.k_or_l}, {"m", q.m}}; }

io::Json run_header(const RunConfig& cfg) {
  io::Json j;
  j["name"] = cfg.name;
  j["equation"] = cfg.kind.is_dirac() ? "dirac" : "schroedinger";
  if (cfg.kind.is_dirac()) j["mass"] = io::round12(cfg.kind.mass);
  j["potential"] = {{"radial", radial_tag(cfg.spec.radial)},
                    {"polar", polar_tag(cfg.spec.polar)},
                    {"azimuthal", azimuthal_tag(cfg.spec.azimuthal)}};
  return j;
}

// ---- solve ----

int cmd_solve(const Common& c, std::ostream& out) {
  const RunConfig cfg = load(c);
  const auto qs = states(cfg);
  if (qs.empty()) throw ConfigError("no valid (n_r, k_or_l, m) combination (the Legendre branch needs |m| <= l)");
  std::vector<Wavefunction> wfs(qs.size());
  parallel_for(qs.size(), [&](std::size_t i) { wfs[i] = assemble(cfg.spec, cfg.kind, qs[i], cfg.solver); });

  Outputs files;
  io::Json j = run_header(cfg);
  j["states"] = io::Json::array();
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const std::string tag = state_tag(qs[i]);
    io::Json s = io::state_json(wfs[i]);
    s["files"] = {"radial_" + tag + ".csv", "theta_" + tag + ".csv", "phi_" + tag + ".csv"};
    j["states"].push_back(s);
    files.add("radial_" + tag + ".csv", io::to_csv(io::radial_table(wfs[i].radial)));
    files.add("theta_" + tag + ".csv", io::to_csv(io::theta_table(wfs[i].angular)));
    files.add("phi_" + tag + ".csv", io::to_csv(io::phi_table(wfs[i].azimuthal.values)));
  }
  const std::string text = io::dump(j);
  files.add("solve.json", text);
  files.commit(c.out);

  if (c.json) {
    out << text;
  } else {
    out << std::left << std::setw(6) << "n_r" << std::setw(6) << "k/l" << std::setw(6) << "m" << std::setw(22)
        << "m^2" << std::setw(20) << "Lambda" << std::setw(20) << "lambda" << "E\n";
    for (const auto& wf : wfs) {
      const auto& k = wf.constants;
      out << std::setw(6) << wf.quantum.n_r << std::setw(6) << wf.quantum.k_or_l << std::setw(6) << wf.quantum.m
          << std::setw(22)
          << (io::format_number(k.m_squared.real()) + (k.m_squared.imag() < 0 ? "-" : "+") +
              io::format_number(std::abs(k.m_squared.imag())) + "i")
          << std::setw(20) << io::format_number(k.Lambda.real()) << std::setw(20) << io::format_number(k.lambda)
          << io::format_number(wf.E) << "\n";
    }
    out << "wrote " << (qs.size() * 3 + 1) << " files to " << c.out << "\n";
  }
  return kOk;
}

// ---- check ----

struct CheckLine {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string status;  // PASS, FAIL or INFO
  std::string note;
};

CheckLine threshold_line(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value < threshold ? "PASS" : "FAIL", {}};
}

int cmd_check(const Common& c, bool k_probe, std::ostream& out) {
  const RunConfig cfg = load(c);
  std::vector<CheckLine> lines;

  PhiGrid v;
  if (const auto* g = std::get_if<GeneratedAzimuthal>(&cfg.spec.azimuthal)) {
    v = potential_from_generator(g->generator);
  } else if (const auto* t = std::get_if<TabulatedAzimuthal>(&cfg.spec.azimuthal)) {
    v = t->grid;  // as given; resampling would add Gibbs ripple at jumps
  } else {
    v = azimuthal_grid(cfg.spec.azimuthal, cfg.solver.n_phi);
  }
  lines.push_back(threshold_line("pt_defect azimuthal", pt_defect(v), Defaults::pt_threshold));
  lines.push_back({"pt_defect radial", 0.0, 0.0, "INFO", "real potential"});
  lines.push_back({"pt_defect polar", 0.0, 0.0, "INFO", "real potential"});

  if (const auto* ce = std::get_if<ComplexExpAzimuthal>(&cfg.spec.azimuthal)) {
    for (int m : cfg.m) {
      lines.push_back(threshold_line("single_valuedness I m=" + std::to_string(m),
                                     single_valuedness_defect(Branch::I, m, ce->a),
                                     Defaults::single_valued_threshold));
      if (k_probe) {
        CheckLine k{"single_valuedness K m=" + std::to_string(m), 0.0, 0.0, "INFO", "violation magnitude"};
        try {
          k.value = single_valuedness_defect(Branch::K, m, ce->a);
        } catch (const Error& e) {
          k.value = std::nan("");
          k.note = e.what();
        }
        lines.push_back(k);
      }
    }
  } else if (const auto* g = std::get_if<GeneratedAzimuthal>(&cfg.spec.azimuthal)) {
    lines.push_back(threshold_line("membership m^2=" + std::to_string(g->generator.m * g->generator.m),
                                   generator_membership_residual(g->generator, v), Defaults::membership_threshold));
  } else if (k_probe) {
    lines.push_back({"single_valuedness K", std::nan(""), 0.0, "INFO", "only defined for complex_exp"});
  }

  const auto qs = states(cfg);
  std::vector<CheckLine> reality(qs.size());
  parallel_for(qs.size(), [&](std::size_t i) {
    CheckLine& line = reality[i];
    line.name = "reality " + state_tag(qs[i]);
    line.threshold = 1e-8;
    try {
      const Wavefunction wf = assemble(cfg.spec, cfg.kind, qs[i], cfg.solver);
      const double im = std::abs(wf.constants.m_squared.imag());
      line.value = im;
      line.status = within_reality(wf.constants.m_squared) ? "PASS" : "FAIL";
      line.threshold = reality_tolerance(wf.constants.m_squared);
      line.note = "margin " + io::format_number(line.threshold - im);
      if (cfg.kind.is_dirac()) line.note += ", E^2 = " + io::format_number(wf.constants.lambda + cfg.kind.mass * cfg.kind.mass);
    } catch (const Error& e) {
      line.value = std::nan("");
      line.status = "FAIL";
      line.note = e.what();
    }
  });
  lines.insert(lines.end(), reality.begin(), reality.end());

  bool ok = true;
  io::Json j = run_header(cfg);
  j["checks"] = io::Json::array();
  for (const auto& l : lines) {
    if (l.status == "FAIL") ok = false;
    io::Json e;
    e["name"] = l.name;
    e["status"] = l.status;
    e["value"] = std::isfinite(l.value) ? io::Json(io::round12(l.value)) : io::Json(nullptr);
    if (l.status != "INFO") e["threshold"] = io::round12(l.threshold);
    if (!l.note.empty()) e["note"] = l.note;
    j["checks"].push_back(e);
  }
  j["status"] = ok ? "PASS" : "FAIL";
  const std::string text = io::dump(j);

  Outputs files;
  files.add("check.json", text);
  files.commit(c.out);
  if (c.json) {
    out << text;
  } else {
    for (const auto& l : lines) {
      out << l.status << "  " << l.name << "  " << io::format_number(l.value);
      if (l.status != "INFO") out << " (threshold " << io::format_number(l.threshold) << ")";
      if (!l.note.empty()) out << "  " << l.note;
      out << "\n";
    }
  }
  return ok ? kOk : kReality;
}

// ---- generate ----

struct GenerateArgs {
  std::string form;
  int m = 0;
  std::optional<double> omega;
  std::string table;
};

int cmd_generate(const Common& c, const GenerateArgs& a, std::ostream& out) {
  const int n = c.grid_n.value_or(Defaults::n_phi);
  if (n < 8 || n % 2 != 0) throw ConfigError("--grid-n must be even and at least 8");
  GeneratorFunction g;
  if (a.form == "tabulated") {
    if (a.table.empty()) throw ConfigError("--form tabulated needs --table");
    g = GeneratorFunction{io::phi_grid_from_table(io::read_csv(a.table)), a.m};
  } else {
    if (!a.table.empty()) throw ConfigError("--table is only used with --form tabulated");
    if (a.form == "bessel" && !a.omega) throw ConfigError("--form bessel needs --omega");
    if (a.form != "bessel" && a.omega) throw ConfigError("--omega is only used with --form bessel");
    g = make_generator({a.form, a.m, a.omega.value_or(0.0)}, n);
  }
  const PhiGrid v = potential_from_generator(g);
  io::Json j;
  j["form"] = a.form;
  j["m"] = a.m;
  if (a.omega) j["omega"] = io::round12(*a.omega);
  j["n"] = v.size();
  j["excluded"] = v.excluded_count();
  j["pt_defect"] = io::round12(pt_defect(v));
  j["membership_residual"] = io::round12(generator_membership_residual(g, v));
  j["files"] = {"potential.csv"};
  const std::string text = io::dump(j);

  Outputs files;
  files.add("potential.csv", io::to_csv(io::phi_table(v)));
  files.add("potential.json", text);
  files.commit(c.out);
  if (c.json) {
    out << text;
  } else {
    out << "V_eff(phi) on " << v.size() << " points, " << v.excluded_count() << " excluded\n"
        << "pt_defect " << io::format_number(pt_defect(v)) << "\n"
        << "m^2 membership residual " << io::format_number(generator_membership_residual(g, v)) << "\n"
        << "wrote potential.csv, potential.json to " << c.out << "\n";
  }
  return kOk;
}

// ---- density ----

std::vector<double> parse_sweep(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t end = std::min(s.find(',', pos), s.size());
    const std::string cell = s.substr(pos, end - pos);
    char* stop = nullptr;
    const double v = std::strtod(cell.c_str(), &stop);
    if (cell.empty() || *stop != '\0') throw ConfigError("--sweep: not a number: '" + cell + "'");
    if (!(v >= 0.0)) throw ConfigError("--sweep: couplings must be non-negative");
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

int cmd_density(const Common& c, const std::string& sweep_arg, std::ostream& out) {
  const RunConfig cfg = load(c);
  std::vector<double> sweep = sweep_arg.empty() ? cfg.density.sweep : parse_sweep(sweep_arg);
  if (sweep.empty()) throw ConfigError("density needs a non-empty sweep (--sweep or density.sweep)");
  std::sort(sweep.begin(), sweep.end());
  sweep.erase(std::unique(sweep.begin(), sweep.end()), sweep.end());
  const auto qs = states(cfg);
  if (qs.size() != 1) throw ConfigError("density needs exactly one (n_r, k_or_l, m) combination");
  const QuantumNumbers q = qs.front();
  const auto& d = cfg.density;

  struct Result {
    std::string csv, slice, sidecar;
    LocalizationPoint point;
  };
  std::vector<Result> results(sweep.size());
  parallel_for(sweep.size(), [&](std::size_t i) {
    PotentialSpec spec = cfg.spec;
    spec.azimuthal = ComplexExpAzimuthal{sweep[i]};
    const Wavefunction wf = assemble(spec, cfg.kind, q, cfg.solver);
    const double r_peak = radial_peak(wf);
    const double r_max = d.r_max > 0.0 ? d.r_max : Defaults::density_r_factor * r_peak;
    DensityAxes axes;
    for (int k = 0; k < d.n_r; ++k) axes.r.push_back(r_max * (k + 1) / d.n_r);
    for (int k = 0; k < d.n_theta; ++k) axes.theta.push_back((k + 0.5) * kPi / d.n_theta);
    for (int k = 0; k < d.n_phi; ++k) axes.phi.push_back(2.0 * kPi * k / d.n_phi);
    results[i].csv = io::to_csv(io::density_table(density(wf, axes)));
    io::Table slice{{"phi", "density"}, {}};
    for (double p : axes.phi) slice.rows.push_back({p, density_at(wf, r_peak, 0.5 * kPi, p)});
    results[i].slice = io::to_csv(slice);
    results[i].point = localization_point(wf, sweep[i]);
    io::Json side = io::density_sidecar(wf, sweep[i]);
    side["ratio"] = io::round12(results[i].point.ratio);
    side["slice_file"] = "slice_a" + io::format_number(sweep[i]) + ".csv";
    results[i].sidecar = io::dump(side);
  });

  Outputs files;
  std::vector<LocalizationPoint> pts;
  io::Json j = run_header(cfg);
  j["quantum"] = quantum_json(q);
  j["sweep"] = io::Json::array();
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const std::string a = io::format_number(sweep[i]);
    files.add("density_a" + a + ".csv", results[i].csv);
    files.add("density_a" + a + ".json", results[i].sidecar);
    files.add("slice_a" + a + ".csv", results[i].slice);
    pts.push_back(results[i].point);
    j["sweep"].push_back({{"a", io::round12(sweep[i])},
                          {"ratio", io::round12(results[i].point.ratio)},
                          {"density_file", "density_a" + a + ".csv"},
                          {"sidecar", "density_a" + a + ".json"}});
  }
  files.add("localization.csv", io::to_csv(io::localization_table(pts)));
  const std::string text = io::dump(j);
  files.add("density.json", text);
  files.commit(c.out);
  if (c.json) {
    out << text;
  } else {
    out << "a,ratio\n";
    for (const auto& p : pts) out << io::format_number(p.a) << "," << io::format_number(p.ratio) << "\n";
  }
  return kOk;
}

void add_common(CLI::App* sub, Common& c, bool with_config) {
  if (with_config) {
    sub->add_option("--config", c.config, "YAML run configuration");
    sub->add_option("--preset", c.preset, "named preset instead of a config file");
  }
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--grid-n", c.grid_n, "azimuthal grid size (even)");
  sub->add_option("--tol", c.tol, "Dirac fixed-point tolerance");
  sub->add_flag("--json", c.json, "print the JSON result on stdout");
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("PSEUDO_PT_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError("PSEUDO_PT_THREADS must be a positive integer");
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Separable pseudo-PT-symmetric Schroedinger and Dirac problems", "pseudopt"};
  app.require_subcommand(1);
  Common common;
  bool k_probe = false;
  GenerateArgs gen;
  std::string sweep;

  auto* solve = app.add_subcommand("solve", "solve the configured states");
  add_common(solve, common, true);
  auto* check = app.add_subcommand("check", "report PT defects, single-valuedness and reality margins");
  add_common(check, common, true);
  check->add_flag("--k-probe", k_probe, "also report the K-branch single-valuedness violation");
  auto* generate = app.add_subcommand("generate", "build V_eff(phi) from a generating function");
  add_common(generate, common, false);
  generate->add_option("--form", gen.form, "cos, const, bessel or tabulated")
      ->required()
      ->check(CLI::IsMember({"cos", "const", "bessel", "tabulated"}));
  generate->add_option("--m", gen.m, "magnetic quantum number")->required();
  generate->add_option("--omega", gen.omega, "bessel generator coupling");
  generate->add_option("--table", gen.table, "CSV of F (phi, re, im) for --form tabulated");
  auto* dens = app.add_subcommand("density", "density grids and the localization table over an a-sweep");
  add_common(dens, common, true);
  dens->add_option("--sweep", sweep, "comma-separated couplings a");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kConfig;
  }

  try {
    if (*solve) return cmd_solve(common, out);
    if (*check) return cmd_check(common, k_probe, out);
    if (*generate) return cmd_generate(common, gen, out);
    return cmd_density(common, sweep, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const RealityViolation& e) {
    err << "reality violation: " << e.what() << "\n";
    return kReality;
  } catch (const Error& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kSolver;
  }
}

}  // namespace pseudopt::cli
