#pragma once

// Run configuration: a YAML tree with a schema_version field, plus the named presets.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pseudopt/assembly.hpp"

namespace pseudopt::cli {

// Every default in one place; the README reproduces this table.
struct Defaults {
  static constexpr int schema_version = 1;
  static constexpr int n_phi = 128;
  static constexpr int n_radial = 3000;
  static constexpr int n_theta_basis = 40;
  static constexpr int n_theta_grid = 400;
  static constexpr double tol = 1e-12;
  static constexpr double pt_threshold = 1e-12;
  static constexpr double single_valued_threshold = 1e-10;
  static constexpr double membership_threshold = 1e-7;
  static constexpr int density_n_r = 40;
  static constexpr int density_n_theta = 24;
  static constexpr int density_n_phi = 64;
  static constexpr double density_r_factor = 4.0;  // r axis spans (0, factor * radial peak]
};

struct DensitySettings {
  std::vector<double> sweep;
  int n_r = Defaults::density_n_r;
  int n_theta = Defaults::density_n_theta;
  int n_phi = Defaults::density_n_phi;
  double r_max = 0.0;  // 0: factor * radial peak
};

/// A generator given by name, kept so that a grid override can resample it.
struct NamedGenerator {
  std::string form;  // cos, const, bessel
  int m = 0;
  double omega = 0.0;
};

GeneratorFunction make_generator(const NamedGenerator& g, int n);

struct RunConfig {
  std::string name;
  std::optional<NamedGenerator> generator;
  PotentialSpec spec;
  EquationKind kind;
  std::vector<int> n_r{0}, k_or_l{0}, m{0};
  AssemblyOptions solver;
  DensitySettings density;
};

/// Parses a YAML document. Relative table paths resolve against `base_dir`.
/// Throws ConfigError with the offending line.
RunConfig parse_config(const std::string& text, const std::string& source, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

std::vector<std::string> preset_names();
/// The YAML text of a preset; throws ConfigError for unknown names.
std::string preset_text(const std::string& name);
RunConfig load_preset(const std::string& name);

/// All (n_r, k_or_l, m) combinations, sorted; with the Legendre branch (V(theta) = 0)
/// combinations with |m| > l are skipped.
std::vector<QuantumNumbers> states(const RunConfig& cfg);

/// Command-line overrides: --grid-n sets the azimuthal grid, --tol the fixed-point tolerance.
void apply_grid_n(RunConfig& cfg, int n);
void apply_tol(RunConfig& cfg, double tol);

}  // namespace pseudopt::cli
