#pragma once

// CSV and JSON file contracts. CSV: comma separated, header row, LF endings,
// numbers printed with 12 significant digits. JSON: stable key order, numbers
// rounded to 12 significant digits so identical runs give identical bytes.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pseudopt/assembly.hpp"

namespace pseudopt::io {

using Json = nlohmann::ordered_json;

std::string format_number(double x);
double round12(double x);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string to_csv(const Table& t);
Table parse_csv(const std::string& text, const std::string& source = "csv");
Table read_csv(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Columns phi, re, im; excluded samples are written as nan.
Table phi_table(const PhiGrid& g);
PhiGrid phi_grid_from_table(const Table& t);

Table theta_table(const AngularSolution& s);
Table radial_table(const RadialSolution& s);
/// Columns r, theta, phi, density (phi fastest).
Table density_table(const DensityGrid& g);
/// Columns a, ratio.
Table localization_table(const std::vector<LocalizationPoint>& pts);

/// First two columns of a numeric table.
std::pair<std::vector<double>, std::vector<double>> xy_columns(const Table& t);

Json complex_json(Complex z);
Json state_json(const Wavefunction& wf);
/// Metadata accompanying a density CSV: quantum numbers, separation constants,
/// normalization constants, coupling and the slice used for localization.
Json density_sidecar(const Wavefunction& wf, double a);

std::string dump(const Json& j);

}  // namespace pseudopt::io
