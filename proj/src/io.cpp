#include "pseudopt/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pseudopt/error.hpp"

namespace pseudopt::io {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // no negative zero in output
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) out += ',';
    out += t.header[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i] == 0.0 ? 0.0 : row[i]);
    }
    out += '\n';
  }
  return out;
}

Table parse_csv(const std::string& text, const std::string& source) {
  Table t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ConfigError(source + ": expected " + std::to_string(t.header.size()) + " columns", lineno);
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0') throw ConfigError(source + ": not a number: '" + c + "'", lineno);
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw ConfigError(source + ": empty table");
  return t;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str(), path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
  if (!f) throw Error("write failed: " + path.string());
}

Table phi_table(const PhiGrid& g) {
  Table t{{"phi", "re", "im"}, {}};
  for (int j = 0; j < g.size(); ++j) {
    const double nan = std::nan("");
    const Complex v = g.is_excluded(j) ? Complex{nan, nan} : g.values[j];
    t.rows.push_back({g.phi[j], v.real(), v.imag()});
  }
  return t;
}

PhiGrid phi_grid_from_table(const Table& t) {
  if (t.header.size() < 3) throw ConfigError("phi table needs columns phi, re, im");
  PhiGrid g;
  for (const auto& row : t.rows) {
    g.phi.push_back(row[0]);
    g.values.emplace_back(row[1], row[2]);
  }
  bool any = false;
  std::vector<bool> ex(g.values.size(), false);
  for (std::size_t j = 0; j < ex.size(); ++j) {
    if (std::isnan(g.values[j].real()) || std::isnan(g.values[j].imag())) ex[j] = any = true;
  }
  if (any) g.excluded = ex;
  try {
    require_uniform(g);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return g;
}

Table theta_table(const AngularSolution& s) {
  Table t{{"theta", "value"}, {}};
  for (std::size_t i = 0; i < s.theta.size(); ++i) t.rows.push_back({s.theta[i], s.values[i]});
  return t;
}

Table radial_table(const RadialSolution& s) {
  Table t{{"r", "U"}, {}};
  for (std::size_t i = 0; i < s.r.size(); ++i) t.rows.push_back({s.r[i], s.U[i]});
  return t;
}

Table density_table(const DensityGrid& g) {
  Table t{{"r", "theta", "phi", "density"}, {}};
  t.rows.reserve(g.values.size());
  for (std::size_t i = 0; i < g.axes.r.size(); ++i) {
    for (std::size_t j = 0; j < g.axes.theta.size(); ++j) {
      for (std::size_t k = 0; k < g.axes.phi.size(); ++k) {
        t.rows.push_back({g.axes.r[i], g.axes.theta[j], g.axes.phi[k], g.at(i, j, k)});
      }
    }
  }
  return t;
}

Table localization_table(const std::vector<LocalizationPoint>& pts) {
  Table t{{"a", "ratio"}, {}};
  for (const auto& p : pts) t.rows.push_back({p.a, p.ratio});
  return t;
}

std::pair<std::vector<double>, std::vector<double>> xy_columns(const Table& t) {
  if (t.header.size() < 2) throw ConfigError("table needs at least two columns");
  std::pair<std::vector<double>, std::vector<double>> out;
  for (const auto& row : t.rows) {
    out.first.push_back(row[0]);
    out.second.push_back(row[1]);
  }
  return out;
}

Json complex_json(Complex z) {
  Json j;
  j["re"] = round12(z.real());
  j["im"] = round12(z.imag());
  return j;
}

Json state_json(const Wavefunction& wf) {
  Json j;
  j["n_r"] = wf.quantum.n_r;
  j["k_or_l"] = wf.quantum.k_or_l;
  j["m"] = wf.quantum.m;
  j["equation"] = wf.kind.is_dirac() ? "dirac" : "schroedinger";
  if (wf.kind.is_dirac()) j["mass"] = round12(wf.kind.mass);
  j["m_squared"] = complex_json(wf.constants.m_squared);
  j["Lambda"] = round12(wf.constants.Lambda.real());
  j["lambda"] = round12(wf.constants.lambda);
  j["E"] = round12(wf.E);
  j["effective_l"] = round12(effective_l(wf.angular.Lambda));
  j["azimuthal"] = {{"provenance", to_string(wf.azimuthal.provenance)},
                    {"norm_constant", round12(wf.azimuthal.norm_constant)},
                    {"defective", wf.azimuthal.defective}};
  Json polar;
  polar["sector"] = to_string(wf.angular.sector);
  if (wf.angular.params) {
    polar["rho"] = round12(wf.angular.params->rho);
    polar["upsilon"] = round12(wf.angular.params->upsilon);
    polar["b"] = round12(wf.angular.params->b);
    polar["d"] = round12(wf.angular.params->d);
    polar["y_map"] = wf.angular.params->y_map;
  }
  j["polar"] = polar;
  j["radial"] = {{"n_r", wf.radial.n_r}, {"analytic", wf.radial.analytic}, {"iterations", wf.radial.iterations}};
  j["total_norm"] = round12(wf.total_norm);
  return j;
}

Json density_sidecar(const Wavefunction& wf, double a) {
  Json j;
  j["a"] = round12(a);
  j["n"] = wf.quantum.n_r + wf.quantum.k_or_l + 1;
  j["state"] = state_json(wf);
  const double r_peak = radial_peak(wf);
  j["slice"] = {{"r", round12(r_peak)}, {"theta", round12(0.5 * std::numbers::pi)}};
  j["columns"] = {"r", "theta", "phi", "density"};
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace pseudopt::io
