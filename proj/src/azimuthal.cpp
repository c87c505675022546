#include "pseudopt/azimuthal.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <string>

#include "pseudopt/error.hpp"

namespace pseudopt {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kExclusion = 1e-10;
// Eigenvalues closer than this (relative) are treated as one cluster. Jordan
// blocks split numerically by about sqrt(eps * coupling), far below 1e-4.
constexpr double kClusterRadius = 1e-4;

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

Complex expi(double x) { return {std::cos(x), std::sin(x)}; }

double wrap_phi(double phi) {
  double w = std::fmod(phi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  return w;
}

// Fourier-space matrix of -d^2/dphi^2 - 2 i m d/dphi + V.
Matrix fourier_operator(std::span<const Complex> v, int m) {
  const int n = static_cast<int>(v.size());
  const std::vector<Complex> vhat = fourier_coefficients(v);
  Matrix h(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) h(j, l) = vhat[((j - l) % n + n) % n];
    const double k = wavenumber(j, n);
    h(j, j) += k * k + 2.0 * m * k;
  }
  return h;
}

struct Cluster {
  Complex mean;
  int size = 0;
};

std::vector<Cluster> cluster_eigenvalues(const Eigen::VectorXcd& ev) {
  const int n = static_cast<int>(ev.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double scale = std::max(1.0, std::max(std::abs(ev(i)), std::abs(ev(j))));
      if (std::abs(ev(i) - ev(j)) <= kClusterRadius * scale) parent[find(i)] = find(j);
    }
  }
  std::vector<Cluster> by_root(n);
  for (int i = 0; i < n; ++i) {
    Cluster& c = by_root[find(i)];
    c.mean += ev(i);
    c.size += 1;
  }
  std::vector<Cluster> out;
  for (auto& c : by_root) {
    if (c.size == 0) continue;
    c.mean /= static_cast<double>(c.size);
    out.push_back(c);
  }
  return out;
}

Eigen::VectorXcd eigenvalues_of(const Matrix& h) {
  Eigen::ComplexEigenSolver<Matrix> es(h, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigen-decomposition failed");
  return es.eigenvalues();
}

// Selected clusters, in return order, each expanded to its multiplicity.
std::vector<Cluster> select_modes(const Matrix& h, int n_modes) {
  std::vector<Cluster> clusters = cluster_eigenvalues(eigenvalues_of(h));
  std::stable_sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    return std::abs(a.mean.real()) < std::abs(b.mean.real());
  });
  std::vector<Cluster> picked;
  int count = 0;
  for (const auto& c : clusters) {
    if (count >= n_modes) break;
    Cluster take = c;
    take.size = std::min(c.size, n_modes - count);
    count += take.size;
    picked.push_back(take);
  }
  std::stable_sort(picked.begin(), picked.end(), [](const Cluster& a, const Cluster& b) {
    if (a.mean.real() != b.mean.real()) return a.mean.real() < b.mean.real();
    return a.mean.imag() < b.mean.imag();
  });
  return picked;
}

// Right singular vectors of (h - mu) with singular value below the threshold,
// smallest first; always at least one.
std::vector<Vector> null_vectors(const Matrix& h, Complex mu, int max_count) {
  const int n = static_cast<int>(h.rows());
  Matrix shifted = h - mu * Matrix::Identity(n, n);
  Eigen::BDCSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double threshold = 1e-9 * std::max(1.0, std::abs(mu));
  std::vector<Vector> out;
  for (int i = n - 1; i >= 0 && static_cast<int>(out.size()) < max_count; --i) {
    if (!out.empty() && sv(i) > threshold) break;
    out.push_back(svd.matrixV().col(i));
  }
  return out;
}

int nearest_integer_root(Complex m2) {
  const double re = std::max(0.0, m2.real());
  const int m = static_cast<int>(std::lround(std::sqrt(re)));
  return m;
}

AzimuthalSolution from_coefficients(const Vector& c, int n, Complex m2) {
  std::vector<Complex> coeffs(c.data(), c.data() + n);
  std::vector<Complex> values = fourier_synthesis(coeffs);
  std::vector<Complex> sq(n);
  for (int j = 0; j < n; ++j) sq[j] = std::norm(values[j]);
  const double integral = specfun::quad_periodic(sq).real();
  Complex factor = 1.0 / std::sqrt(integral);
  if (std::abs(values[0]) > 0.0) factor *= std::conj(values[0]) / std::abs(values[0]);
  for (auto& v : values) v *= factor;
  for (auto& cc : coeffs) cc *= factor;

  AzimuthalSolution sol;
  sol.m = nearest_integer_root(m2);
  sol.m_squared = m2;
  sol.values = PhiGrid::uniform(n);
  sol.values.values = std::move(values);
  sol.norm_constant = std::abs(factor);
  sol.provenance = Provenance::NumericSpectral;
  auto shared = std::make_shared<const std::vector<Complex>>(std::move(coeffs));
  sol.at = [shared](double phi) { return fourier_eval(*shared, wrap_phi(phi)); };
  return sol;
}

void require_unmasked(const PhiGrid& v, const char* who) {
  require_uniform(v);
  if (v.excluded_count() > 0) {
    throw DomainError(std::string(who) + ": potential has excluded samples; use the residual check instead");
  }
  for (const auto& x : v.values) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
      throw DomainError(std::string(who) + ": non-finite potential sample");
    }
  }
}

}  // namespace

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::ClosedFormBessel:
      return "closed_form_bessel";
    case Provenance::NumericSpectral:
      return "numeric_spectral";
    case Provenance::GeneratedF:
      return "generated_f";
  }
  return "unknown";
}

double pt_normalization(int m, double a, int n_quad) {
  if (n_quad < 64) throw DomainError("pt_normalization: n_quad must be at least 64");
  if (!(a >= 0.0)) throw DomainError("pt_normalization: a must be non-negative");
  const double order = 2.0 * std::abs(m);
  std::vector<Complex> sq(n_quad);
  for (int j = 0; j < n_quad; ++j) {
    const double phi = phi_node(j, n_quad);
    sq[j] = std::norm(specfun::bessel_i(order, 2.0 * a * expi(0.5 * phi)));
  }
  const double integral = specfun::quad_periodic(sq).real();
  if (!(integral > 1e-300)) {
    throw DomainError("pt_normalization: normalization integral underflows for m = " + std::to_string(m) +
                      ", a = " + std::to_string(a));
  }
  return 1.0 / std::sqrt(integral);
}

AzimuthalSolution analytic_phi_solution(int m, double a, int n_grid) {
  if (n_grid < 32) throw DomainError("analytic_phi_solution: n_grid must be at least 32");
  if (!(a >= 0.0)) throw DomainError("analytic_phi_solution: a must be non-negative");
  AzimuthalSolution sol;
  sol.m = m;
  sol.m_squared = Complex{static_cast<double>(m) * m, 0.0};
  sol.provenance = Provenance::ClosedFormBessel;
  const int am = std::abs(m);
  if (a == 0.0) {
    const double c = 1.0 / std::sqrt(2.0 * kPi);
    sol.norm_constant = c;
    sol.at = [c, am](double phi) { return c * expi(am * wrap_phi(phi)); };
  } else {
    const double c = pt_normalization(m, a, std::max(256, n_grid));
    const double order = 2.0 * am;
    sol.norm_constant = c;
    sol.at = [c, order, a](double phi) {
      return c * specfun::bessel_i(order, 2.0 * a * expi(0.5 * wrap_phi(phi)));
    };
  }
  sol.values = PhiGrid::sample(n_grid, sol.at);
  return sol;
}

double single_valuedness_defect(Branch branch, int m, double a, int n_samples) {
  if (n_samples < 1) throw DomainError("single_valuedness_defect: need samples");
  if (!(a >= 0.0)) throw DomainError("single_valuedness_defect: a must be non-negative");
  if (branch == Branch::K && !(a > 0.0)) throw DomainError("single_valuedness_defect: K branch needs a > 0");
  const double order = 2.0 * std::abs(m);
  double worst = 0.0;
  for (int j = 0; j < n_samples; ++j) {
    const double phi = phi_node(j, n_samples);
    const Complex z0 = 2.0 * a * expi(0.5 * phi);
    const Complex z1 = 2.0 * a * expi(0.5 * (phi + 2.0 * kPi));
    Complex w0, w1;
    if (branch == Branch::I) {
      w0 = specfun::bessel_i(order, z0);
      w1 = specfun::bessel_i(order, z1);
    } else {
      w0 = specfun::bessel_k(order, z0);
      w1 = specfun::bessel_k(order, z1);
    }
    worst = std::max(worst, std::abs(w1 - w0));
  }
  return worst;
}

std::vector<AzimuthalSolution> solve_phi_numeric(const PhiGrid& v_eff, int n_modes, const PhiSolveOptions& opt) {
  require_unmasked(v_eff, "solve_phi_numeric");
  const int n = v_eff.size();
  if (n_modes < 1 || n_modes > n / 4) {
    throw DomainError("solve_phi_numeric: n_modes must lie in [1, N/4] = [1, " + std::to_string(n / 4) + "]");
  }
  const Matrix h = fourier_operator(v_eff.values, 0);
  const std::vector<Cluster> picked = select_modes(h, n_modes);

  if (opt.refine_check) {
    const std::vector<Complex> fine = fourier_resample(v_eff.values, 2 * n);
    const std::vector<Cluster> ref = select_modes(fourier_operator(fine, 0), n_modes);
    std::vector<Complex> a, b;
    for (const auto& c : picked) a.insert(a.end(), c.size, c.mean);
    for (const auto& c : ref) b.insert(b.end(), c.size, c.mean);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i >= b.size() || std::abs(a[i] - b[i]) > opt.refine_tol) {
        throw ConvergenceError("solve_phi_numeric: grid too coarse, eigenvalue " + std::to_string(i) +
                               " moves under grid doubling");
      }
    }
  }

  std::vector<AzimuthalSolution> out;
  for (const auto& c : picked) {
    std::vector<Vector> vecs = null_vectors(h, c.mean, c.size);
    const bool defective = static_cast<int>(vecs.size()) < c.size;
    for (int i = 0; i < c.size; ++i) {
      const Vector& v = vecs[std::min<std::size_t>(i, vecs.size() - 1)];
      AzimuthalSolution sol = from_coefficients(v, n, c.mean);
      sol.defective = defective;
      out.push_back(std::move(sol));
    }
  }
  return out;
}

PhiGrid potential_from_generator(const GeneratorFunction& f) {
  require_uniform(f.values);
  const int n = f.values.size();
  PhiGrid out = PhiGrid::uniform(n);
  out.excluded.assign(n, false);
  int excluded = 0;
  for (int j = 0; j < n; ++j) {
    const Complex fj = f.values.values[j];
    if (!std::isfinite(fj.real()) || !std::isfinite(fj.imag())) {
      throw DomainError("potential_from_generator: non-finite F sample");
    }
    if (f.values.is_excluded(j) || std::abs(fj) < kExclusion) {
      out.excluded[j] = true;
      ++excluded;
    }
  }
  if (excluded * 5 > n) {
    throw DomainError("potential_from_generator: F vanishes on " + std::to_string(excluded) + " of " +
                      std::to_string(n) + " samples (more than 20%)");
  }
  const std::vector<Complex> d1 = spectral_derivative(f.values.values, 1);
  const std::vector<Complex> d2 = spectral_derivative(f.values.values, 2);
  const Complex two_im{0.0, 2.0 * f.m};
  for (int j = 0; j < n; ++j) {
    if (out.excluded[j]) {
      out.values[j] = Complex{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
      continue;
    }
    out.values[j] = (d2[j] + two_im * d1[j]) / f.values.values[j];
  }
  if (excluded == 0) out.excluded.clear();
  return out;
}

GeneratorFunction generator_from_potential(const PhiGrid& v_eff, int m) {
  require_unmasked(v_eff, "generator_from_potential");
  const int n = v_eff.size();
  const Matrix h = fourier_operator(v_eff.values, m);
  const Eigen::VectorXcd ev = eigenvalues_of(h);
  int best = 0;
  for (int i = 1; i < n; ++i) {
    if (std::abs(ev(i)) < std::abs(ev(best))) best = i;
  }
  Complex mean{0.0, 0.0};
  int count = 0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(ev(i) - ev(best)) <= kClusterRadius) {
      mean += ev(i);
      ++count;
    }
  }
  mean /= static_cast<double>(count);
  if (!(std::abs(mean) < 1e-8)) {
    throw DomainError("generator_from_potential: no single-valued F for m = " + std::to_string(m) +
                      " (nearest eigenvalue " + std::to_string(std::abs(mean)) + ")");
  }
  const Vector c = null_vectors(h, mean, 1).front();
  std::vector<Complex> values = fourier_synthesis(std::vector<Complex>(c.data(), c.data() + n));
  double peak = 0.0;
  int peak_at = 0;
  for (int j = 0; j < n; ++j) {
    if (std::abs(values[j]) > peak) {
      peak = std::abs(values[j]);
      peak_at = j;
    }
  }
  const Complex ref = std::abs(values[0]) > 1e-12 * peak ? values[0] : values[peak_at];
  const Complex phase = std::conj(ref) / std::abs(ref);
  for (auto& v : values) v *= phase / peak;
  GeneratorFunction g;
  g.m = m;
  g.values = PhiGrid::uniform(n);
  g.values.values = std::move(values);
  return g;
}

GeneratorFunction generator_cos(int m, int n_grid) {
  GeneratorFunction g;
  g.m = m;
  g.values = PhiGrid::sample(n_grid, [](double phi) { return Complex{std::cos(phi), 0.0}; });
  return g;
}

GeneratorFunction generator_const(int m, int n_grid) {
  GeneratorFunction g;
  g.m = m;
  g.values = PhiGrid::sample(n_grid, [](double) { return Complex{1.0, 0.0}; });
  return g;
}

GeneratorFunction generator_bessel(int m, double omega, int n_grid) {
  if (!(omega >= 0.0)) throw DomainError("generator_bessel: omega must be non-negative");
  GeneratorFunction g;
  g.m = m;
  const double order = 2.0 * std::abs(m);
  g.values = PhiGrid::sample(n_grid, [=](double phi) {
    return expi(-m * phi) * specfun::bessel_i(order, omega * expi(0.5 * phi));
  });
  return g;
}

double phi_residual(const PhiGrid& phi, const PhiGrid& v_eff, Complex m_squared) {
  require_uniform(phi);
  require_uniform(v_eff);
  if (phi.size() != v_eff.size()) throw DomainError("phi_residual: grid sizes differ");
  const std::vector<Complex> d2 = spectral_derivative(phi.values, 2);
  double worst = 0.0, scale = 0.0;
  for (int j = 0; j < phi.size(); ++j) {
    scale = std::max(scale, std::abs(phi.values[j]));
    if (phi.is_excluded(j) || v_eff.is_excluded(j)) continue;
    worst = std::max(worst, std::abs(d2[j] - v_eff.values[j] * phi.values[j] + m_squared * phi.values[j]));
  }
  if (scale == 0.0) throw DomainError("phi_residual: zero eigenfunction");
  return worst / scale;
}

double generator_membership_residual(const GeneratorFunction& f, const PhiGrid& v_eff) {
  PhiGrid phi = f.values;
  for (int j = 0; j < phi.size(); ++j) phi.values[j] *= expi(f.m * phi.phi[j]);
  return phi_residual(phi, v_eff, Complex{static_cast<double>(f.m) * f.m, 0.0});
}

}  // namespace pseudopt
