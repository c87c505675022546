#include "pseudopt/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pseudopt/error.hpp"

namespace pseudopt {

double phi_node(int j, int n) { return 2.0 * std::numbers::pi * j / n; }

PhiGrid PhiGrid::uniform(int n) {
  if (n < 1) throw DomainError("PhiGrid: size must be positive");
  PhiGrid g;
  g.phi.resize(n);
  g.values.assign(n, Complex{0.0, 0.0});
  for (int j = 0; j < n; ++j) g.phi[j] = phi_node(j, n);
  return g;
}

PhiGrid PhiGrid::sample(int n, const std::function<Complex(double)>& f) {
  PhiGrid g = uniform(n);
  for (int j = 0; j < n; ++j) g.values[j] = f(g.phi[j]);
  return g;
}

int PhiGrid::excluded_count() const {
  int c = 0;
  for (bool e : excluded) c += e ? 1 : 0;
  return c;
}

void require_uniform(const PhiGrid& grid) {
  const int n = grid.size();
  if (n < 1) throw DomainError("phi grid is empty");
  if (static_cast<int>(grid.values.size()) != n) {
    throw DomainError("phi grid: " + std::to_string(grid.values.size()) + " values for " +
                      std::to_string(n) + " nodes");
  }
  if (!grid.excluded.empty() && static_cast<int>(grid.excluded.size()) != n) {
    throw DomainError("phi grid: exclusion mask has wrong size");
  }
  const double h = 2.0 * std::numbers::pi / n;
  for (int j = 0; j < n; ++j) {
    if (std::abs(grid.phi[j] - j * h) > 1e-9 * std::max(1.0, j * h)) {
      throw DomainError("phi grid is not the uniform periodic grid (node " + std::to_string(j) + ")");
    }
  }
}

std::vector<Complex> fourier_coefficients(std::span<const Complex> values) {
  Eigen::FFT<double> fft;
  std::vector<Complex> in(values.begin(), values.end());
  std::vector<Complex> out;
  fft.fwd(out, in);
  const double inv = 1.0 / static_cast<double>(values.size());
  for (auto& c : out) c *= inv;
  return out;
}

std::vector<Complex> fourier_synthesis(std::span<const Complex> coeffs) {
  Eigen::FFT<double> fft;
  std::vector<Complex> in(coeffs.begin(), coeffs.end());
  std::vector<Complex> out;
  fft.inv(out, in);
  const double n = static_cast<double>(coeffs.size());
  for (auto& v : out) v *= n;
  return out;
}

std::vector<Complex> spectral_derivative(std::span<const Complex> values, int order) {
  if (order < 0) throw DomainError("spectral_derivative: negative order");
  const int n = static_cast<int>(values.size());
  if (n < 2) throw DomainError("spectral_derivative: need at least 2 samples");
  std::vector<Complex> c = fourier_coefficients(values);
  // Coefficients at the FFT rounding floor carry no signal; dropping them keeps
  // the k^order amplification from turning that noise into derivative error.
  double peak = 0.0;
  for (const auto& x : c) peak = std::max(peak, std::abs(x));
  for (auto& x : c) {
    if (order > 0 && std::abs(x) <= 2e-15 * peak) x = 0.0;
  }
  for (int j = 0; j < n; ++j) {
    const int k = wavenumber(j, n);
    if (n % 2 == 0 && j == n / 2 && order % 2 == 1) {
      c[j] = 0.0;
      continue;
    }
    Complex factor{1.0, 0.0};
    for (int p = 0; p < order; ++p) factor *= Complex{0.0, static_cast<double>(k)};
    c[j] *= factor;
  }
  return fourier_synthesis(c);
}

std::vector<Complex> fourier_resample(std::span<const Complex> values, int n_new) {
  const int n = static_cast<int>(values.size());
  if (n_new < n) throw DomainError("fourier_resample: only refinement is supported");
  const std::vector<Complex> c = fourier_coefficients(values);
  std::vector<Complex> padded(n_new, Complex{0.0, 0.0});
  for (int j = 0; j < n; ++j) {
    const int k = wavenumber(j, n);
    if (n % 2 == 0 && j == n / 2) {
      // split the Nyquist mode symmetrically so real data stays real
      padded[n / 2] += 0.5 * c[j];
      padded[n_new - n / 2] += 0.5 * c[j];
      continue;
    }
    padded[k >= 0 ? k : n_new + k] += c[j];
  }
  return fourier_synthesis(padded);
}

Complex fourier_eval(std::span<const Complex> coeffs, double phi) {
  const int n = static_cast<int>(coeffs.size());
  Complex sum{0.0, 0.0};
  for (int j = 0; j < n; ++j) {
    if (n % 2 == 0 && j == n / 2) {
      sum += coeffs[j] * std::cos(0.5 * n * phi);
      continue;
    }
    sum += coeffs[j] * std::exp(Complex{0.0, wavenumber(j, n) * phi});
  }
  return sum;
}

}  // namespace pseudopt
