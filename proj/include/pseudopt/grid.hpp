#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pseudopt/specfun.hpp"

namespace pseudopt {

/// Complex samples on the uniform periodic grid phi_j = 2 pi j / N, j = 0..N-1.
/// The point phi = 2 pi is the wrap of phi = 0 and is not stored.
/// `excluded[j]` marks samples that carry no number (e.g. division by a zero of F).
struct PhiGrid {
  std::vector<double> phi;
  std::vector<Complex> values;
  std::vector<bool> excluded;  // empty means nothing excluded

  static PhiGrid uniform(int n);
  static PhiGrid sample(int n, const std::function<Complex(double)>& f);

  int size() const { return static_cast<int>(phi.size()); }
  bool is_excluded(int j) const { return !excluded.empty() && excluded[j]; }
  int excluded_count() const;
};

double phi_node(int j, int n);

/// Throws DomainError unless the grid is the uniform periodic grid with matching sizes.
void require_uniform(const PhiGrid& grid);

/// d^order/dphi^order of periodic samples by FFT. For even N the Nyquist mode is
/// dropped for odd orders.
std::vector<Complex> spectral_derivative(std::span<const Complex> values, int order);

/// Fourier coefficients c_k (k = 0..N/2-1, then -N/2..-1, FFT order) so that
/// f(phi_j) = sum_k c_k e^{i k phi_j}.
std::vector<Complex> fourier_coefficients(std::span<const Complex> values);

/// Inverse of fourier_coefficients.
std::vector<Complex> fourier_synthesis(std::span<const Complex> coeffs);

/// Wavenumber of FFT slot j on an N-point grid.
inline int wavenumber(int j, int n) { return j < (n + 1) / 2 ? j : j - n; }

/// Resample periodic samples onto a grid of n_new points by trigonometric interpolation.
std::vector<Complex> fourier_resample(std::span<const Complex> values, int n_new);

/// Evaluate the trigonometric interpolant of coefficients at an arbitrary phi.
Complex fourier_eval(std::span<const Complex> coeffs, double phi);

}  // namespace pseudopt
