#pragma once

// The azimuthal eigenproblem -Phi'' + V_eff(phi) Phi = m^2 Phi on the circle.

#include <functional>
#include <vector>

#include "pseudopt/grid.hpp"
#include "pseudopt/symmetry.hpp"

namespace pseudopt {

enum class Provenance { ClosedFormBessel, NumericSpectral, GeneratedF };

const char* to_string(Provenance p);

struct AzimuthalSolution {
  int m = 0;
  Complex m_squared;
  PhiGrid values;            // Phi on the periodic grid
  double norm_constant = 0;  // C, real positive
  Provenance provenance = Provenance::NumericSpectral;
  /// True when the eigenvalue belongs to a Jordan block: the +-m pair shares one
  /// eigenvector and the returned vector is repeated.
  bool defective = false;
  /// Phi at an arbitrary angle (closed form or trigonometric interpolant).
  std::function<Complex(double)> at;
};

/// Phi = C I_{2|m|}(2 a e^{i phi/2}) solving Phi'' + a^2 e^{i phi} Phi + m^2 Phi = 0.
/// For a = 0 the a -> 0 limit e^{i|m|phi}/sqrt(2 pi) is returned.
AzimuthalSolution analytic_phi_solution(int m, double a, int n_grid = 128);

enum class Branch { I, K };

/// max over phi samples of |W(2a e^{i(phi+2pi)/2}) - W(2a e^{i phi/2})|, W = I_{2|m|} or K_{2|m|}.
double single_valuedness_defect(Branch branch, int m, double a, int n_samples = 64);

/// C = [ int_0^{2pi} |I_{2|m|}(2a e^{i phi/2})|^2 dphi ]^{-1/2}.
double pt_normalization(int m, double a, int n_quad = 256);

struct PhiSolveOptions {
  bool refine_check = true;  // re-solve on a doubled grid and compare
  double refine_tol = 1e-6;
};

/// Dense spectral solve of -Phi'' + V Phi = m^2 Phi; returns the n_modes
/// eigenvalues of smallest |Re m^2|, sorted by Re then Im. The `m` field is
/// the nearest integer to sqrt(Re m^2) (0 if that is not a perfect square).
std::vector<AzimuthalSolution> solve_phi_numeric(const PhiGrid& v_eff, int n_modes,
                                                 const PhiSolveOptions& opt = {});

/// V = (F'' + 2 i m F') / F by spectral differentiation; samples with |F| < 1e-10
/// are excluded. Throws DomainError when more than 20% of the grid is excluded.
PhiGrid potential_from_generator(const GeneratorFunction& f);

/// Periodic F solving F'' + 2 i m F' - V F = 0, scaled to max|F| = 1 with F(0) real positive.
GeneratorFunction generator_from_potential(const PhiGrid& v_eff, int m);

/// Named generators: cos phi, the constant 1, and e^{-i m phi} I_{2|m|}(omega e^{i phi/2}).
GeneratorFunction generator_cos(int m, int n_grid);
GeneratorFunction generator_const(int m, int n_grid);
GeneratorFunction generator_bessel(int m, double omega, int n_grid);

/// sup over non-excluded samples of |Phi'' - V Phi + m^2 Phi| / sup|Phi|,
/// derivatives taken spectrally.
double phi_residual(const PhiGrid& phi, const PhiGrid& v_eff, Complex m_squared);

/// Residual of Phi = e^{i m phi} F against V: checks that m^2 belongs to the
/// spectrum of a potential generated from F, even where V has excluded poles.
double generator_membership_residual(const GeneratorFunction& f, const PhiGrid& v_eff);

}  // namespace pseudopt
