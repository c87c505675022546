#pragma once

// The polar eigenproblem
//   (1/sin t) (sin t Theta')' - (V_eff(t) + m^2)/sin^2 t Theta + Lambda Theta = 0.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pseudopt/symmetry.hpp"

namespace pseudopt {

struct ClosedFormParams {
  double rho = 0.0;
  double upsilon = 0.0;
  double b = 0.0;
  double d = 0.0;
  std::string y_map;  // "cos^2(theta/2)" or "cos^2(theta)"
};

/// Which part of (0, pi) the eigenfunction lives on. A 1/cos^2 pole at pi/2
/// decouples the two hemispheres; symmetric potentials then give even/odd pairs.
enum class ThetaSector { Full, Even, Odd, North, South };

const char* to_string(ThetaSector s);

struct AngularSolution {
  double Lambda = 0.0;
  int k_or_l = 0;  // l for the Legendre branch, k otherwise (index within the sector)
  int m = 0;
  ThetaSector sector = ThetaSector::Full;
  std::vector<double> theta;   // interior grid (i + 1/2) pi / n
  std::vector<double> values;  // Theta, normalized so that int Theta^2 sin(theta) dtheta = 1
  std::optional<ClosedFormParams> params;
  std::function<double(double)> at;
};

/// Midpoint grid theta_i = (i + 1/2) pi / n; never touches the poles or pi/2 for even n.
std::vector<double> theta_grid(int n);

/// Lambda = l(l+1), Theta = sqrt[(2l+1)(l-|m|)!/(2(l+|m|)!)] P_l^m(cos theta).
AngularSolution legendre_branch(int l, int m, int n_grid = 400);

/// V(theta) = 1/2: y = cos^2(theta/2), rho = upsilon = sqrt(m^2 + s)/2, b = k + 4 upsilon + 1,
/// d = 1 + 2 upsilon, Lambda = [(b+k)^2 - 1]/4, with s = E + M (Dirac) or 1/2 (Schroedinger).
AngularSolution theta_closed_form_half(const EquationKind& kind, double E, int m, int k, int n_grid = 400);

/// V(theta) = 1/(2 cos^2 theta): rho = 1/4 + sqrt(1 + 4s)/4, upsilon = sqrt(m^2 + s)/2,
/// b = k + 2(rho + upsilon) + 1/2, d = 2 rho + 1/2, Lambda = (b+k)^2 - 1/4 and
/// Theta = y^rho (1-y)^upsilon 2F1(-k, b; d; y) with y = cos^2 theta (even sector).
AngularSolution theta_closed_form_sec2(const EquationKind& kind, double E, int m, int k, int n_grid = 400);

/// Constant V_eff = c: Theta = sin^mu(theta) 2F1(-k, k + 2mu + 1; mu + 1; cos^2(theta/2)),
/// mu = sqrt(m^2 + c), Lambda = (k + mu)(k + mu + 1). Throws DomainError if m^2 + c < 0.
AngularSolution theta_closed_form_constant(double c, int m, int k, int n_grid = 400);

struct ThetaSolveOptions {
  int n_basis = 40;
  int n_grid = 400;
  bool refine_check = true;  // repeat with twice the basis and compare
  double refine_tol = 1e-4;
};

/// Spectral Galerkin solve in x = cos theta with the exact endpoint (and pole)
/// behaviour built into the basis; the discrete operator is real symmetric, so
/// Lambda is real. Returns the lowest n_modes eigenpairs sorted ascending.
std::vector<AngularSolution> solve_theta_numeric(const ThetaPotential& v_eff, double m_squared, int n_modes,
                                                 const ThetaSolveOptions& opt = {});

/// The angular solution for quantum number k_or_l of the given polar potential,
/// with V_eff scaled by `scale` and s = E + M (Dirac) or 1/2 (Schroedinger).
AngularSolution polar_solution(const PolarPotential& p, const EquationKind& kind, double E, int m, int k_or_l,
                               const ThetaSolveOptions& opt = {});

/// sup over interior nodes of the polar-equation residual multiplied through by
/// sin^2 theta (and by cos^2 theta when V_eff has a 1/cos^2 pole), divided by
/// sup|Theta|. The scaling keeps every term of order Theta next to the singular
/// points, where the unscaled terms grow like Theta/theta^2 and double-precision
/// differences cannot resolve them. Derivatives: sixth-order central differences
/// of `at` with step h, shrunk near the singular points.
double theta_residual(const AngularSolution& sol, const ThetaPotential& v_eff, double m_squared,
                      double h = 1e-3);

}  // namespace pseudopt
