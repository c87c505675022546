#pragma once

// The radial eigenproblem for U = r R:  -U'' + [Lambda/r^2 + V_eff(r)] U = lambda U,
// U(0) = U(r_max) = 0. Units hbar = 2m = 1, so hydrogen gives lambda = -1/(4N^2).

#include <functional>
#include <optional>
#include <vector>

#include "pseudopt/polar.hpp"
#include "pseudopt/symmetry.hpp"

namespace pseudopt {

struct RadialSolution {
  double lambda = 0.0;
  int n_r = 0;
  std::vector<double> r;  // includes r = 0 and r = r_max
  std::vector<double> U;  // normalized: int U^2 dr = 1
  double Lambda_input = 0.0;
  std::optional<double> E;  // Dirac only
  int iterations = 0;       // fixed-point iterations (Dirac)
  bool analytic = false;    // U from the Coulomb closed form
  std::function<double(double)> at;
};

/// l' = (-1 + sqrt(1 + 4 Lambda))/2. Throws DomainError for Lambda < -1/4.
double effective_l(double Lambda);

/// -strength^2 / [4 (n_r + l' + 1)^2].
double coulomb_lambda(double Lambda, int n_r, double strength);

/// 80/strength * max(1, N): the box grows with the decay length N/strength, so h q stays fixed.
double default_r_max(double strength, double N);

/// Lowest n_states eigenpairs of the symmetric three-point discretization on
/// n_grid interior nodes. Throws ConvergenceError if fewer than n_states bound
/// states exist or if a returned U has not decayed below 1e-8 of its peak over
/// the last 5% of the box.
std::vector<RadialSolution> solve_radial_numeric(const std::function<double(double)>& v_eff, double Lambda,
                                                 int n_states, double r_max, int n_grid = 3000);

/// Closed-form Coulomb state U = r^{l'+1} e^{-q r} L_{n_r}^{(2l'+1)}(2 q r), q = strength/(2N),
/// sampled on n_grid + 2 points of [0, r_max] (r_max <= 0 selects the default).
RadialSolution coulomb_radial_solution(double Lambda, int n_r, double strength, double r_max = 0.0,
                                       int n_grid = 3000);

struct RadialOptions {
  int n_grid = 3000;
  double r_max = 0.0;           // 0: default for Coulomb, table end for tabulated
  bool numeric_coulomb = false; // solve Coulomb numerically instead of the closed form
};

/// The n_r-th state of a radial potential scaled by `scale`.
RadialSolution radial_solution(const RadialPotential& v, double scale, double Lambda, int n_r,
                               const RadialOptions& opt = {});

struct DiracOptions {
  int max_iter = 200;
  bool negative_branch = false;
  std::optional<double> E0;  // default: M
  RadialOptions radial;
  ThetaSolveOptions theta;
};

/// Fixed point E -> sqrt(lambda(E) + M^2) with V_eff = 2(E+M)V and Lambda(E)
/// refreshed every step; damped by 1/2 whenever the step grows.
RadialSolution dirac_self_consistent(const PotentialSpec& spec, double M, const QuantumNumbers& q, double tol,
                                     const DiracOptions& opt = {});

}  // namespace pseudopt
