#pragma once

// Product wavefunctions chi_1 = R(r) Theta(theta) Phi(phi), their densities,
// the azimuthal localization statistic and the generator-family experiment.

#include <vector>

#include "pseudopt/azimuthal.hpp"
#include "pseudopt/polar.hpp"
#include "pseudopt/radial.hpp"
#include "pseudopt/symmetry.hpp"

namespace pseudopt {

struct AssemblyOptions {
  int n_phi = 128;
  double tol = 1e-12;  // Dirac fixed-point tolerance on E
  RadialOptions radial;
  ThetaSolveOptions theta;
  bool negative_branch = false;
};

struct Wavefunction {
  QuantumNumbers quantum;
  EquationKind kind;
  RadialSolution radial;
  AngularSolution angular;
  AzimuthalSolution azimuthal;
  SeparationConstants constants;
  double E = 0.0;           // lambda for Schroedinger, self-consistent energy for Dirac
  double total_norm = 1.0;  // int |chi|^2 r^2 sin(theta) dr dtheta dphi of the assembled product
};

/// Runs azimuthal -> polar -> radial (m^2 -> Lambda -> lambda); Dirac wraps the
/// chain in the energy fixed point. Throws RealityViolation if m^2 or Lambda
/// come out complex beyond tolerance.
Wavefunction assemble(const PotentialSpec& spec, const EquationKind& kind, const QuantumNumbers& q,
                      const AssemblyOptions& opt = {});

struct DensityAxes {
  std::vector<double> r, theta, phi;
};

/// |R|^2 |Theta|^2 |Phi|^2, R = U/r, stored with phi fastest: index (i_r * n_theta + i_theta) * n_phi + i_phi.
struct DensityGrid {
  DensityAxes axes;
  std::vector<double> values;
  double at(std::size_t ir, std::size_t it, std::size_t ip) const {
    return values[(ir * axes.theta.size() + it) * axes.phi.size() + ip];
  }
};

DensityGrid density(const Wavefunction& wf, const DensityAxes& axes);

/// |chi|^2 at one point.
double density_at(const Wavefunction& wf, double r, double theta, double phi);

/// int density r^2 sin(theta) dr dtheta dphi, evaluated as the product of the three
/// one-dimensional integrals of the separated factors.
double density_integral(const Wavefunction& wf);

/// Radius of the maximum of |R|^2 r^2 = U^2.
double radial_peak(const Wavefunction& wf);

struct LocalizationPoint {
  double a = 0.0;
  double ratio = 0.0;  // density(r_peak, pi/2, 0) / density(r_peak, pi/2, pi)
};

/// The ratio for an already assembled state.
LocalizationPoint localization_point(const Wavefunction& wf, double a);

/// One entry per coupling: the azimuthal component of spec_base is replaced by -a^2 e^{i phi}.
std::vector<LocalizationPoint> localization_ratio(const PotentialSpec& spec_base, const EquationKind& kind,
                                                  const QuantumNumbers& q, const std::vector<double>& a_values,
                                                  const AssemblyOptions& opt = {});

struct IsospectralReport {
  std::vector<double> lambdas;
  std::vector<double> membership_residuals;  // m^2 residual of each generated potential
  double max_delta = 0.0;
};

/// For each generator: builds V_eff(phi), checks that m^2 is an eigenvalue of it,
/// assembles the full problem and records lambda.
IsospectralReport isospectral_experiment(const std::vector<GeneratorFunction>& generators,
                                         const PotentialSpec& spec_base, const EquationKind& kind,
                                         const QuantumNumbers& q, const AssemblyOptions& opt = {});

}  // namespace pseudopt
