#pragma once

// Potential model, the Dirac/Schroedinger effective-potential map and the
// azimuthal reflection (P) and conjugation (T) operators.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pseudopt/grid.hpp"

namespace pseudopt {

enum class Equation { Schroedinger, Dirac };

struct EquationKind {
  Equation kind = Equation::Schroedinger;
  double mass = 0.0;  // Dirac only

  static EquationKind schroedinger() { return {}; }
  static EquationKind dirac(double mass);
  bool is_dirac() const { return kind == Equation::Dirac; }
};

// ---- radial component ----
struct CoulombRadial {
  double strength = 1.0;  // V(r) = -strength / r
};
struct ZeroRadial {};
struct TabulatedRadial {
  std::vector<double> r;  // uniform spacing
  std::vector<double> v;
};
using RadialPotential = std::variant<CoulombRadial, ZeroRadial, TabulatedRadial>;

// ---- polar component ----
struct ZeroPolar {};
struct HalfPolar {};               // V(theta) = 1/2
struct InverseCosSquaredPolar {};  // V(theta) = 1 / (2 cos^2 theta)
struct ConstantPolar {
  double value = -1.0;  // V(theta) = value; the Hartmann variant uses -b^2
};
struct TabulatedPolar {
  std::vector<double> theta;  // uniform spacing, covering [0, pi]
  std::vector<double> v;
};
using PolarPotential =
    std::variant<ZeroPolar, HalfPolar, InverseCosSquaredPolar, ConstantPolar, TabulatedPolar>;

// ---- azimuthal component ----
/// Phi(phi) = e^{i m phi} F(phi); F periodic.
struct GeneratorFunction {
  PhiGrid values;
  int m = 0;
};
struct ComplexExpAzimuthal {
  double a = 0.0;  // V(phi) = -a^2 e^{i phi}
};
struct GeneratedAzimuthal {
  GeneratorFunction generator;
};
struct TabulatedAzimuthal {
  PhiGrid grid;
};
using AzimuthalPotential = std::variant<ComplexExpAzimuthal, GeneratedAzimuthal, TabulatedAzimuthal>;

struct PotentialSpec {
  RadialPotential radial = CoulombRadial{};
  PolarPotential polar = ZeroPolar{};
  AzimuthalPotential azimuthal = ComplexExpAzimuthal{};
};

struct QuantumNumbers {
  int n_r = 0;
  int k_or_l = 0;
  int m = 0;
};

struct SeparationConstants {
  Complex m_squared;
  Complex Lambda;
  double lambda = 0.0;
};

/// V_eff(theta) = smooth(theta) + pole_strength / cos^2 theta.
struct ThetaPotential {
  std::function<double(double)> smooth = [](double) { return 0.0; };
  double pole_strength = 0.0;
  /// Set when `smooth` is a known constant; lets callers pick closed forms.
  std::optional<double> constant_value = 0.0;

  double operator()(double theta) const;
};

struct EffectivePotentials {
  double scale = 1.0;  // 1 for Schroedinger, 2(E+M) for Dirac
  std::function<double(double)> radial;
  std::optional<double> coulomb_strength;  // set when V_eff(r) = -strength / r
  ThetaPotential theta;
  PhiGrid phi;
};

/// Schroedinger: identity. Dirac: every component multiplied by 2(E+M).
/// The azimuthal component is sampled on an n_phi-point periodic grid.
EffectivePotentials effective_potential(const PotentialSpec& spec, const EquationKind& kind, double E,
                                        int n_phi = 128);

/// lambda = E (Schroedinger) or E^2 - M^2 (Dirac).
double lambda_map(const EquationKind& kind, double E);

/// 2(E+M) for Dirac, 1 for Schroedinger. Throws DomainError if E + M <= 0.
double dirac_scale(const EquationKind& kind, double E);

/// Sample at phi_j replaced by the sample at 2 pi - phi_j.
PhiGrid apply_parity_phi(const PhiGrid& f);

/// Pointwise complex conjugation.
PhiGrid apply_timereversal_phi(const PhiGrid& f);

/// sup_j |conj(V(2 pi - phi_j)) - V(phi_j)| over samples whose pair is not excluded.
double pt_defect(const PhiGrid& v);

/// Reality tolerance for accepting a separation constant as real.
inline double reality_tolerance(Complex value) {
  return 1e-8 * std::max(1.0, std::abs(value.real()));
}
inline bool within_reality(Complex value) { return std::abs(value.imag()) < reality_tolerance(value); }

/// Component tags as written in configs ("coulomb", "half", "complex_exp", ...).
std::string radial_tag(const RadialPotential& p);
std::string polar_tag(const PolarPotential& p);
std::string azimuthal_tag(const AzimuthalPotential& p);

/// V_eff(r) = scale * V(r) as a callable.
std::function<double(double)> radial_function(const RadialPotential& v, double scale);

/// Effective theta potential without any energy dependence beyond `scale`.
ThetaPotential theta_potential(const PolarPotential& p, double scale);

/// V_eff(phi) on an n-point grid, before Dirac scaling.
PhiGrid azimuthal_grid(const AzimuthalPotential& a, int n);

}  // namespace pseudopt
