#include "pseudopt/symmetry.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <cmath>
#include <memory>
#include <numbers>

#include "pseudopt/azimuthal.hpp"
#include "pseudopt/error.hpp"

namespace pseudopt {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;

// Cubic spline through uniformly spaced samples, clamped to the table's range.
std::function<double(double)> make_spline(const std::vector<double>& x, const std::vector<double>& y,
                                          const char* what) {
  if (x.size() != y.size() || x.size() < 4) {
    throw DomainError(std::string(what) + ": need at least 4 matching samples");
  }
  const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  if (!(h > 0.0)) throw DomainError(std::string(what) + ": abscissae must increase");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(y[i])) throw DomainError(std::string(what) + ": non-finite sample");
    if (std::abs(x[i] - (x.front() + i * h)) > 1e-9 * std::max(1.0, std::abs(x[i]))) {
      throw DomainError(std::string(what) + ": abscissae must be uniformly spaced");
    }
  }
  auto spline = std::make_shared<Spline>(y.begin(), y.end(), x.front(), h);
  const double lo = x.front(), hi = x.back();
  return [spline, lo, hi](double t) { return (*spline)(std::clamp(t, lo, hi)); };
}

}  // namespace

EquationKind EquationKind::dirac(double mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("Dirac mass must be finite and positive");
  return {Equation::Dirac, mass};
}

double ThetaPotential::operator()(double theta) const {
  double v = smooth(theta);
  if (pole_strength != 0.0) {
    const double c = std::cos(theta);
    v += pole_strength / (c * c);
  }
  return v;
}

double lambda_map(const EquationKind& kind, double E) {
  if (!kind.is_dirac()) return E;
  return E * E - kind.mass * kind.mass;
}

double dirac_scale(const EquationKind& kind, double E) {
  if (!kind.is_dirac()) return 1.0;
  if (!(E + kind.mass > 0.0)) {
    throw DomainError("effective potential: E + M = " + std::to_string(E + kind.mass) +
                      " must be positive");
  }
  return 2.0 * (E + kind.mass);
}

std::string radial_tag(const RadialPotential& p) {
  return std::visit(overloaded{[](const CoulombRadial&) { return std::string("coulomb"); },
                               [](const ZeroRadial&) { return std::string("zero"); },
                               [](const TabulatedRadial&) { return std::string("tabulated"); }},
                    p);
}

std::string azimuthal_tag(const AzimuthalPotential& p) {
  return std::visit(overloaded{[](const ComplexExpAzimuthal&) { return std::string("complex_exp"); },
                               [](const GeneratedAzimuthal&) { return std::string("generated"); },
                               [](const TabulatedAzimuthal&) { return std::string("tabulated"); }},
                    p);
}

std::string polar_tag(const PolarPotential& p) {
  return std::visit(overloaded{[](const ZeroPolar&) { return std::string("zero"); },
                               [](const HalfPolar&) { return std::string("half"); },
                               [](const InverseCosSquaredPolar&) { return std::string("inverse_cos_squared"); },
                               [](const ConstantPolar&) { return std::string("constant"); },
                               [](const TabulatedPolar&) { return std::string("tabulated"); }},
                    p);
}

std::function<double(double)> radial_function(const RadialPotential& v, double scale) {
  return std::visit(overloaded{[&](const CoulombRadial& c) -> std::function<double(double)> {
                                 const double g = c.strength * scale;
                                 return [g](double r) { return -g / r; };
                               },
                               [&](const ZeroRadial&) -> std::function<double(double)> {
                                 return [](double) { return 0.0; };
                               },
                               [&](const TabulatedRadial& t) -> std::function<double(double)> {
                                 auto f = make_spline(t.r, t.v, "tabulated V(r)");
                                 return [f, scale](double r) { return scale * f(r); };
                               }},
                    v);
}

ThetaPotential theta_potential(const PolarPotential& p, double scale) {
  ThetaPotential out;
  std::visit(overloaded{[&](const ZeroPolar&) {},
                        [&](const HalfPolar&) {
                          const double c = 0.5 * scale;
                          out.smooth = [c](double) { return c; };
                          out.constant_value = c;
                        },
                        [&](const InverseCosSquaredPolar&) { out.pole_strength = 0.5 * scale; },
                        [&](const ConstantPolar& cp) {
                          const double c = cp.value * scale;
                          out.smooth = [c](double) { return c; };
                          out.constant_value = c;
                        },
                        [&](const TabulatedPolar& tp) {
                          auto f = make_spline(tp.theta, tp.v, "tabulated V(theta)");
                          out.smooth = [f, scale](double t) { return scale * f(t); };
                          out.constant_value.reset();
                        }},
             p);
  return out;
}

PhiGrid azimuthal_grid(const AzimuthalPotential& a, int n) {
  return std::visit(
      overloaded{[&](const ComplexExpAzimuthal& ce) {
                   if (!(ce.a >= 0.0)) throw DomainError("complex_exp coupling a must be non-negative");
                   const double a2 = ce.a * ce.a;
                   return PhiGrid::sample(n, [a2](double phi) {
                     return -a2 * Complex{std::cos(phi), std::sin(phi)};
                   });
                 },
                 [&](const GeneratedAzimuthal& g) {
                   GeneratorFunction f = g.generator;
                   require_uniform(f.values);
                   if (f.values.size() != n) {
                     PhiGrid resampled = PhiGrid::uniform(n);
                     resampled.values = fourier_resample(f.values.values, n);
                     f.values = resampled;
                   }
                   return potential_from_generator(f);
                 },
                 [&](const TabulatedAzimuthal& t) {
                   require_uniform(t.grid);
                   for (const auto& v : t.grid.values) {
                     if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                       throw DomainError("tabulated V(phi) contains non-finite samples");
                     }
                   }
                   if (t.grid.size() == n) return t.grid;
                   PhiGrid out = PhiGrid::uniform(n);
                   out.values = fourier_resample(t.grid.values, n);
                   return out;
                 }},
      a);
}

EffectivePotentials effective_potential(const PotentialSpec& spec, const EquationKind& kind, double E,
                                        int n_phi) {
  EffectivePotentials out;
  out.scale = dirac_scale(kind, E);
  const double scale = out.scale;
  out.radial = radial_function(spec.radial, scale);
  if (const auto* c = std::get_if<CoulombRadial>(&spec.radial)) out.coulomb_strength = c->strength * scale;
  out.theta = theta_potential(spec.polar, scale);
  out.phi = azimuthal_grid(spec.azimuthal, n_phi);
  if (scale != 1.0) {
    for (int j = 0; j < out.phi.size(); ++j) {
      if (!out.phi.is_excluded(j)) out.phi.values[j] *= scale;
    }
  }
  return out;
}

PhiGrid apply_parity_phi(const PhiGrid& f) {
  require_uniform(f);
  const int n = f.size();
  PhiGrid out = f;
  for (int j = 0; j < n; ++j) {
    const int src = (n - j) % n;
    out.values[j] = f.values[src];
    if (!f.excluded.empty()) out.excluded[j] = f.excluded[src];
  }
  return out;
}

PhiGrid apply_timereversal_phi(const PhiGrid& f) {
  PhiGrid out = f;
  for (auto& v : out.values) v = std::conj(v);
  return out;
}

double pt_defect(const PhiGrid& v) {
  require_uniform(v);
  const int n = v.size();
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    const int r = (n - j) % n;
    if (v.is_excluded(j) || v.is_excluded(r)) continue;
    worst = std::max(worst, std::abs(std::conj(v.values[r]) - v.values[j]));
  }
  return worst;
}

}  // namespace pseudopt
