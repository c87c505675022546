#include "pseudopt/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "pseudopt/error.hpp"

namespace pseudopt {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMembershipTol = 1e-7;

Complex expi(double x) { return {std::cos(x), std::sin(x)}; }

AzimuthalSolution generated_solution(const GeneratorFunction& g) {
  require_uniform(g.values);
  const int n = g.values.size();
  std::vector<Complex> phi(n);
  for (int j = 0; j < n; ++j) phi[j] = expi(g.m * g.values.phi[j]) * g.values.values[j];
  std::vector<Complex> sq(n);
  for (int j = 0; j < n; ++j) sq[j] = std::norm(phi[j]);
  const double integral = specfun::quad_periodic(sq).real();
  if (!(integral > 0.0)) throw DomainError("generated azimuthal solution vanishes identically");
  Complex factor = 1.0 / std::sqrt(integral);
  if (std::abs(phi[0]) > 0.0) factor *= std::conj(phi[0]) / std::abs(phi[0]);
  for (auto& v : phi) v *= factor;
  AzimuthalSolution sol;
  sol.m = g.m;
  sol.m_squared = Complex{static_cast<double>(g.m) * g.m, 0.0};
  sol.provenance = Provenance::GeneratedF;
  sol.norm_constant = std::abs(factor);
  sol.values = PhiGrid::uniform(n);
  sol.values.values = phi;
  auto coeffs = std::make_shared<const std::vector<Complex>>(fourier_coefficients(phi));
  sol.at = [coeffs](double p) {
    double w = std::fmod(p, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return fourier_eval(*coeffs, w);
  };
  return sol;
}

AzimuthalSolution azimuthal_sector(const PotentialSpec& spec, double scale, int m, const AssemblyOptions& opt) {
  if (const auto* ce = std::get_if<ComplexExpAzimuthal>(&spec.azimuthal)) {
    if (!(ce->a >= 0.0)) throw DomainError("complex_exp coupling a must be non-negative");
    // scale * a^2 = a_eff^2
    return analytic_phi_solution(m, ce->a * std::sqrt(scale), opt.n_phi);
  }
  if (const auto* gen = std::get_if<GeneratedAzimuthal>(&spec.azimuthal)) {
    if (gen->generator.m != m) {
      throw DomainError("generator built for m = " + std::to_string(gen->generator.m) + " used with m = " +
                        std::to_string(m));
    }
    PhiGrid v = potential_from_generator(gen->generator);
    for (int j = 0; j < v.size(); ++j) {
      if (!v.is_excluded(j)) v.values[j] *= scale;
    }
    const double res = generator_membership_residual(gen->generator, v);
    if (!(res < kMembershipTol)) {
      throw DomainError("m^2 = " + std::to_string(m * m) + " is not an eigenvalue of the generated potential " +
                        "(residual " + std::to_string(res) + ")");
    }
    return generated_solution(gen->generator);
  }
  PhiGrid v = azimuthal_grid(spec.azimuthal, opt.n_phi);
  for (auto& x : v.values) x *= scale;
  const int n_modes = std::min(v.size() / 4, 2 * std::abs(m) + 1);
  auto sols = solve_phi_numeric(v, n_modes);
  const double target = static_cast<double>(m) * m;
  const AzimuthalSolution* best = nullptr;
  for (const auto& s : sols) {
    if (!best || std::abs(s.m_squared - target) < std::abs(best->m_squared - target)) best = &s;
  }
  if (!best || std::abs(best->m_squared.real() - target) > 1e-6) {
    throw DomainError("tabulated V(phi) has no eigenvalue m^2 = " + std::to_string(m * m));
  }
  if (!within_reality(best->m_squared)) {
    throw RealityViolation("azimuthal eigenvalue m^2 has imaginary part " + std::to_string(best->m_squared.imag()));
  }
  AzimuthalSolution out = *best;
  out.m = m;
  return out;
}

// Composite Gauss-Legendre on [a, b] with `panels` panels of `order` nodes.
template <class F>
double integrate(F f, double a, double b, int panels, int order) {
  static thread_local specfun::GaussRule rule;
  if (static_cast<int>(rule.nodes.size()) != order) rule = specfun::gauss_jacobi(order, 0.0, 0.0);
  const double w = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * w;
    for (int i = 0; i < order; ++i) sum += rule.weights[i] * f(lo + 0.5 * w * (rule.nodes[i] + 1.0));
  }
  return 0.5 * w * sum;
}

}  // namespace

Wavefunction assemble(const PotentialSpec& spec, const EquationKind& kind, const QuantumNumbers& q,
                      const AssemblyOptions& opt) {
  if (q.n_r < 0 || q.k_or_l < 0) throw DomainError("assemble: quantum numbers must be non-negative");
  Wavefunction wf;
  wf.quantum = q;
  wf.kind = kind;
  if (kind.is_dirac()) {
    DiracOptions d;
    d.radial = opt.radial;
    d.theta = opt.theta;
    d.negative_branch = opt.negative_branch;
    wf.radial = dirac_self_consistent(spec, kind.mass, q, opt.tol, d);
    wf.E = wf.radial.E.value_or(kind.mass);
  }
  const double scale = dirac_scale(kind, kind.is_dirac() ? wf.E : 0.0);
  wf.azimuthal = azimuthal_sector(spec, scale, q.m, opt);
  if (!within_reality(wf.azimuthal.m_squared)) {
    throw RealityViolation("m^2 has imaginary part " + std::to_string(wf.azimuthal.m_squared.imag()));
  }
  wf.angular = polar_solution(spec.polar, kind, wf.E, q.m, q.k_or_l, opt.theta);
  if (!kind.is_dirac()) {
    wf.radial = radial_solution(spec.radial, 1.0, wf.angular.Lambda, q.n_r, opt.radial);
    wf.E = wf.radial.lambda;
  }
  wf.constants = {wf.azimuthal.m_squared, Complex{wf.angular.Lambda, 0.0}, wf.radial.lambda};
  if (!wf.radial.at) throw DomainError("assemble: no bound radial state (zero binding strength)");
  wf.total_norm = std::sqrt(density_integral(wf));
  return wf;
}

double density_at(const Wavefunction& wf, double r, double theta, double phi) {
  const double rr = std::max(r, 1e-12);
  const double R = wf.radial.at(rr) / rr;
  const double T = wf.angular.at(theta);
  return R * R * T * T * std::norm(wf.azimuthal.at(phi));
}

DensityGrid density(const Wavefunction& wf, const DensityAxes& axes) {
  DensityGrid g;
  g.axes = axes;
  const std::size_t nr = axes.r.size(), nt = axes.theta.size(), np = axes.phi.size();
  std::vector<double> rad(nr), pol(nt), azi(np);
  for (std::size_t i = 0; i < nr; ++i) {
    const double rr = std::max(axes.r[i], 1e-12);
    const double R = wf.radial.at(rr) / rr;
    rad[i] = R * R;
  }
  for (std::size_t i = 0; i < nt; ++i) {
    const double T = wf.angular.at(axes.theta[i]);
    pol[i] = T * T;
  }
  for (std::size_t i = 0; i < np; ++i) azi[i] = std::norm(wf.azimuthal.at(axes.phi[i]));
  g.values.resize(nr * nt * np);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      for (std::size_t k = 0; k < np; ++k) g.values[(i * nt + j) * np + k] = rad[i] * pol[j] * azi[k];
    }
  }
  return g;
}

double density_integral(const Wavefunction& wf) {
  const double r_max = wf.radial.r.empty() ? 0.0 : wf.radial.r.back();
  if (!(r_max > 0.0)) throw DomainError("density_integral: radial solution has no grid");
  const auto& U = wf.radial.at;
  const double radial = integrate([&](double r) { return U(r) * U(r); }, 0.0, r_max, 400, 8);
  const auto& T = wf.angular.at;
  auto pol = [&](double t) { return T(t) * T(t) * std::sin(t); };
  const double polar = integrate(pol, 0.0, 0.5 * kPi, 25, 8) + integrate(pol, 0.5 * kPi, kPi, 25, 8);
  const int n_phi = 256;
  std::vector<Complex> sq(n_phi);
  for (int j = 0; j < n_phi; ++j) sq[j] = std::norm(wf.azimuthal.at(phi_node(j, n_phi)));
  const double azimuthal = specfun::quad_periodic(sq).real();
  return radial * polar * azimuthal;
}

double radial_peak(const Wavefunction& wf) {
  double best = 0.0, at = 0.0;
  for (std::size_t i = 0; i < wf.radial.r.size(); ++i) {
    const double u2 = wf.radial.U[i] * wf.radial.U[i];
    if (u2 > best) {
      best = u2;
      at = wf.radial.r[i];
    }
  }
  return at;
}

LocalizationPoint localization_point(const Wavefunction& wf, double a) {
  const double r = radial_peak(wf);
  const double num = density_at(wf, r, 0.5 * kPi, 0.0);
  const double den = density_at(wf, r, 0.5 * kPi, kPi);
  if (!(den > 0.0)) throw DomainError("localization_ratio: density vanishes at phi = pi");
  return {a, num / den};
}

std::vector<LocalizationPoint> localization_ratio(const PotentialSpec& spec_base, const EquationKind& kind,
                                                  const QuantumNumbers& q, const std::vector<double>& a_values,
                                                  const AssemblyOptions& opt) {
  std::vector<LocalizationPoint> out;
  double prev = -1.0;
  for (double a : a_values) {
    if (!(a >= 0.0)) throw DomainError("localization_ratio: a must be non-negative");
    if (a < prev) throw DomainError("localization_ratio: a values must be ascending");
    prev = a;
    PotentialSpec spec = spec_base;
    spec.azimuthal = ComplexExpAzimuthal{a};
    out.push_back(localization_point(assemble(spec, kind, q, opt), a));
  }
  return out;
}

IsospectralReport isospectral_experiment(const std::vector<GeneratorFunction>& generators,
                                         const PotentialSpec& spec_base, const EquationKind& kind,
                                         const QuantumNumbers& q, const AssemblyOptions& opt) {
  if (generators.empty()) throw DomainError("isospectral_experiment: no generators");
  IsospectralReport report;
  for (const auto& g : generators) {
    if (g.m != generators.front().m) throw DomainError("isospectral_experiment: generators differ in m");
    const PhiGrid v = potential_from_generator(g);
    const double res = generator_membership_residual(g, v);
    report.membership_residuals.push_back(res);
    if (!(res < kMembershipTol)) {
      throw DomainError("isospectral_experiment: generated potential fails the m^2 membership check (residual " +
                        std::to_string(res) + ")");
    }
    PotentialSpec spec = spec_base;
    spec.azimuthal = GeneratedAzimuthal{g};
    QuantumNumbers qq = q;
    qq.m = g.m;
    report.lambdas.push_back(assemble(spec, kind, qq, opt).radial.lambda);
  }
  for (double a : report.lambdas) {
    for (double b : report.lambdas) report.max_delta = std::max(report.max_delta, std::abs(a - b));
  }
  return report;
}

}  // namespace pseudopt
