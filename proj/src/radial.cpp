#include "pseudopt/radial.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "pseudopt/error.hpp"

namespace pseudopt {
namespace {

using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;

std::function<double(double)> spline_of(const std::vector<double>& u, double h) {
  auto s = std::make_shared<Spline>(u.begin(), u.end(), 0.0, h);
  const double r_end = h * static_cast<double>(u.size() - 1);
  return [s, r_end](double r) { return (r < 0.0 || r > r_end) ? 0.0 : (*s)(r); };
}

int count_sign_changes(const std::vector<double>& u) {
  double peak = 0.0;
  for (double v : u) peak = std::max(peak, std::abs(v));
  int changes = 0;
  double last = 0.0;
  for (double v : u) {
    if (std::abs(v) <= 1e-10 * peak) continue;
    if (last != 0.0 && (v > 0.0) != (last > 0.0)) ++changes;
    last = v;
  }
  return changes;
}

double laguerre(int n, double alpha, double x) {
  if (n == 0) return 1.0;
  double lm1 = 1.0, l = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * l - (k + alpha) * lm1) / (k + 1.0);
    lm1 = l;
    l = next;
  }
  return l;
}

}  // namespace

double effective_l(double Lambda) {
  if (!(Lambda >= -0.25)) {
    throw DomainError("effective_l: Lambda = " + std::to_string(Lambda) + " < -1/4 (fall to centre)");
  }
  return 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * Lambda));
}

double coulomb_lambda(double Lambda, int n_r, double strength) {
  if (n_r < 0) throw DomainError("coulomb_lambda: n_r must be non-negative");
  if (!(Lambda >= 0.0)) throw DomainError("coulomb_lambda: Lambda must be non-negative");
  const double N = n_r + effective_l(Lambda) + 1.0;
  return -strength * strength / (4.0 * N * N);
}

double default_r_max(double strength, double N) {
  if (!(strength > 0.0)) throw DomainError("default_r_max: strength must be positive");
  return 80.0 / strength * std::max(1.0, N);
}

std::vector<RadialSolution> solve_radial_numeric(const std::function<double(double)>& v_eff, double Lambda,
                                                 int n_states, double r_max, int n_grid) {
  if (n_states < 1) throw DomainError("solve_radial_numeric: n_states must be positive");
  if (n_grid < 10 || n_states > n_grid) throw DomainError("solve_radial_numeric: bad grid size");
  if (!(r_max > 0.0)) throw DomainError("solve_radial_numeric: r_max must be positive");
  effective_l(Lambda);
  const int n = n_grid;
  const double h = r_max / (n + 1);
  std::vector<double> d(n), e(std::max(1, n - 1), -1.0 / (h * h));
  for (int i = 0; i < n; ++i) {
    const double r = (i + 1) * h;
    d[i] = 2.0 / (h * h) + Lambda / (r * r) + v_eff(r);
    if (!std::isfinite(d[i])) throw DomainError("solve_radial_numeric: potential not finite on the grid");
  }
  lapack_int found = 0;
  std::vector<double> w(n), z(static_cast<std::size_t>(n) * n_states);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n_states));
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, n_states,
                                         0.0, &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != n_states) {
    throw ConvergenceError("solve_radial_numeric: tridiagonal eigensolver failed (info " + std::to_string(info) +
                           ")");
  }
  std::vector<RadialSolution> out;
  for (int s = 0; s < n_states; ++s) {
    if (!(w[s] < 0.0)) {
      throw ConvergenceError("solve_radial_numeric: only " + std::to_string(s) + " bound states below the " +
                             "continuum, " + std::to_string(n_states) + " requested");
    }
    RadialSolution sol;
    sol.lambda = w[s];
    sol.Lambda_input = Lambda;
    sol.r.resize(n + 2);
    sol.U.assign(n + 2, 0.0);
    for (int i = 0; i < n + 2; ++i) sol.r[i] = i * h;
    double peak = 0.0, norm2 = 0.0, first = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = z[static_cast<std::size_t>(s) * n + i];
      sol.U[i + 1] = u;
      peak = std::max(peak, std::abs(u));
      norm2 += u * u * h;
    }
    for (int i = 0; i < n; ++i) {
      if (std::abs(sol.U[i + 1]) > 1e-6 * peak) {
        first = sol.U[i + 1];
        break;
      }
    }
    const double scale = (first < 0.0 ? -1.0 : 1.0) / std::sqrt(norm2);
    for (double& u : sol.U) u *= scale;
    peak *= std::abs(scale);
    double tail = 0.0;
    for (int i = static_cast<int>(0.95 * (n + 1)); i < n + 2; ++i) tail = std::max(tail, std::abs(sol.U[i]));
    if (tail >= 1e-8 * peak) {
      throw ConvergenceError("solve_radial_numeric: r_max = " + std::to_string(r_max) + " too small for state " +
                             std::to_string(s) + " (tail " + std::to_string(tail / peak) + ")");
    }
    sol.n_r = count_sign_changes(sol.U);
    sol.at = spline_of(sol.U, h);
    out.push_back(std::move(sol));
  }
  return out;
}

RadialSolution coulomb_radial_solution(double Lambda, int n_r, double strength, double r_max, int n_grid) {
  if (!(strength > 0.0)) throw DomainError("coulomb_radial_solution: strength must be positive");
  if (n_grid < 10) throw DomainError("coulomb_radial_solution: n_grid too small");
  const double lp = effective_l(Lambda);
  const double N = n_r + lp + 1.0;
  const double q = strength / (2.0 * N);
  const double alpha = 2.0 * lp + 1.0;
  if (r_max <= 0.0) r_max = default_r_max(strength, N);
  // int_0^inf U^2 dr for the unnormalized U
  const double log_norm2 = -(alpha + 2.0) * std::log(2.0 * q) + std::lgamma(n_r + alpha + 1.0) -
                           std::lgamma(n_r + 1.0) + std::log(2.0 * n_r + alpha + 1.0);
  const double c = std::exp(-0.5 * log_norm2);
  RadialSolution sol;
  sol.lambda = -q * q;
  sol.n_r = n_r;
  sol.Lambda_input = Lambda;
  sol.analytic = true;
  sol.at = [=](double r) {
    if (r <= 0.0) return 0.0;
    return c * std::exp((lp + 1.0) * std::log(r) - q * r) * laguerre(n_r, alpha, 2.0 * q * r);
  };
  const double h = r_max / (n_grid + 1);
  sol.r.resize(n_grid + 2);
  sol.U.resize(n_grid + 2);
  for (int i = 0; i < n_grid + 2; ++i) {
    sol.r[i] = i * h;
    sol.U[i] = sol.at(sol.r[i]);
  }
  return sol;
}

RadialSolution radial_solution(const RadialPotential& v, double scale, double Lambda, int n_r,
                               const RadialOptions& opt) {
  if (n_r < 0) throw DomainError("radial: n_r must be non-negative");
  if (const auto* c = std::get_if<CoulombRadial>(&v)) {
    const double g = c->strength * scale;
    if (!(g > 0.0)) throw DomainError("radial: Coulomb strength must be attractive (positive)");
    if (!opt.numeric_coulomb) {
      RadialSolution sol = coulomb_radial_solution(Lambda, n_r, g, opt.r_max, opt.n_grid);
      sol.lambda = coulomb_lambda(Lambda, n_r, g);
      return sol;
    }
    const double N = n_r + effective_l(Lambda) + 1.0;
    const double r_max = opt.r_max > 0.0 ? opt.r_max : default_r_max(g, N);
    auto sols = solve_radial_numeric([g](double r) { return -g / r; }, Lambda, n_r + 1, r_max, opt.n_grid);
    return sols.back();
  }
  if (std::holds_alternative<ZeroRadial>(v)) {
    throw ConvergenceError("radial: V(r) = 0 has no bound states");
  }
  const auto& t = std::get<TabulatedRadial>(v);
  auto f = radial_function(v, scale);
  const double r_max = opt.r_max > 0.0 ? opt.r_max : t.r.back();
  auto sols = solve_radial_numeric(f, Lambda, n_r + 1, r_max, opt.n_grid);
  return sols.back();
}

RadialSolution dirac_self_consistent(const PotentialSpec& spec, double M, const QuantumNumbers& q, double tol,
                                     const DiracOptions& opt) {
  const EquationKind kind = EquationKind::dirac(M);
  if (!(tol > 0.0)) throw DomainError("dirac_self_consistent: tol must be positive");
  if (const auto* c = std::get_if<CoulombRadial>(&spec.radial); c && c->strength == 0.0) {
    RadialSolution free;
    free.E = M;
    free.lambda = 0.0;
    free.n_r = q.n_r;
    free.Lambda_input = polar_solution(spec.polar, kind, M, q.m, q.k_or_l, opt.theta).Lambda;
    return free;
  }
  const double sign = opt.negative_branch ? -1.0 : 1.0;
  double E = opt.E0.value_or(M);
  double last_step = HUGE_VAL;
  for (int it = 1; it <= opt.max_iter; ++it) {
    const double scale = dirac_scale(kind, E);
    const double Lambda = polar_solution(spec.polar, kind, E, q.m, q.k_or_l, opt.theta).Lambda;
    RadialSolution sol = radial_solution(spec.radial, scale, Lambda, q.n_r, opt.radial);
    const double e2 = sol.lambda + M * M;
    if (!(e2 > 0.0)) {
      throw RealityViolation("dirac_self_consistent: lambda + M^2 = " + std::to_string(e2) + " <= 0");
    }
    double next = sign * std::sqrt(e2);
    double step = next - E;
    if (std::abs(step) > last_step) {
      step *= 0.5;
      next = E + step;
    }
    if (std::abs(step) < tol) {
      // one more solve at the converged energy so that lambda and E agree
      const double s2 = dirac_scale(kind, next);
      const double L2 = polar_solution(spec.polar, kind, next, q.m, q.k_or_l, opt.theta).Lambda;
      RadialSolution final_sol = radial_solution(spec.radial, s2, L2, q.n_r, opt.radial);
      final_sol.E = sign * std::sqrt(final_sol.lambda + M * M);
      final_sol.iterations = it;
      return final_sol;
    }
    last_step = std::abs(step);
    E = next;
  }
  throw ConvergenceError("dirac_self_consistent: no convergence in " + std::to_string(opt.max_iter) +
                         " iterations");
}

}  // namespace pseudopt
