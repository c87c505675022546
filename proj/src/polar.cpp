#include "pseudopt/polar.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "pseudopt/error.hpp"
#include "pseudopt/specfun.hpp"

namespace pseudopt {
namespace {

constexpr double kPi = std::numbers::pi;

double source_s(const EquationKind& kind, double E) {
  if (!kind.is_dirac()) return 0.5;
  const double s = E + kind.mass;
  if (!(s > 0.0)) throw DomainError("polar closed form: E + M must be positive");
  return s;
}

void require_k(int k) {
  if (k < 0) throw DomainError("polar: quantum number k must be non-negative");
}

// Fix the overall sign so that the first clearly non-zero sample is positive.
void fix_sign(std::vector<double>& values, double& sign) {
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  sign = 1.0;
  for (double v : values) {
    if (std::abs(v) > 1e-6 * peak) {
      sign = v > 0.0 ? 1.0 : -1.0;
      break;
    }
  }
  for (double& v : values) v *= sign;
}

AngularSolution sample_solution(std::function<double(double)> f, int n_grid, bool fix_phase = true) {
  if (n_grid < 4) throw DomainError("polar: n_grid must be at least 4");
  AngularSolution sol;
  sol.theta = theta_grid(n_grid);
  sol.values.resize(n_grid);
  for (int i = 0; i < n_grid; ++i) sol.values[i] = f(sol.theta[i]);
  double sign = 1.0;
  if (fix_phase) fix_sign(sol.values, sign);
  sol.at = [f = std::move(f), sign](double t) { return sign * f(t); };
  return sol;
}

// sin^mu(theta) times the terminating series in y = cos^2(theta/2); Lambda = (k+mu)(k+mu+1).
AngularSolution sin_power_family(double mu, int m, int k, int n_grid) {
  const double b = k + 2.0 * mu + 1.0;
  const double d = mu + 1.0;
  const double rho = 0.5 * mu;
  // int Theta^2 dx with weight (1-x^2)^mu, exact for the polynomial part
  const specfun::GaussRule rule = specfun::gauss_jacobi(k + 8, mu, mu);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double y = 0.5 * (1.0 + rule.nodes[i]);
    const double p = std::pow(0.25, rho) * specfun::hyp2f1_terminating(k, b, d, y);
    norm2 += rule.weights[i] * p * p;
  }
  const double scale = 1.0 / std::sqrt(norm2);
  auto f = [=](double theta) {
    // 1 - y taken as sin^2(theta/2) directly: no cancellation near theta = 0
    const double c = std::cos(0.5 * theta), sh = std::sin(0.5 * theta);
    const double y = c * c;
    return scale * std::pow(y, rho) * std::pow(sh * sh, rho) * specfun::hyp2f1_terminating(k, b, d, y);
  };
  AngularSolution sol = sample_solution(f, n_grid);
  sol.Lambda = (k + mu) * (k + mu + 1.0);
  sol.k_or_l = k;
  sol.m = m;
  sol.sector = ThetaSector::Full;
  sol.params = ClosedFormParams{rho, rho, b, d, "cos^2(theta/2)"};
  return sol;
}

// ---- Galerkin machinery ----

struct Basis {
  std::shared_ptr<const specfun::JacobiRecurrence> rec;
  int size = 0;
};

struct GalerkinResult {
  Eigen::VectorXd lambda;
  Eigen::MatrixXd coeffs;  // columns
  Basis basis;
};

// Symmetric eigenproblem  int w [stiff p' q' + R p q] du = Lambda int w p q du for
// polynomials orthonormal under the Jacobi weight (1-u)^a (1+u)^b.
GalerkinResult galerkin(int nb, double a, double b, const std::function<double(double)>& stiff,
                        const std::function<double(double)>& pot) {
  auto rec = std::make_shared<const specfun::JacobiRecurrence>(specfun::jacobi_recurrence(nb, a, b));
  const specfun::GaussRule rule = specfun::gauss_jacobi(nb + 24, a, b);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nb, nb);
  std::vector<double> p(nb), dp(nb);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double u = rule.nodes[q];
    specfun::orthonormal_poly(*rec, nb, u, p, dp);
    const double ws = rule.weights[q] * stiff(u);
    const double wr = rule.weights[q] * pot(u);
    if (!std::isfinite(wr)) throw DomainError("solve_theta_numeric: potential is not finite at a quadrature node");
    for (int i = 0; i < nb; ++i) {
      for (int j = 0; j <= i; ++j) k(i, j) += ws * dp[i] * dp[j] + wr * p[i] * p[j];
    }
  }
  k = k.selfadjointView<Eigen::Lower>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  if (es.info() != Eigen::Success) throw ConvergenceError("solve_theta_numeric: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors(), {rec, nb}};
}

double poly_sum(const Basis& basis, const double* c, double u) {
  std::vector<double> p(basis.size), dp(basis.size);
  specfun::orthonormal_poly(*basis.rec, basis.size, u, p, dp);
  double s = 0.0;
  for (int i = 0; i < basis.size; ++i) s += c[i] * p[i];
  return s;
}

double endpoint_exponent(double w, const char* where) {
  if (w < -1e-12) {
    throw DomainError(std::string("solve_theta_numeric: V_eff + m^2 < 0 at ") + where +
                      " (fall to centre, no regular solution)");
  }
  return 0.5 * std::sqrt(std::max(0.0, w));
}

struct Mode {
  double lambda;
  ThetaSector sector;
  int index;
  std::function<double(double)> shape;  // unnormalized sign-free Theta(theta)
};

// Full interval, no pole: Theta = (1-x)^alpha (1+x)^beta p(x).
std::vector<Mode> full_modes(const std::function<double(double)>& w, int nb) {
  const double alpha = endpoint_exponent(w(1.0), "theta = 0");
  const double beta = endpoint_exponent(w(-1.0), "theta = pi");
  auto c = [=](double x) { return beta * (1.0 - x) - alpha * (1.0 + x); };
  auto pot = [=](double x) {
    const double cc = c(x);
    return (w(x) - cc * cc) / ((1.0 - x) * (1.0 + x)) + alpha + beta;
  };
  auto stiff = [](double x) { return (1.0 - x) * (1.0 + x); };
  GalerkinResult g = galerkin(nb, 2.0 * alpha, 2.0 * beta, stiff, pot);
  auto shared = std::make_shared<const GalerkinResult>(std::move(g));
  std::vector<Mode> out;
  for (int i = 0; i < nb; ++i) {
    auto shape = [shared, i, alpha, beta](double theta) {
      const double x = std::cos(theta);
      return std::pow(1.0 - x, alpha) * std::pow(1.0 + x, beta) *
             poly_sum(shared->basis, shared->coeffs.col(i).data(), x);
    };
    out.push_back({shared->lambda(i), ThetaSector::Full, i, shape});
  }
  return out;
}

// One hemisphere with the 1/cos^2 pole: Theta = x^kappa (1-x^2)^alpha p(2x^2 - 1), x = |cos theta|.
// `w_tilde(x)` is V_smooth + m^2 + s on that hemisphere as a function of |x|.
struct HalfModes {
  std::shared_ptr<const GalerkinResult> g;
  double kappa = 0.0;
  double alpha = 0.0;
  double norm = 1.0;  // int_0^1 Theta^2 dx for a unit coefficient vector
};

HalfModes half_modes(const std::function<double(double)>& w_tilde, double s, int nb) {
  const double kappa = 0.5 + std::sqrt(0.25 + s);
  const double alpha = endpoint_exponent(w_tilde(1.0), "a pole of the sphere");
  const double shift = kappa * kappa + kappa + 4.0 * alpha * kappa + 2.0 * alpha;
  auto pot = [=](double u) {
    const double x2 = 0.5 * (1.0 + u);
    const double x = std::sqrt(x2);
    return (w_tilde(x) - 4.0 * alpha * alpha * x2) / (1.0 - x2) + shift;
  };
  auto stiff = [](double u) { return 4.0 * (1.0 - u) * (1.0 + u); };
  HalfModes h;
  h.g = std::make_shared<const GalerkinResult>(galerkin(nb, 2.0 * alpha, kappa - 0.5, stiff, pot));
  h.kappa = kappa;
  h.alpha = alpha;
  h.norm = std::pow(2.0, -(kappa + 2.0 * alpha + 1.5));
  return h;
}

double half_shape(const HalfModes& h, int i, double x) {
  const double ax = std::abs(x);
  return std::pow(ax, h.kappa) * std::pow(1.0 - ax * ax, h.alpha) *
         poly_sum(h.g->basis, h.g->coeffs.col(i).data(), 2.0 * ax * ax - 1.0) / std::sqrt(h.norm);
}

bool mirror_symmetric(const std::function<double(double)>& v) {
  for (int i = 1; i < 64; ++i) {
    const double t = 0.5 * kPi * i / 64.0;
    const double a = v(t), b = v(kPi - t);
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) return false;
  }
  return true;
}

std::vector<Mode> pole_modes(const ThetaPotential& v, double m2, int nb) {
  const double s = v.pole_strength;
  if (!(s > 0.0)) throw DomainError("solve_theta_numeric: only repulsive 1/cos^2 poles are supported");
  auto smooth = v.smooth;
  auto w_north = [=](double ax) { return smooth(std::acos(ax)) + m2 + s; };
  auto w_south = [=](double ax) { return smooth(kPi - std::acos(ax)) + m2 + s; };
  std::vector<Mode> out;
  if (mirror_symmetric(smooth)) {
    auto h = std::make_shared<const HalfModes>(half_modes(w_north, s, nb));
    for (int i = 0; i < nb; ++i) {
      // Even and odd extensions; each half carries half the norm.
      auto even = [h, i](double theta) { return half_shape(*h, i, std::cos(theta)) / std::sqrt(2.0); };
      auto odd = [h, i](double theta) {
        const double x = std::cos(theta);
        return (x >= 0.0 ? 1.0 : -1.0) * half_shape(*h, i, x) / std::sqrt(2.0);
      };
      out.push_back({h->g->lambda(i), ThetaSector::Even, i, even});
      out.push_back({h->g->lambda(i), ThetaSector::Odd, i, odd});
    }
  } else {
    auto hn = std::make_shared<const HalfModes>(half_modes(w_north, s, nb));
    auto hs = std::make_shared<const HalfModes>(half_modes(w_south, s, nb));
    for (int i = 0; i < nb; ++i) {
      auto north = [hn, i](double theta) {
        const double x = std::cos(theta);
        return x > 0.0 ? half_shape(*hn, i, x) : 0.0;
      };
      auto south = [hs, i](double theta) {
        const double x = std::cos(theta);
        return x < 0.0 ? half_shape(*hs, i, x) : 0.0;
      };
      out.push_back({hn->g->lambda(i), ThetaSector::North, i, north});
      out.push_back({hs->g->lambda(i), ThetaSector::South, i, south});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Mode& a, const Mode& b) { return a.lambda < b.lambda; });
  return out;
}

std::vector<Mode> theta_modes(const ThetaPotential& v, double m2, int nb) {
  if (v.pole_strength == 0.0) {
    auto smooth = v.smooth;
    return full_modes([=](double x) { return smooth(std::acos(std::clamp(x, -1.0, 1.0))) + m2; }, nb);
  }
  return pole_modes(v, m2, nb);
}

}  // namespace

const char* to_string(ThetaSector s) {
  switch (s) {
    case ThetaSector::Full:
      return "full";
    case ThetaSector::Even:
      return "even";
    case ThetaSector::Odd:
      return "odd";
    case ThetaSector::North:
      return "north";
    case ThetaSector::South:
      return "south";
  }
  return "unknown";
}

std::vector<double> theta_grid(int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = (i + 0.5) * kPi / n;
  return t;
}

AngularSolution legendre_branch(int l, int m, int n_grid) {
  if (l < 0) throw DomainError("legendre_branch: l must be non-negative");
  const int am = std::abs(m);
  if (am > l) {
    throw DomainError("legendre_branch: |m| = " + std::to_string(am) + " exceeds l = " + std::to_string(l));
  }
  double ratio = 1.0;  // (l-|m|)!/(l+|m|)!
  for (int i = l - am + 1; i <= l + am; ++i) ratio /= i;
  const double norm = std::sqrt((2.0 * l + 1.0) * ratio / 2.0);
  // Condon-Shortley sign kept as is
  auto f = [=](double theta) { return norm * specfun::assoc_legendre_angle(l, am, theta); };
  AngularSolution sol = sample_solution(f, n_grid, false);
  sol.Lambda = l * (l + 1.0);
  sol.k_or_l = l;
  sol.m = m;
  return sol;
}

AngularSolution theta_closed_form_constant(double c, int m, int k, int n_grid) {
  require_k(k);
  const double w = static_cast<double>(m) * m + c;
  if (w < 0.0) {
    throw DomainError("polar: m^2 + V_eff = " + std::to_string(w) + " < 0, no regular solution");
  }
  return sin_power_family(std::sqrt(w), m, k, n_grid);
}

AngularSolution theta_closed_form_half(const EquationKind& kind, double E, int m, int k, int n_grid) {
  require_k(k);
  const double s = source_s(kind, E);
  const double upsilon = 0.5 * std::sqrt(static_cast<double>(m) * m + s);
  AngularSolution sol = sin_power_family(2.0 * upsilon, m, k, n_grid);
  const double b = k + 4.0 * upsilon + 1.0;
  sol.params = ClosedFormParams{upsilon, upsilon, b, 1.0 + 2.0 * upsilon, "cos^2(theta/2)"};
  sol.Lambda = ((b + k) * (b + k) - 1.0) / 4.0;
  return sol;
}

AngularSolution theta_closed_form_sec2(const EquationKind& kind, double E, int m, int k, int n_grid) {
  require_k(k);
  const double s = source_s(kind, E);
  const double rho = 0.25 + 0.25 * std::sqrt(1.0 + 4.0 * s);
  const double upsilon = 0.5 * std::sqrt(static_cast<double>(m) * m + s);
  const double b = k + 2.0 * (rho + upsilon) + 0.5;
  const double d = 2.0 * rho + 0.5;
  // int_{-1}^{1} Theta^2 dx = 2^{-(2 rho + 2 upsilon + 1/2)} int (1-u)^{2 upsilon} (1+u)^{2 rho - 1/2} F^2 du
  const specfun::GaussRule rule = specfun::gauss_jacobi(k + 8, 2.0 * upsilon, 2.0 * rho - 0.5);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double f = specfun::hyp2f1_terminating(k, b, d, 0.5 * (1.0 + rule.nodes[i]));
    norm2 += rule.weights[i] * f * f;
  }
  norm2 *= std::pow(2.0, -(2.0 * rho + 2.0 * upsilon + 0.5));
  const double scale = 1.0 / std::sqrt(norm2);
  auto f = [=](double theta) {
    const double c = std::cos(theta), sn = std::sin(theta);
    const double y = c * c;
    return scale * std::pow(y, rho) * std::pow(sn * sn, upsilon) * specfun::hyp2f1_terminating(k, b, d, y);
  };
  AngularSolution sol = sample_solution(f, n_grid);
  sol.Lambda = (b + k) * (b + k) - 0.25;
  sol.k_or_l = k;
  sol.m = m;
  sol.sector = ThetaSector::Even;
  sol.params = ClosedFormParams{rho, upsilon, b, d, "cos^2(theta)"};
  return sol;
}

std::vector<AngularSolution> solve_theta_numeric(const ThetaPotential& v_eff, double m_squared, int n_modes,
                                                 const ThetaSolveOptions& opt) {
  if (n_modes < 1) throw DomainError("solve_theta_numeric: n_modes must be positive");
  if (opt.n_basis < 4) throw DomainError("solve_theta_numeric: n_basis must be at least 4");
  if (n_modes > opt.n_basis / 2) throw DomainError("solve_theta_numeric: n_modes exceeds half the basis size");
  std::vector<Mode> modes = theta_modes(v_eff, m_squared, opt.n_basis);
  if (opt.refine_check) {
    const std::vector<Mode> fine = theta_modes(v_eff, m_squared, 2 * opt.n_basis);
    for (int i = 0; i < n_modes; ++i) {
      const double shift = std::abs(fine[i].lambda - modes[i].lambda);
      if (shift > opt.refine_tol) {
        throw ConvergenceError("solve_theta_numeric: eigenvalue " + std::to_string(i) + " shifts by " +
                               std::to_string(shift) + " when the basis is doubled");
      }
    }
  }
  const int m_int = static_cast<int>(std::lround(std::sqrt(std::max(0.0, m_squared))));
  std::vector<AngularSolution> out;
  for (int i = 0; i < n_modes; ++i) {
    AngularSolution sol = sample_solution(modes[i].shape, opt.n_grid);
    sol.Lambda = modes[i].lambda;
    sol.k_or_l = modes[i].index;
    sol.m = m_int;
    sol.sector = modes[i].sector;
    out.push_back(std::move(sol));
  }
  return out;
}

AngularSolution polar_solution(const PolarPotential& p, const EquationKind& kind, double E, int m, int k_or_l,
                               const ThetaSolveOptions& opt) {
  require_k(k_or_l);
  const double scale = dirac_scale(kind, E);
  if (std::holds_alternative<ZeroPolar>(p)) return legendre_branch(k_or_l, m, opt.n_grid);
  if (std::holds_alternative<HalfPolar>(p)) return theta_closed_form_half(kind, E, m, k_or_l, opt.n_grid);
  if (std::holds_alternative<InverseCosSquaredPolar>(p)) {
    return theta_closed_form_sec2(kind, E, m, k_or_l, opt.n_grid);
  }
  if (const auto* c = std::get_if<ConstantPolar>(&p)) {
    return theta_closed_form_constant(c->value * scale, m, k_or_l, opt.n_grid);
  }
  ThetaSolveOptions o = opt;
  o.n_basis = std::max(o.n_basis, 2 * (k_or_l + 1));
  auto sols = solve_theta_numeric(theta_potential(p, scale), static_cast<double>(m) * m, k_or_l + 1, o);
  return sols.back();
}

double theta_residual(const AngularSolution& sol, const ThetaPotential& v_eff, double m_squared, double h) {
  if (!sol.at) throw DomainError("theta_residual: solution has no evaluator");
  const bool split = v_eff.pole_strength != 0.0 || sol.sector != ThetaSector::Full;
  double worst = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < sol.theta.size(); ++i) {
    const double t = sol.theta[i];
    peak = std::max(peak, std::abs(sol.values[i]));
    double dist = std::min(t, kPi - t);
    if (split) dist = std::min(dist, std::abs(t - 0.5 * kPi));
    const double hh = std::min(h, 0.05 * dist);
    double f[7];
    for (int j = -3; j <= 3; ++j) f[j + 3] = sol.at(t + j * hh);
    const double d1 = (-f[0] + 9.0 * f[1] - 45.0 * f[2] + 45.0 * f[4] - 9.0 * f[5] + f[6]) / (60.0 * hh);
    const double d2 =
        (2.0 * f[0] - 27.0 * f[1] + 270.0 * f[2] - 490.0 * f[3] + 270.0 * f[4] - 27.0 * f[5] + 2.0 * f[6]) /
        (180.0 * hh * hh);
    const double st = std::sin(t), ct = std::cos(t);
    // multiplied through by sin^2 (and cos^2 with a pole) so the terms stay O(Theta)
    const double wt = v_eff.pole_strength != 0.0 ? ct * ct : 1.0;
    const double smooth = v_eff.smooth(t) + m_squared;
    const double r = wt * (st * st * d2 + st * ct * d1 - smooth * f[3] + sol.Lambda * st * st * f[3]) -
                     v_eff.pole_strength * f[3];
    worst = std::max(worst, std::abs(r));
  }
  if (peak == 0.0) throw DomainError("theta_residual: zero eigenfunction");
  return worst / peak;
}

}  // namespace pseudopt
