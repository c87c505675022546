#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "pseudopt/error.hpp"
#include "pseudopt/polar.hpp"

using namespace pseudopt;

namespace {
constexpr double kPi = std::numbers::pi;

// int_0^pi f(t) sin(t) dt by Gauss-Legendre on each hemisphere.
double sin_integral(const std::function<double(double)>& f) {
  static const specfun::GaussRule rule = specfun::gauss_jacobi(120, 0.0, 0.0);
  double sum = 0.0;
  for (double lo : {0.0, 0.5 * kPi}) {
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = lo + 0.25 * kPi * (rule.nodes[i] + 1.0);
      sum += rule.weights[i] * f(t) * std::sin(t);
    }
  }
  return 0.25 * kPi * sum;
}

double residual(const AngularSolution& s, double v_plus_m2_const, double pole, bool split) {
  auto w = [=](double t) { return v_plus_m2_const + pole / (std::cos(t) * std::cos(t)); };
  return oracle::polar_residual(s.at, w, s.Lambda, s.theta, split);
}

using oracle::mp;

// Closed form y^rho (1-y)^upsilon 2F1(-k, b; d; y) in 50 digits; `half_angle`
// selects y = cos^2(theta/2), otherwise y = cos^2(theta).
std::function<mp(const mp&)> closed_form_mp(const ClosedFormParams& p, int k, bool half_angle) {
  return [=](const mp& t) {
    const mp c = half_angle ? cos(t / 2) : cos(t);
    const mp sn = half_angle ? sin(t / 2) : sin(t);
    const mp y = c * c;
    return pow(y, mp(p.rho)) * pow(sn * sn, mp(p.upsilon)) *
           oracle::hyp2f1_terminating_mp(k, mp(p.b), mp(p.d), y);
  };
}

// sup |sol - c * g| / sup |sol| with the best scalar c.
double shape_mismatch(const AngularSolution& sol, const std::function<mp(const mp&)>& g) {
  double num = 0.0, den = 0.0, peak = 0.0;
  std::vector<double> gv;
  for (std::size_t i = 0; i < sol.theta.size(); ++i) {
    gv.push_back(static_cast<double>(g(mp(sol.theta[i]))));
    num += sol.values[i] * gv.back();
    den += gv.back() * gv.back();
    peak = std::max(peak, std::abs(sol.values[i]));
  }
  const double c = num / den;
  double worst = 0.0;
  for (std::size_t i = 0; i < gv.size(); ++i) worst = std::max(worst, std::abs(sol.values[i] - c * gv[i]));
  return worst / peak;
}

ThetaPotential constant_potential(double c) {
  ThetaPotential v;
  v.smooth = [c](double) { return c; };
  v.constant_value = c;
  return v;
}

ThetaPotential sec2_potential(double s) {
  ThetaPotential v;
  v.pole_strength = s;
  return v;
}

// s = 1/2 is the Schroedinger case; otherwise Dirac with M = 1 and E = s - 1.
EquationKind kind_for(double s) { return s == 0.5 ? EquationKind::schroedinger() : EquationKind::dirac(1.0); }
double energy_for(double s) { return s == 0.5 ? 0.0 : s - 1.0; }
}  // namespace

TEST_CASE("legendre_branch examples") {
  const auto s10 = legendre_branch(1, 0);
  CHECK(s10.Lambda == 2.0);
  const auto s00 = legendre_branch(0, 0);
  CHECK(s00.Lambda == 0.0);
  for (double v : s00.values) CHECK(v == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  const auto s21 = legendre_branch(2, 1);
  CHECK(residual(s21, 1.0, 0.0, false) < 1e-8);
  CHECK_THROWS_AS(legendre_branch(1, 2), DomainError);
  CHECK_THROWS_AS(legendre_branch(2, -3), DomainError);
}

TEST_CASE("legendre_branch carries the normalization prefactor") {
  for (int l = 0; l <= 5; ++l) {
    for (int m = -l; m <= l; ++m) {
      const int am = std::abs(m);
      double ratio = 1.0;
      for (int i = l - am + 1; i <= l + am; ++i) ratio /= i;
      const double pref = std::sqrt((2 * l + 1) * ratio / 2.0);
      const auto s = legendre_branch(l, m, 50);
      INFO("l = " << l << ", m = " << m);
      for (std::size_t i = 0; i < s.theta.size(); ++i) {
        const double want = pref * oracle::legendre_rodrigues(l, am, std::cos(s.theta[i]));
        CHECK(std::abs(s.values[i] - want) < 1e-12);
      }
      CHECK(sin_integral([&](double t) { return s.at(t) * s.at(t); }) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(residual(s, double(m * m), 0.0, false) < 1e-8);
    }
  }
}

TEST_CASE("theta_closed_form_half examples") {
  const auto s = theta_closed_form_half(EquationKind::schroedinger(), 0.0, 0, 0);
  REQUIRE(s.params);
  CHECK(s.params->upsilon == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-15));
  CHECK(s.params->rho == s.params->upsilon);
  CHECK(s.params->b == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-15));
  CHECK(s.params->d == doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(s.params->y_map == "cos^2(theta/2)");
  CHECK(s.Lambda == doctest::Approx((1.0 + std::sqrt(2.0)) / 2.0).epsilon(1e-15));
  CHECK(s.Lambda == doctest::Approx(1.2071068).epsilon(1e-7));
  const double mt = 1.0 / std::sqrt(2.0);
  CHECK(s.Lambda == doctest::Approx(mt * (mt + 1.0)).epsilon(1e-14));

  // Dirac with E + M = 3
  const auto d = theta_closed_form_half(EquationKind::dirac(1.0), 2.0, 1, 0);
  CHECK(d.params->upsilon == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.params->b == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(d.Lambda == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("theta_closed_form_half satisfies the polar equation and is normalized") {
  for (double s : {0.5, 2.0, 3.0}) {
    const EquationKind kind = kind_for(s);
    const double E = energy_for(s);
    for (int m = 0; m <= 2; ++m) {
      for (int k = 0; k <= 3; ++k) {
        const auto sol = theta_closed_form_half(kind, E, m, k, 100);
        INFO("s = " << s << ", m = " << m << ", k = " << k);
        const auto g = closed_form_mp(*sol.params, k, true);
        const double w = s + m * m;
        CHECK(oracle::polar_residual_mp(g, [w](const mp&) { return mp(w); }, sol.Lambda, sol.theta) < 1e-8);
        CHECK(shape_mismatch(sol, g) < 1e-12);
        CHECK(theta_residual(sol, constant_potential(s), m * m) < 1e-7);
        CHECK(sin_integral([&](double t) { return sol.at(t) * sol.at(t); }) ==
              doctest::Approx(1.0).epsilon(1e-10));
        CHECK(sol.k_or_l == k);
      }
    }
  }
}

TEST_CASE("hypergeometric form of the half closed form") {
  // Theta is proportional to y^rho (1-y)^upsilon 2F1(-k, b; d; y), y = cos^2(theta/2)
  for (int m = 0; m <= 2; ++m) {
    for (int k = 0; k <= 3; ++k) {
      const auto sol = theta_closed_form_half(EquationKind::schroedinger(), 0.0, m, k);
      const auto& p = *sol.params;
      auto hyp = [&](double t) {
        const double y = std::cos(0.5 * t) * std::cos(0.5 * t);
        return std::pow(y, p.rho) * std::pow(1.0 - y, p.upsilon) * oracle::hyp2f1_terminating(k, p.b, p.d, y);
      };
      const double ratio = sol.at(1.0) / hyp(1.0);
      INFO("m = " << m << ", k = " << k);
      for (double t : {0.2, 0.7, 1.3, 2.0, 2.9}) CHECK(sol.at(t) == doctest::Approx(ratio * hyp(t)).epsilon(1e-11));
    }
  }
}

TEST_CASE("[(b+k)^2 - 1]/4 = (k + 2 upsilon)(k + 2 upsilon + 1) on random parameters") {
  auto g = oracle::rng(41);
  for (int i = 0; i < 100; ++i) {
    const int m = oracle::uniform_int(g, 0, 6);
    const int k = oracle::uniform_int(g, 0, 8);
    const double E = oracle::uniform(g, -0.9, 5.0);
    const auto sol = theta_closed_form_half(EquationKind::dirac(1.0), E, m, k, 16);
    const double mt = 2.0 * sol.params->upsilon;
    CHECK(std::abs(sol.Lambda - (k + mt) * (k + mt + 1.0)) < 1e-12 * std::max(1.0, sol.Lambda));
  }
}

TEST_CASE("theta_closed_form_sec2 examples") {
  const auto s = theta_closed_form_sec2(EquationKind::schroedinger(), 0.0, 0, 0);
  REQUIRE(s.params);
  CHECK(s.params->rho == doctest::Approx(0.25 + 0.25 * std::sqrt(3.0)).epsilon(1e-15));
  CHECK(s.params->rho == doctest::Approx(0.6830127).epsilon(1e-7));
  CHECK(s.params->upsilon == doctest::Approx(0.3535534).epsilon(1e-7));
  CHECK(s.params->b == doctest::Approx(2.5731322).epsilon(1e-7));
  CHECK(s.Lambda == doctest::Approx(6.3710).epsilon(1e-4));
  CHECK(s.params->y_map == "cos^2(theta)");
  CHECK(s.sector == ThetaSector::Even);

  // Dirac with E + M = 2
  const auto d = theta_closed_form_sec2(EquationKind::dirac(1.0), 1.0, 0, 0);
  CHECK(d.params->rho == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.params->upsilon == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
  const double b = 2.5 + std::sqrt(2.0);
  CHECK(d.params->b == doctest::Approx(b).epsilon(1e-15));
  CHECK(d.Lambda == doctest::Approx(b * b - 0.25).epsilon(1e-15));
}

TEST_CASE("theta_closed_form_sec2 satisfies the polar equation and is normalized") {
  for (double s : {0.5, 2.0, 3.0}) {
    const EquationKind kind = kind_for(s);
    const double E = energy_for(s);
    for (int m = 0; m <= 2; ++m) {
      for (int k = 0; k <= 3; ++k) {
        const auto sol = theta_closed_form_sec2(kind, E, m, k, 100);
        INFO("s = " << s << ", m = " << m << ", k = " << k);
        const auto g = closed_form_mp(*sol.params, k, false);
        const double m2 = m * m;
        auto w = [=](const mp& t) { return mp(m2) + mp(s) / (cos(t) * cos(t)); };
        CHECK(oracle::polar_residual_mp(g, w, sol.Lambda, sol.theta) < 1e-8);
        CHECK(shape_mismatch(sol, g) < 1e-12);
        CHECK(theta_residual(sol, sec2_potential(s), m * m) < 1e-7);
        CHECK(sin_integral([&](double t) { return sol.at(t) * sol.at(t); }) ==
              doctest::Approx(1.0).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("closed-form Lambda matches the numeric solver") {
  for (double s : {0.5, 2.0, 3.0}) {
    const EquationKind kind = kind_for(s);
    const double E = energy_for(s);
    for (int m = 0; m <= 2; ++m) {
      const auto half = solve_theta_numeric(constant_potential(s), m * m, 4);
      const auto sec = solve_theta_numeric(sec2_potential(s), m * m, 8);
      for (int k = 0; k <= 3; ++k) {
        INFO("s = " << s << ", m = " << m << ", k = " << k);
        CHECK(std::abs(half[k].Lambda - theta_closed_form_half(kind, E, m, k).Lambda) < 1e-5);
        const double want = theta_closed_form_sec2(kind, E, m, k).Lambda;
        int found = 0;
        for (const auto& n : sec) {
          if (n.sector == ThetaSector::Even && n.k_or_l == k) {
            CHECK(std::abs(n.Lambda - want) < 1e-5);
            ++found;
          }
        }
        CHECK(found == 1);
      }
    }
  }
}

TEST_CASE("solve_theta_numeric examples") {
  const auto free = solve_theta_numeric(constant_potential(0.0), 0.0, 5);
  for (int l = 0; l < 5; ++l) CHECK(std::abs(free[l].Lambda - l * (l + 1.0)) < 1e-6);

  const auto half = solve_theta_numeric(constant_potential(0.5), 0.0, 1);
  CHECK(half[0].Lambda == doctest::Approx(1.2071068).epsilon(1e-7));

  const auto hart = solve_theta_numeric(constant_potential(-1.0), 1.0, 3);
  for (int l = 0; l < 3; ++l) CHECK(std::abs(hart[l].Lambda - l * (l + 1.0)) < 1e-6);

  CHECK_THROWS_AS(solve_theta_numeric(constant_potential(0.0), 0.0, 21), DomainError);
  CHECK_THROWS_AS(solve_theta_numeric(constant_potential(-2.0), 1.0, 1), DomainError);
}

TEST_CASE("numeric eigenfunctions are orthonormal and satisfy the equation") {
  ThetaPotential v;
  v.smooth = [](double t) { return 0.7 + 0.4 * std::cos(t) + 0.3 * std::cos(2.0 * t); };
  v.constant_value.reset();
  for (int m = 0; m <= 2; ++m) {
    const auto sols = solve_theta_numeric(v, m * m, 4);
    for (std::size_t i = 0; i < sols.size(); ++i) {
      if (i > 0) CHECK(sols[i].Lambda > sols[i - 1].Lambda);
      for (std::size_t j = 0; j <= i; ++j) {
        const double ip = sin_integral([&](double t) { return sols[i].at(t) * sols[j].at(t); });
        INFO("m = " << m << ", i = " << i << ", j = " << j);
        CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-8);
      }
      CHECK(theta_residual(sols[i], v, m * m) < 1e-7);
    }
  }
}

TEST_CASE("numeric eigenvalues are stable under basis doubling on random smooth potentials") {
  auto g = oracle::rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const double c0 = oracle::uniform(g, 0.0, 2.0), c1 = oracle::uniform(g, -0.5, 0.5);
    ThetaPotential v;
    v.smooth = [=](double t) { return c0 + c1 * std::cos(t); };
    v.constant_value.reset();
    ThetaSolveOptions o;
    o.refine_check = false;
    const auto a = solve_theta_numeric(v, 1.0, 4, o);
    o.n_basis = 80;
    const auto b = solve_theta_numeric(v, 1.0, 4, o);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(a[i].Lambda - b[i].Lambda) < 1e-8);
  }
}

TEST_CASE("polar_solution dispatch") {
  const auto sch = EquationKind::schroedinger();
  CHECK(polar_solution(ZeroPolar{}, sch, 0.0, 1, 2).Lambda == 6.0);
  CHECK(polar_solution(HalfPolar{}, sch, 0.0, 0, 0).Lambda ==
        doctest::Approx((1.0 + std::sqrt(2.0)) / 2.0).epsilon(1e-15));
  CHECK(polar_solution(InverseCosSquaredPolar{}, sch, 0.0, 0, 0).Lambda == doctest::Approx(6.3710).epsilon(1e-4));
  // Hartmann: V = -1 with m = 1 reduces to Legendre with m = 0
  for (int k = 0; k < 3; ++k) {
    CHECK(polar_solution(ConstantPolar{-1.0}, sch, 0.0, 1, k).Lambda == doctest::Approx(k * (k + 1.0)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(polar_solution(ConstantPolar{-1.0}, sch, 0.0, 0, 0), DomainError);

  TabulatedPolar t;
  for (int i = 0; i <= 400; ++i) {
    t.theta.push_back(kPi * i / 400.0);
    t.v.push_back(0.5);
  }
  CHECK(polar_solution(t, sch, 0.0, 0, 1).Lambda ==
        doctest::Approx(theta_closed_form_half(sch, 0.0, 0, 1).Lambda).epsilon(1e-8));
}

TEST_CASE("theta_grid avoids the poles and the equator") {
  const auto t = theta_grid(400);
  CHECK(t.front() > 0.0);
  CHECK(t.back() < kPi);
  for (double x : t) CHECK(std::abs(x - 0.5 * kPi) > 1e-3);
}
