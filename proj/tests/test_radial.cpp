#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pseudopt/error.hpp"
#include "pseudopt/radial.hpp"

using namespace pseudopt;

namespace {

double hydrogen(int n_r, int l, double strength = 1.0) {
  const double N = n_r + l + 1.0;
  return -strength * strength / (4.0 * N * N);
}

double dirac_coulomb(double M, double alpha, double N) { return M * (N * N - alpha * alpha) / (N * N + alpha * alpha); }

int sign_changes(const std::vector<double>& u) {
  double peak = 0.0;
  for (double v : u) peak = std::max(peak, std::abs(v));
  int n = 0;
  double last = 0.0;
  for (double v : u) {
    if (std::abs(v) < 1e-9 * peak) continue;
    if (last != 0.0 && (v > 0.0) != (last > 0.0)) ++n;
    last = v;
  }
  return n;
}

PotentialSpec coulomb(double alpha) {
  PotentialSpec s;
  s.radial = CoulombRadial{alpha};
  return s;
}

}  // namespace

TEST_CASE("effective_l") {
  CHECK(effective_l(0.0) == 0.0);
  CHECK(effective_l(2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(effective_l(1.2071068) == doctest::Approx(0.7071068).epsilon(1e-7));
  CHECK(effective_l(-0.25) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(effective_l(-0.3), DomainError);
  auto g = oracle::rng(3);
  for (int i = 0; i < 100; ++i) {
    const double lp = oracle::uniform(g, 0.0, 20.0);
    CHECK(effective_l(lp * (lp + 1.0)) == doctest::Approx(lp).epsilon(1e-12));
  }
}

TEST_CASE("coulomb_lambda") {
  CHECK(coulomb_lambda(0.0, 0, 1.0) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(coulomb_lambda(2.0, 0, 1.0) == doctest::Approx(-1.0 / 16.0).epsilon(1e-15));
  CHECK(coulomb_lambda(1.2071068, 0, 1.0) == doctest::Approx(-0.0857864).epsilon(1e-6));
  CHECK(coulomb_lambda(6.0, 1, 3.0) == doctest::Approx(-9.0 / 64.0).epsilon(1e-15));
  CHECK_THROWS_AS(coulomb_lambda(0.0, -1, 1.0), DomainError);
}

TEST_CASE("numeric Coulomb spectrum matches hydrogen for n_r + l <= 2") {
  for (int l = 0; l <= 2; ++l) {
    for (int n_r = 0; n_r + l <= 2; ++n_r) {
      const double N = n_r + l + 1.0;
      auto sols = solve_radial_numeric([](double r) { return -1.0 / r; }, l * (l + 1.0), n_r + 1,
                                       default_r_max(1.0, N), 3000);
      REQUIRE(sols.size() == static_cast<std::size_t>(n_r + 1));
      CAPTURE(l);
      CAPTURE(n_r);
      for (int i = 0; i <= n_r; ++i) CHECK(sols[i].n_r == i);
      CHECK(std::abs(sols[n_r].lambda / hydrogen(n_r, l) - 1.0) < 1e-4);
      CHECK(sols[n_r].U.front() == 0.0);
      CHECK(sols[n_r].U.back() == 0.0);
    }
  }
}

TEST_CASE("spec examples for solve_radial_numeric") {
  auto s0 = solve_radial_numeric([](double r) { return -1.0 / r; }, 0.0, 1, 60.0, 3000);
  CHECK(std::abs(s0[0].lambda + 0.25) < 1e-4);
  auto s2 = solve_radial_numeric([](double r) { return -1.0 / r; }, 2.0, 1, 240.0, 3000);
  CHECK(std::abs(s2[0].lambda + 0.0625) < 1e-4);
  CHECK_THROWS_AS(solve_radial_numeric([](double) { return 0.0; }, 0.0, 1, 60.0, 500), ConvergenceError);
}

TEST_CASE("grid convergence is second order") {
  auto v = [](double r) { return -1.0 / r; };
  for (double Lambda : {0.0, 2.0}) {
    const double r_max = Lambda == 0.0 ? 60.0 : 240.0;
    const double exact = coulomb_lambda(Lambda, 0, 1.0);
    // h = r_max/(n+1), so n and 2n+1 halve the spacing exactly
    const double e1 = std::abs(solve_radial_numeric(v, Lambda, 1, r_max, 1499)[0].lambda - exact);
    const double e2 = std::abs(solve_radial_numeric(v, Lambda, 1, r_max, 2999)[0].lambda - exact);
    CAPTURE(Lambda);
    CHECK(e1 / e2 >= 3.5);
    CHECK(e1 / e2 <= 4.5);
  }
}

TEST_CASE("node theorem on a random attractive well") {
  auto g = oracle::rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    // depth * width^2 >= 150 binds three states well below threshold for Lambda <= 3
    const double width = oracle::uniform(g, 1.5, 3.0);
    const double depth = oracle::uniform(g, 150.0, 300.0) / (width * width);
    const double Lambda = oracle::uniform(g, 0.0, 3.0);
    auto sols = solve_radial_numeric([&](double r) { return -depth * std::exp(-r * r / (width * width)); }, Lambda,
                                     3, 40.0, 2000);
    for (int i = 0; i < 3; ++i) {
      CHECK(sols[i].n_r == i);
      CHECK(sign_changes(sols[i].U) == i);
      if (i > 0) CHECK(sols[i].lambda > sols[i - 1].lambda);
    }
  }
}

TEST_CASE("lambda increases with Lambda") {
  auto v = [](double r) { return -1.0 / r - 0.5 * std::exp(-r); };
  double prev = -HUGE_VAL;
  for (double Lambda : {0.0, 0.75, 2.0, 6.0}) {
    const double lam = solve_radial_numeric(v, Lambda, 1, 240.0, 3000)[0].lambda;
    CHECK(lam > prev);
    prev = lam;
  }
}

TEST_CASE("too small a box is reported") {
  CHECK_THROWS_AS(solve_radial_numeric([](double r) { return -1.0 / r; }, 0.0, 3, 10.0, 1000), ConvergenceError);
}

TEST_CASE("eigenfunctions are normalized and match the closed form") {
  for (int n_r = 0; n_r <= 2; ++n_r) {
    const double Lambda = 2.0;
    const double N = n_r + 2.0;
    const double r_max = default_r_max(1.0, N);
    auto num = solve_radial_numeric([](double r) { return -1.0 / r; }, Lambda, n_r + 1, r_max, 3000).back();
    const auto ana = coulomb_radial_solution(Lambda, n_r, 1.0, r_max, 3000);
    CHECK(ana.lambda == doctest::Approx(hydrogen(n_r, 1)).epsilon(1e-15));
    CHECK(ana.n_r == n_r);
    double norm = 0.0, diff = 0.0, peak = 0.0;
    const double h = ana.r[1] - ana.r[0];
    for (std::size_t i = 0; i < ana.U.size(); ++i) {
      norm += ana.U[i] * ana.U[i] * h;
      diff = std::max(diff, std::abs(ana.U[i] - num.U[i]));
      peak = std::max(peak, std::abs(ana.U[i]));
    }
    CAPTURE(n_r);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(diff < 5e-3 * peak);
    CHECK(sign_changes(ana.U) == n_r);
  }
}

TEST_CASE("closed-form Coulomb state satisfies the radial equation") {
  for (double Lambda : {0.0, 1.2071067811865475, 2.0, 6.0}) {
    for (int n_r = 0; n_r <= 2; ++n_r) {
      const double strength = 1.5;
      const auto s = coulomb_radial_solution(Lambda, n_r, strength);
      double worst = 0.0, peak = 0.0;
      for (double r = 0.2; r < 40.0; r += 0.37) {
        const double h = 1e-3 * r;
        const double d2 = (s.at(r + h) - 2.0 * s.at(r) + s.at(r - h)) / (h * h);
        const double res = -d2 + (Lambda / (r * r) - strength / r) * s.at(r) - s.lambda * s.at(r);
        worst = std::max(worst, std::abs(res));
        peak = std::max(peak, std::abs(s.at(r)));
      }
      CAPTURE(Lambda);
      CAPTURE(n_r);
      CHECK(worst < 1e-5 * peak);
    }
  }
}

TEST_CASE("radial_solution dispatch") {
  const auto a = radial_solution(CoulombRadial{2.0}, 1.0, 0.0, 1);
  CHECK(a.analytic);
  CHECK(a.lambda == doctest::Approx(hydrogen(1, 0, 2.0)).epsilon(1e-15));
  RadialOptions opt;
  opt.numeric_coulomb = true;
  const auto n = radial_solution(CoulombRadial{2.0}, 1.0, 0.0, 1, opt);
  CHECK_FALSE(n.analytic);
  CHECK(std::abs(n.lambda / a.lambda - 1.0) < 1e-4);
  CHECK_THROWS_AS(radial_solution(ZeroRadial{}, 1.0, 0.0, 0), ConvergenceError);
  CHECK_THROWS_AS(radial_solution(CoulombRadial{-1.0}, 1.0, 0.0, 0), DomainError);

  TabulatedRadial t;
  for (int i = 0; i <= 8000; ++i) {
    const double r = 0.01 + 0.02 * i;
    t.r.push_back(r);
    t.v.push_back(-1.0 / r);
  }
  const auto tab = radial_solution(t, 1.0, 2.0, 0);
  CHECK(std::abs(tab.lambda / hydrogen(0, 1) - 1.0) < 1e-3);
}

TEST_CASE("Dirac Coulomb fixed point matches M(N^2 - a^2)/(N^2 + a^2)") {
  for (double alpha : {0.05, 0.1, 0.2}) {
    for (int N : {1, 2}) {
      const int l = N - 1;
      const auto sol = dirac_self_consistent(coulomb(alpha), 1.0, {0, l, 0}, 1e-12);
      REQUIRE(sol.E);
      CAPTURE(alpha);
      CAPTURE(N);
      CHECK(std::abs(*sol.E - dirac_coulomb(1.0, alpha, N)) < 1e-8);
      CHECK(std::abs(sol.lambda - (*sol.E * *sol.E - 1.0)) < 1e-10);
    }
  }
}

TEST_CASE("Dirac examples") {
  const auto s = dirac_self_consistent(coulomb(0.1), 1.0, {0, 0, 0}, 1e-12);
  CHECK(*s.E == doctest::Approx(0.9801980198).epsilon(1e-9));
  const auto s2 = dirac_self_consistent(coulomb(0.1), 1.0, {0, 1, 0}, 1e-12);
  CHECK(*s2.E == doctest::Approx(0.9950124688).epsilon(1e-9));
  const auto free = dirac_self_consistent(coulomb(0.0), 1.0, {0, 0, 0}, 1e-12);
  CHECK(*free.E == 1.0);
}

TEST_CASE("Dirac fixed point on random couplings and masses") {
  auto g = oracle::rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const double M = oracle::uniform(g, 0.5, 3.0);
    const double alpha = oracle::uniform(g, 0.01, 0.3);
    const int n_r = oracle::uniform_int(g, 0, 2);
    const int l = oracle::uniform_int(g, 0, 2);
    const auto sol = dirac_self_consistent(coulomb(alpha), M, {n_r, l, 0}, 1e-13);
    CHECK(std::abs(*sol.E - dirac_coulomb(M, alpha, n_r + l + 1.0)) < 1e-8 * M);
  }
}

TEST_CASE("Dirac negative branch and bad input") {
  DiracOptions opt;
  opt.negative_branch = true;
  opt.E0 = -0.5;
  // the negative branch needs E + M > 0, so it exists only for E in (-M, 0)
  CHECK_THROWS(dirac_self_consistent(coulomb(0.1), 1.0, {0, 0, 0}, 1e-12, opt));
  CHECK_THROWS_AS(dirac_self_consistent(coulomb(0.1), 1.0, {0, 0, 0}, 0.0), DomainError);
}
