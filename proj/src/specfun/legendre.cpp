#include "pseudopt/specfun.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "pseudopt/error.hpp"

namespace pseudopt::specfun {

namespace {

// Recurrence in l from P_m^m; s = sqrt(1 - x^2) is passed in so callers that
// know the angle avoid the cancellation in 1 - x^2 near the poles.
double legendre_core(int l, int m, double x, double s) {
  if (l < 0) throw DomainError("assoc_legendre: l must be non-negative");
  if (std::abs(m) > l) {
    throw DomainError("assoc_legendre: |m| = " + std::to_string(std::abs(m)) + " exceeds l = " +
                      std::to_string(l));
  }
  const int am = std::abs(m);
  // P_m^m = (-1)^m (2m-1)!! (1-x^2)^{m/2}
  double pmm = 1.0;
  double fact = 1.0;
  for (int i = 1; i <= am; ++i) {
    pmm *= -fact * s;
    fact += 2.0;
  }
  double result = pmm;
  if (l > am) {
    double pmmp1 = x * (2.0 * am + 1.0) * pmm;
    for (int ll = am + 2; ll <= l; ++ll) {
      const double pll = (x * (2.0 * ll - 1.0) * pmmp1 - (ll + am - 1.0) * pmm) / (ll - am);
      pmm = pmmp1;
      pmmp1 = pll;
    }
    result = pmmp1;
  }
  if (m < 0) {
    // P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m
    double ratio = 1.0;
    for (int i = l - am + 1; i <= l + am; ++i) ratio /= i;
    result *= (am % 2 == 0 ? 1.0 : -1.0) * ratio;
  }
  return result;
}

}  // namespace

double assoc_legendre(int l, int m, double x) {
  if (!(std::abs(x) <= 1.0)) throw DomainError("assoc_legendre: |x| must not exceed 1");
  return legendre_core(l, m, x, std::sqrt((1.0 - x) * (1.0 + x)));
}

double assoc_legendre_angle(int l, int m, double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw DomainError("assoc_legendre_angle: theta outside [0, pi]");
  return legendre_core(l, m, std::cos(theta), std::sin(theta));
}

double hyp2f1_terminating(int k, double b, double d, double y) {
  if (k < 0) throw DomainError("hyp2f1_terminating: k must be non-negative");
  for (int j = 0; j < k; ++j) {
    if (d == -static_cast<double>(j)) {
      throw DomainError("hyp2f1_terminating: d = " + std::to_string(d) +
                        " is a pole of the series");
    }
  }
  double term = 1.0;
  double sum = 1.0;
  for (int j = 0; j < k; ++j) {
    term *= (-k + j) * (b + j) / ((d + j) * (j + 1.0)) * y;
    sum += term;
  }
  return sum;
}

}  // namespace pseudopt::specfun
