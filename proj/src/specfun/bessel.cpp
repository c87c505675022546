#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "pseudopt/error.hpp"
#include "pseudopt/specfun.hpp"

namespace pseudopt::specfun {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

// Taylor coefficients of 1/Gamma(1+x) about x = 0.
constexpr std::array<double, 29> kRecipGamma = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
    -2.2987456844353702066e-19,
};

void require_finite(double order, Complex z, const char* who) {
  if (!std::isfinite(order) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError(std::string(who) + ": non-finite input");
  }
  if (order < 0.0) throw DomainError(std::string(who) + ": order must be non-negative");
}

bool is_integer(double v) { return v == std::floor(v); }

// Negative reals sit on the upper lip of the cut.
Complex canonical(Complex z) {
  if (z.imag() == 0.0) return {z.real(), 0.0};
  return z;
}

// (z/2)^nu / Gamma(nu+1); integer orders use repeated multiplication so that
// even orders stay exactly even in z.
Complex leading_factor(double nu, Complex z) {
  const Complex half = 0.5 * z;
  if (is_integer(nu) && nu <= 100.0) {
    Complex p{1.0, 0.0};
    const int n = static_cast<int>(nu);
    for (int i = 0; i < n; ++i) p *= half;
    return p / std::tgamma(nu + 1.0);
  }
  return std::exp(nu * std::log(half) - std::lgamma(nu + 1.0));
}

struct SeriesResult {
  Complex value;
  double loss;  // sum |terms| / |sum|
};

SeriesResult i_series(double nu, Complex z, const SeriesControl& ctl) {
  const Complex q = 0.25 * z * z;
  Complex term{1.0, 0.0};
  Complex sum = term;
  double abs_sum = 1.0;
  for (int j = 0; j < ctl.max_terms; ++j) {
    term *= q / ((j + 1.0) * (nu + j + 1.0));
    sum += term;
    abs_sum += std::abs(term);
    const bool shrinking = std::abs(q) < (j + 1.0) * (nu + j + 1.0);
    if (shrinking && std::abs(term) <= ctl.rel_tol * std::abs(sum)) {
      const Complex lead = leading_factor(nu, z);
      const double mag = std::abs(sum);
      return {lead * sum, mag > 0.0 ? abs_sum / mag : HUGE_VAL};
    }
  }
  throw ConvergenceError("bessel_i: power series did not converge within " +
                         std::to_string(ctl.max_terms) + " terms");
}

// Miller backward recurrence for f_k ~ I_{base+k}(z), started far above the
// wanted order where the ratio to I_nu is negligible.
std::vector<Complex> miller_sequence(double base, Complex z, int top) {
  std::vector<Complex> f(top + 2, Complex{0.0, 0.0});
  f[top] = Complex{1e-30, 0.0};
  for (int k = top; k >= 1; --k) {
    f[k - 1] = (2.0 * (base + k) / z) * f[k] + f[k + 1];
    if (std::abs(f[k - 1]) > 1e200) {
      for (int i = k - 1; i <= top; ++i) f[i] *= 1e-200;
    }
  }
  return f;
}

// Used where the power series cancels badly (large |Im z|). Integer orders are
// normalized by e^z = I_0 + 2 sum I_k in the right half plane, other orders by
// (z/2)^nu = sum_k (-1)^k (nu+2k) Gamma(nu+k)/k! I_{nu+2k}(z).
SeriesResult i_miller(double nu, Complex z) {
  const int top = 2 * static_cast<int>(std::ceil(std::abs(z))) + 60 + static_cast<int>(nu);
  if (is_integer(nu)) {
    const int n = static_cast<int>(nu);
    const bool flip = z.real() < 0.0;
    const Complex w = flip ? -z : z;
    const auto f = miller_sequence(0.0, w, top);
    Complex s = f[0];
    double abs_s = std::abs(f[0]);
    for (int k = 1; k <= top; ++k) {
      s += 2.0 * f[k];
      abs_s += 2.0 * std::abs(f[k]);
    }
    Complex r = f[n] * (std::exp(w) / s);
    if (flip && n % 2 == 1) r = -r;
    return {r, abs_s / std::abs(s)};
  }
  const auto f = miller_sequence(nu, z, top);
  Complex s{0.0, 0.0};
  double abs_s = 0.0;
  for (int k = 0; 2 * k <= top; ++k) {
    const double c = k == 0 ? std::tgamma(nu + 1.0)
                            : (nu + 2.0 * k) * std::exp(std::lgamma(nu + k) - std::lgamma(k + 1.0));
    s += (k % 2 == 0 ? c : -c) * f[2 * k];
    abs_s += std::abs(c * f[2 * k]);
  }
  return {f[0] * std::exp(nu * std::log(0.5 * z)) / s, abs_s / std::abs(s)};
}

struct AsymptoticResult {
  Complex value;
  bool converged;
};

AsymptoticResult i_asymptotic(double nu, Complex z, const SeriesControl& ctl) {
  const double mu = 4.0 * nu * nu;
  Complex term{1.0, 0.0};
  Complex s_alt = term;  // sum (-1)^k a_k / z^k
  Complex s_pos = term;  // sum a_k / z^k
  double prev = HUGE_VAL;
  bool converged = false;
  for (int k = 1; k < ctl.max_terms; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (8.0 * k) / z;
    const double mag = std::abs(term);
    if (mag > prev) break;  // past the smallest term of the divergent series
    s_alt += (k % 2 == 0 ? 1.0 : -1.0) * term;
    s_pos += term;
    if (mag <= ctl.rel_tol * std::min(std::abs(s_alt), std::abs(s_pos)) || mag == 0.0) {
      converged = true;
      break;
    }
    prev = mag;
  }
  const Complex root = std::sqrt(2.0 * kPi * z);
  Complex result = std::exp(z) / root * s_alt;
  if (z.real() < 21.0) {
    const Complex phase = z.imag() >= 0.0 ? kI * std::exp(kI * (nu * kPi))
                                          : -kI * std::exp(-kI * (nu * kPi));
    result += phase * std::exp(-z) / root * s_pos;
  }
  return {result, converged};
}

// 1/Gamma(1+mu), 1/Gamma(1-mu) and Temme's gamma_1, gamma_2 for |mu| <= 1/2.
struct TemmeGammas {
  double gam1, gam2, gampl, gammi;
};

TemmeGammas temme_gammas(double mu) {
  double even = 0.0, odd = 0.0;  // sum over even / odd k of c_k mu^k
  double pw = 1.0;
  double odd_reduced = 0.0;  // sum over odd k of c_k mu^{k-1}
  for (std::size_t k = 0; k < kRecipGamma.size(); ++k) {
    if (k % 2 == 0) {
      even += kRecipGamma[k] * pw;
    } else {
      odd += kRecipGamma[k] * pw;
      odd_reduced += kRecipGamma[k] * (pw / (mu == 0.0 ? 1.0 : mu));
    }
    pw *= mu;
  }
  if (mu == 0.0) odd_reduced = kRecipGamma[1];
  return {-odd_reduced, even, even + odd, even - odd};
}

// K_mu(z), K_{mu+1}(z) for |mu| <= 1/2 by Temme's series (|z| < 2).
void k_temme(double mu, Complex z, const SeriesControl& ctl, Complex& kmu, Complex& kmu1) {
  const double eps = ctl.rel_tol;
  const Complex x2 = 0.5 * z;
  const double pimu = kPi * mu;
  const double fact = std::abs(pimu) < eps ? 1.0 : pimu / std::sin(pimu);
  const Complex d = -std::log(x2);
  Complex e = mu * d;
  const Complex fact2 = std::abs(e) < eps ? Complex{1.0, 0.0} : std::sinh(e) / e;
  const TemmeGammas g = temme_gammas(mu);
  Complex ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
  Complex sum = ff;
  e = std::exp(e);
  Complex p = 0.5 * e / g.gampl;
  Complex q = 0.5 / (e * g.gammi);
  Complex c{1.0, 0.0};
  const Complex dd = x2 * x2;
  Complex sum1 = p;
  const double mu2 = mu * mu;
  for (int i = 1; i <= ctl.max_terms; ++i) {
    ff = (static_cast<double>(i) * ff + p + q) / (i * static_cast<double>(i) - mu2);
    c *= dd / static_cast<double>(i);
    p /= (i - mu);
    q /= (i + mu);
    const Complex del = c * ff;
    sum += del;
    sum1 += c * (p - static_cast<double>(i) * ff);
    if (std::abs(del) < std::abs(sum) * eps) {
      kmu = sum;
      kmu1 = sum1 * (2.0 / z);
      return;
    }
  }
  throw ConvergenceError("bessel_k: Temme series did not converge");
}

// Steed's continued fraction CF2 (|z| >= 2, Re z >= 0).
void k_steed(double mu, Complex z, Complex& kmu, Complex& kmu1) {
  constexpr int kMaxIt = 20000;
  constexpr double kEps = 1e-16;
  Complex b = 2.0 * (1.0 + z);
  Complex d = 1.0 / b;
  Complex h = d;
  Complex delh = d;
  Complex q1{0.0, 0.0};
  Complex q2{1.0, 0.0};
  const double a1 = 0.25 - mu * mu;
  Complex q{a1, 0.0};
  double c = a1;
  double a = -a1;
  Complex s = 1.0 + q * delh;
  int i = 1;
  for (; i <= kMaxIt; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const Complex qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const Complex dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  if (i > kMaxIt) throw ConvergenceError("bessel_k: continued fraction did not converge");
  h = a1 * h;
  kmu = std::sqrt(kPi / (2.0 * z)) * std::exp(-z) / s;
  kmu1 = kmu * (mu + z + 0.5 - h) / z;
}

Complex k_right_half(double nu, Complex z, const SeriesControl& ctl) {
  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  Complex kmu, kmu1;
  if (std::abs(z) < 2.0) {
    k_temme(mu, z, ctl, kmu, kmu1);
  } else {
    k_steed(mu, z, kmu, kmu1);
  }
  const Complex xi2 = 2.0 / z;
  for (int i = 1; i <= nl; ++i) {
    const Complex next = (mu + i) * xi2 * kmu1 + kmu;
    kmu = kmu1;
    kmu1 = next;
  }
  return kmu;
}

}  // namespace

Complex bessel_i(double order, Complex z, SeriesControl ctl) {
  require_finite(order, z, "bessel_i");
  if (!(ctl.rel_tol > 0.0) || ctl.max_terms < 1) throw DomainError("bessel_i: bad series control");
  z = canonical(z);
  if (z == Complex{0.0, 0.0}) return order == 0.0 ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
  if (std::abs(z.real()) > 700.0) throw DomainError("bessel_i: |Re z| beyond overflow scale");
  Complex result;
  bool done = false;
  if (std::abs(z) > kBesselCrossover) {
    // High orders need |z| >> nu^2 before the expansion reaches full precision.
    const AsymptoticResult a = i_asymptotic(order, z, ctl);
    result = a.value;
    done = a.converged;
  }
  if (!done) {
    const SeriesResult s = i_series(order, z, ctl);
    result = s.value;
    if (s.loss > 1e2) {
      const SeriesResult m = i_miller(order, z);
      if (m.loss < s.loss) result = m.value;
    }
  }
  if (!std::isfinite(result.real()) || !std::isfinite(result.imag())) {
    throw DomainError("bessel_i: result overflowed");
  }
  return result;
}

Complex bessel_k(double order, Complex z, SeriesControl ctl) {
  require_finite(order, z, "bessel_k");
  z = canonical(z);
  if (z == Complex{0.0, 0.0}) throw DomainError("bessel_k: singular at z = 0");
  Complex result;
  if (z.real() < 0.0 && std::abs(z) >= 2.0) {
    // K_nu(w e^{+-i pi}) = e^{-+i nu pi} K_nu(w) -+ i pi I_nu(w), with w = -z in the right half plane.
    const Complex w = -z;
    const double sgn = z.imag() >= 0.0 ? 1.0 : -1.0;
    result = std::exp(-sgn * kI * (order * kPi)) * k_right_half(order, w, ctl) -
             sgn * kI * kPi * bessel_i(order, w, ctl);
  } else {
    result = k_right_half(order, z, ctl);
  }
  if (!std::isfinite(result.real()) || !std::isfinite(result.imag())) {
    throw DomainError("bessel_k: result overflowed");
  }
  return result;
}

}  // namespace pseudopt::specfun
