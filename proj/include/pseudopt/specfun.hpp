#pragma once

// Complex-argument Bessel functions, associated Legendre functions, terminating
// Gauss hypergeometric sums and the quadrature rules the solvers are built on.
// Everything here is a pure function of its arguments.

#include <complex>
#include <span>
#include <vector>

namespace pseudopt {

using Complex = std::complex<double>;

struct SeriesControl {
  double rel_tol = 1e-15;
  int max_terms = 500;
};

namespace specfun {

/// |z| above which I_nu switches from the ascending series to the Hankel expansion.
inline constexpr double kBesselCrossover = 25.0;

/// Modified Bessel function of the first kind I_nu(z), real order nu >= 0,
/// principal branch. Ascending series for |z| <= 25, large-argument expansion
/// above when it converges to full precision (|z| large against nu^2). Where the
/// series loses digits to cancellation (z near the imaginary axis) Miller's
/// backward recurrence is used instead.
Complex bessel_i(double order, Complex z, SeriesControl ctl = {});

/// Modified Bessel function of the second kind K_nu(z), nu >= 0, principal
/// branch (cut along the negative real axis, upper lip for arg z = pi).
/// Temme's series for |z| < 2, Steed's continued fraction otherwise, and the
/// analytic-continuation formula for Re z < 0.
Complex bessel_k(double order, Complex z, SeriesControl ctl = {});

/// P_l^m(x) including the Condon-Shortley phase (-1)^m. Negative m is allowed.
double assoc_legendre(int l, int m, double x);

/// P_l^m(cos theta) for theta in [0, pi], using sin(theta) directly so the
/// (1 - x^2)^{m/2} factor keeps full relative precision near the poles.
double assoc_legendre_angle(int l, int m, double theta);

/// 2F1(-k, b; d; y), the (k+1)-term polynomial.
double hyp2f1_terminating(int k, double b, double d, double y);

/// Rectangle rule over one period for samples on the uniform grid phi_j = 2 pi j / N.
Complex quad_periodic(std::span<const Complex> samples);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Three-term recurrence of the orthonormal Jacobi polynomials for the weight
/// (1-x)^alpha (1+x)^beta on [-1, 1]:
///   x p_n = s_{n+1} p_{n+1} + diag_n p_n + s_n p_{n-1},   p_0 = 1/sqrt(mu0).
struct JacobiRecurrence {
  std::vector<double> diag;     // size n
  std::vector<double> offdiag;  // offdiag[j] = s_{j+1}, size n
  double mu0 = 0.0;
};

JacobiRecurrence jacobi_recurrence(int n, double alpha, double beta);

/// n-point Gauss rule for the Jacobi weight (Golub-Welsch). alpha, beta > -1.
GaussRule gauss_jacobi(int n, double alpha, double beta);

/// Values and first derivatives of the first `count` orthonormal polynomials at x.
void orthonormal_poly(const JacobiRecurrence& rec, int count, double x,
                      std::span<double> p, std::span<double> dp);

}  // namespace specfun
}  // namespace pseudopt
