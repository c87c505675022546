#include "pseudopt/specfun.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

#include "pseudopt/error.hpp"

namespace pseudopt::specfun {

Complex quad_periodic(std::span<const Complex> samples) {
  if (samples.size() < 8) {
    throw DomainError("quad_periodic: need at least 8 samples, got " +
                      std::to_string(samples.size()));
  }
  Complex sum{0.0, 0.0};
  for (const auto& s : samples) sum += s;
  return sum * (2.0 * std::numbers::pi / static_cast<double>(samples.size()));
}

JacobiRecurrence jacobi_recurrence(int n, double alpha, double beta) {
  if (n < 1) throw DomainError("jacobi_recurrence: n must be positive");
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw DomainError("jacobi_recurrence: exponents must exceed -1");
  }
  JacobiRecurrence rec;
  rec.diag.resize(n);
  rec.offdiag.resize(n);
  const double ab = alpha + beta;
  rec.diag[0] = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double t = 2.0 * k + ab;
    rec.diag[k] = (beta * beta - alpha * alpha) / (t * (t + 2.0));
  }
  for (int k = 1; k <= n; ++k) {
    const double t = 2.0 * k + ab;
    double bk;
    if (k == 1) {
      // (1 + a + b) cancels between numerator and denominator.
      bk = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      bk = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (t * t * (t + 1.0) * (t - 1.0));
    }
    rec.offdiag[k - 1] = std::sqrt(bk);
  }
  rec.mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                     std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  return rec;
}

GaussRule gauss_jacobi(int n, double alpha, double beta) {
  const JacobiRecurrence rec = jacobi_recurrence(n, alpha, beta);
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(rec.diag.data(), n);
  Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(rec.offdiag.data(), n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw ConvergenceError("gauss_jacobi: eigensolver failed");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = rec.mu0 * v0 * v0;
  }
  return rule;
}

void orthonormal_poly(const JacobiRecurrence& rec, int count, double x, std::span<double> p,
                      std::span<double> dp) {
  if (count < 1) return;
  if (static_cast<std::size_t>(count) > rec.diag.size() || p.size() < static_cast<std::size_t>(count) ||
      dp.size() < static_cast<std::size_t>(count)) {
    throw DomainError("orthonormal_poly: recurrence or output too short");
  }
  p[0] = 1.0 / std::sqrt(rec.mu0);
  dp[0] = 0.0;
  double p_prev = 0.0, dp_prev = 0.0;
  for (int k = 0; k + 1 < count; ++k) {
    const double s_next = rec.offdiag[k];
    const double s_k = k > 0 ? rec.offdiag[k - 1] : 0.0;
    p[k + 1] = ((x - rec.diag[k]) * p[k] - s_k * p_prev) / s_next;
    dp[k + 1] = ((x - rec.diag[k]) * dp[k] + p[k] - s_k * dp_prev) / s_next;
    p_prev = p[k];
    dp_prev = dp[k];
  }
}

}  // namespace pseudopt::specfun
