#include "epde/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace epde {

JacobiRecurrence jacobi_recurrence(int n, double a, double b) {
  std::vector<std::string> issues;
  if (n < 1) issues.push_back("n must be >= 1, got " + std::to_string(n));
  if (!(a > -1.0)) issues.push_back("a must be > -1, got " + std::to_string(a));
  if (!(b > -1.0)) issues.push_back("b must be > -1, got " + std::to_string(b));
  if (!issues.empty()) throw ValidationError(std::move(issues));

  JacobiRecurrence r;
  r.diag.resize(n);
  r.offdiag.resize(n > 1 ? n - 1 : 0);
  const double ab = a + b;
  r.diag[0] = (b - a) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double den = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
    r.diag[k] = (b * b - a * a) / den;
  }
  if (n > 1) {
    // dedicated k=1 form: the general one is 0/0 when a+b = -1
    const double b1 =
        4.0 * (a + 1.0) * (b + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
    r.offdiag[0] = std::sqrt(b1);
  }
  for (int k = 2; k < n; ++k) {
    const double t = 2.0 * k + ab;
    const double bk = 4.0 * k * (k + a) * (k + b) * (k + ab) /
                      (t * t * (t + 1.0) * (t - 1.0));
    r.offdiag[k - 1] = std::sqrt(bk);
  }
  return r;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> jacobi_rule_01(int n, double a,
                                                           double b,
                                                           double total_mass) {
  const JacobiRecurrence rec = jacobi_recurrence(n, a, b);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(rec.diag, rec.offdiag,
                            Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw NumericalError("jacobi_rule_01: tridiagonal eigensolve failed");

  // Golub–Welsch: nodes are eigenvalues (ascending), weights are squared
  // first eigenvector components; rescale so the sum is exactly total_mass.
  Eigen::VectorXd nodes = ((es.eigenvalues().array() + 1.0) * 0.5).matrix();
  Eigen::VectorXd w = es.eigenvectors().row(0).transpose().array().square();
  w *= total_mass / w.sum();
  return {std::move(nodes), std::move(w)};
}

ThetaGrid gauss_jacobi_grid(int M, double alpha) {
  std::vector<std::string> issues;
  if (M < 0) issues.push_back("M must be >= 0, got " + std::to_string(M));
  if (!(alpha > 0.0 && alpha < 1.0))
    issues.push_back("alpha must lie in (0,1), got " + std::to_string(alpha));
  if (!issues.empty()) throw ValidationError(std::move(issues));

  // θ^{-α}(1-θ)^{α-1}: Jacobi exponents a = α-1 on (1-θ), b = -α on θ.
  auto [nodes, w] = jacobi_rule_01(M + 1, alpha - 1.0, -alpha, 1.0);
  ThetaGrid g;
  g.alpha = alpha;
  g.theta = std::move(nodes);
  g.weight = std::move(w);
  return g;
}

ExpPowerMoment::ExpPowerMoment(double p) : p_(p) {
  if (!(p > -1.0))
    throw ValidationError("ExpPowerMoment: p must be > -1, got " +
                          std::to_string(p));
  std::tie(u_, w_) = jacobi_rule_01(64, p, 0.0, 1.0 / (p + 1.0));
}

double ExpPowerMoment::operator()(double c, double t) const {
  if (!(c >= 0.0) || !(t >= 0.0))
    throw ValidationError("ExpPowerMoment: requires c >= 0 and t >= 0");
  if (t == 0.0) return 0.0;
  const double v = c * t;
  const double tp = std::pow(t, p_ + 1.0);
  if (v <= 70.0) {
    // ∫₀¹ e^{-v·u} (1-u)^p du against the cached Jacobi rule
    return tp * (w_.array() * (-v * u_.array()).exp()).sum();
  }
  // Integrand support is u ≲ 45/v; Gauss–Legendre on [0, 45/v].
  static const auto gl = jacobi_rule_01(64, 0.0, 0.0, 1.0);
  const double cut = 45.0 / v;
  double s = 0.0;
  for (int i = 0; i < gl.first.size(); ++i) {
    const double u = cut * gl.first[i];
    s += gl.second[i] * std::exp(-v * u) * std::pow(1.0 - u, p_);
  }
  return tp * cut * s;
}

double exp_power_moment(double p, double c, double t) {
  return ExpPowerMoment(p)(c, t);
}

}  // namespace epde
