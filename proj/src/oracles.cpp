#include "epde/oracles.hpp"

#include <cmath>

namespace epde {

namespace {
void check_steps(long N) {
  if (N < 1)
    throw ValidationError("reference scheme: N must be >= 1, got " +
                          std::to_string(N));
}
}  // namespace

Eigen::VectorXd l1_solve(const FdeProblem& problem, long N) {
  const FdeProblem p = validate_problem(problem);
  check_steps(N);
  if (!is_linear(p))
    throw ValidationError("l1_solve handles linear right-hand sides only");
  const auto& lin = std::get<LinearRhs>(p.rhs);

  const double dt = p.horizon / static_cast<double>(N);
  const double mu = std::pow(dt, -p.alpha) / std::tgamma(2.0 - p.alpha);

  // b_j = (j+1)^{1-α} - j^{1-α}
  Eigen::VectorXd b(N);
  for (long j = 0; j < N; ++j)
    b[j] = std::pow(j + 1.0, 1.0 - p.alpha) - std::pow(j, 1.0 - p.alpha);

  Eigen::VectorXd phi(N + 1);
  phi[0] = p.phi0;
  for (long n = 0; n < N; ++n) {
    // μ Σ_{j=0}^{n} b_j (φ^{n+1-j} - φ^{n-j}) = -λ φ^{n+1} + f(t_{n+1})
    double hist = 0.0;
    for (long j = 1; j <= n; ++j)
      hist += b[j] * (phi[n + 1 - j] - phi[n - j]);
    const double f =
        lin.forcing ? lin.forcing((n + 1) * dt) : 0.0;
    phi[n + 1] = (f + mu * (phi[n] - hist)) / (mu + lin.lambda);
  }
  return phi;
}

Eigen::VectorXd adams_solve(const FdeProblem& problem, long N) {
  const FdeProblem p = validate_problem(problem);
  check_steps(N);

  const double a = p.alpha;
  const double dt = p.horizon / static_cast<double>(N);
  const double c_pred = std::pow(dt, a) / (a * std::tgamma(a));
  const double c_corr = std::pow(dt, a) / std::tgamma(a + 2.0);

  Eigen::VectorXd phi(N + 1), fv(N + 1);
  phi[0] = p.phi0;
  fv[0] = rhs_value(p, 0.0, p.phi0);

  for (long n = 0; n < N; ++n) {
    const double t_next = (n + 1) * dt;
    // predictor: product rectangle rule
    double pred = 0.0;
    for (long j = 0; j <= n; ++j) {
      const double w =
          std::pow(n + 1.0 - j, a) - std::pow(static_cast<double>(n - j), a);
      pred += w * fv[j];
    }
    pred = p.phi0 + c_pred * pred;

    // corrector: product trapezoid rule, one sweep
    double corr = std::pow(static_cast<double>(n), a + 1.0) -
                  (n - a) * std::pow(n + 1.0, a);  // j = 0 weight
    corr *= fv[0];
    for (long j = 1; j <= n; ++j) {
      const double w = std::pow(n - j + 2.0, a + 1.0) +
                       std::pow(static_cast<double>(n - j), a + 1.0) -
                       2.0 * std::pow(n - j + 1.0, a + 1.0);
      corr += w * fv[j];
    }
    corr += rhs_value(p, t_next, pred);  // weight 1 on the predicted node
    phi[n + 1] = p.phi0 + c_corr * corr;
    fv[n + 1] = rhs_value(p, t_next, phi[n + 1]);
  }
  return phi;
}

}  // namespace epde
