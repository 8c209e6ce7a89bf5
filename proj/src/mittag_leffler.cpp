#include "epde/mittag_leffler.hpp"

#include <cmath>
#include <numbers>

#include "epde/detail/double_double.hpp"

namespace epde {
namespace detail {

namespace {
// sin(πw) with the reduction done on w, so large arguments stay exact.
double sin_pi(double w) {
  double r = std::remainder(w, 2.0);  // r ∈ [-1,1], sin(πw) = sin(πr)
  const double sign = std::copysign(1.0, r);
  r = std::abs(r);
  if (r > 0.5) r = 1.0 - r;  // sin(πr) is symmetric about r = 1/2
  return sign * std::sin(std::numbers::pi * r);
}
}  // namespace

double ml_series(double alpha, double z, double target_abs_err) {
  if (z == 0.0) return 1.0;
  const double tol = target_abs_err / 10.0;
  const dd ln_az = dd_log(dd{std::abs(z)});
  const bool negative = z < 0.0;

  dd sum{1.0, 0.0};  // m = 0 term
  int below = 0;
  for (int m = 1; m <= 100000; ++m) {
    // term = ±exp(m ln|z| - ln Γ(αm + 1))
    const dd am = two_prod(alpha, static_cast<double>(m));
    const dd expo = sub(mul(ln_az, static_cast<double>(m)),
                        dd_lgamma(add(am, 1.0)));
    if (expo.hi > 710.0)
      throw NumericalError("ml: series term overflows double range at m = " +
                           std::to_string(m) + " (alpha = " +
                           std::to_string(alpha) + ", z = " +
                           std::to_string(z) + ")");
    double mag_hint = expo.hi;
    if (mag_hint < std::log(tol) - 5.0) {
      if (++below >= 3) break;  // three consecutive negligible terms
      continue;
    }
    below = 0;
    dd term = dd_exp(expo);
    if (negative && (m & 1)) term = neg(term);
    sum = add(sum, term);
    if (!std::isfinite(sum.hi))
      throw NumericalError("ml: series sum overflows double range");
  }
  return static_cast<double>(sum);
}

double ml_asymptotic(double alpha, double z, double target_abs_err) {
  if (!(z < 0.0))
    throw ValidationError("ml_asymptotic: requires z < 0");
  const double x = -z;
  const double lnx = std::log(x);
  const double tol = target_abs_err / 10.0;

  // E_α(-x) ~ Σ_{n≥1} (-1)^{n+1} x^{-n} sin(παn) Γ(αn) / π, truncated at
  // the smallest term.
  double sum = 0.0;
  double prev_mag = HUGE_VAL;
  double smallest = HUGE_VAL;
  bool reached_tol = false;
  for (int n = 1; n <= 300; ++n) {
    const double an = alpha * n;
    const double mag = std::exp(std::lgamma(an) - n * lnx) / std::numbers::pi;
    if (mag > prev_mag) break;  // past the optimal truncation point
    prev_mag = mag;
    smallest = mag;
    const double term = ((n & 1) ? 1.0 : -1.0) * mag * sin_pi(an);
    sum += term;
    if (mag < tol) {
      reached_tol = true;
      break;
    }
  }
  if (!reached_tol && smallest > target_abs_err)
    throw NumericalError(
        "ml: asymptotic expansion bottoms out at " + std::to_string(smallest) +
        " before reaching the requested accuracy " +
        std::to_string(target_abs_err));
  return sum;
}

}  // namespace detail

double ml(double alpha, double z, double target_abs_err) {
  std::vector<std::string> issues;
  if (!(alpha > 0.0 && alpha <= 1.0))
    issues.push_back("alpha must lie in (0,1], got " + std::to_string(alpha));
  if (!(std::abs(z) <= 100.0) || !std::isfinite(z))
    issues.push_back("z must satisfy |z| <= 100, got " + std::to_string(z));
  if (!(target_abs_err > 0.0))
    issues.push_back("target_abs_err must be positive");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  if (alpha == 1.0) return std::exp(z);  // E_1 = exp
  if (z >= 0.0) {
    if (z > 0.0 && std::log(z) / alpha > std::log(709.0))
      throw NumericalError("ml: E_alpha(" + std::to_string(z) +
                           ") exceeds double range for alpha = " +
                           std::to_string(alpha));
    return detail::ml_series(alpha, z, target_abs_err);
  }
  // z < 0: series while the cancellation stays within double-double reach.
  if (std::log(-z) / alpha <= std::log(33.0))
    return detail::ml_series(alpha, z, target_abs_err);
  return detail::ml_asymptotic(alpha, z, target_abs_err);
}

double exact_solution(int case_id, double alpha, double lambda, double t) {
  std::vector<std::string> issues;
  if (!(alpha > 0.0 && alpha < 1.0))
    issues.push_back("alpha must lie in (0,1), got " + std::to_string(alpha));
  if (!(t >= 0.0) || !std::isfinite(t))
    issues.push_back("t must be >= 0 and finite");
  if (!std::isfinite(lambda)) issues.push_back("lambda must be finite");
  switch (case_id) {
    case 1:
    case 2:
    case 4:
      break;
    case 3:
    case 5:
      issues.push_back("case " + std::to_string(case_id) +
                       " has no closed form; compare against a fine-step "
                       "self-reference trajectory instead");
      break;
    default:
      issues.push_back("unknown case id " + std::to_string(case_id) +
                       " (supported: 1, 2, 4)");
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));

  switch (case_id) {
    case 1:
      return std::pow(t, alpha);
    case 2:
      return t == 0.0 ? 1.0 : ml(alpha, -lambda * std::pow(t, alpha));
    default:
      return std::pow(t, 2.0 + alpha);
  }
}

}  // namespace epde
