#include "epde/core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace epde {

std::string ValidationError::join(const std::vector<std::string>& v) {
  std::ostringstream os;
  os << "invalid input (" << v.size() << " issue" << (v.size() == 1 ? "" : "s")
     << "):";
  for (const auto& s : v) os << "\n  - " << s;
  return os.str();
}

ThetaCoeffs theta_coefficients(double theta, double alpha) {
  std::vector<std::string> issues;
  if (!(theta > 0.0 && theta < 1.0))
    issues.push_back("theta must lie in (0,1), got " + std::to_string(theta));
  if (!(alpha > 0.0 && alpha < 1.0))
    issues.push_back("alpha must lie in (0,1), got " + std::to_string(alpha));
  if (!issues.empty()) throw ValidationError(std::move(issues));

  const double om = 1.0 - theta;
  ThetaCoeffs c;
  c.c0 = 1.0 / om;
  c.c1 = theta / om;
  // 1/(Γ(1-α)Γ(α)) = sin(πα)/π by the reflection formula.
  const double norm = std::sin(std::numbers::pi * alpha) / std::numbers::pi;
  c.w_alpha = std::pow(theta, -alpha) * std::pow(om, alpha - 1.0) * norm;
  c.w_alpha0 = om * c.w_alpha;
  c.w_alpha1 = theta * c.w_alpha;
  return c;
}

bool is_linear(const FdeProblem& p) {
  return std::holds_alternative<LinearRhs>(p.rhs);
}

double rhs_value(const FdeProblem& p, double t, double phi) {
  if (const auto* lin = std::get_if<LinearRhs>(&p.rhs)) {
    double f = lin->forcing ? lin->forcing(t) : 0.0;
    return -lin->lambda * phi + f;
  }
  return std::get<NonlinearRhs>(p.rhs).rhs(t, phi);
}

double forcing_value(const FdeProblem& p, double t) {
  const auto* lin = std::get_if<LinearRhs>(&p.rhs);
  if (!lin) throw ValidationError("forcing_value requires a linear right-hand side");
  return lin->forcing ? lin->forcing(t) : 0.0;
}

FdeProblem validate_problem(const FdeProblem& raw) {
  std::vector<std::string> issues;
  if (!(raw.alpha > 0.0 && raw.alpha < 1.0))
    issues.push_back("alpha must lie in (0,1), got " + std::to_string(raw.alpha));
  if (!std::isfinite(raw.phi0))
    issues.push_back("phi0 must be finite");
  if (!(raw.horizon > 0.0) || !std::isfinite(raw.horizon))
    issues.push_back("horizon must be positive and finite, got " +
                     std::to_string(raw.horizon));
  if (const auto* lin = std::get_if<LinearRhs>(&raw.rhs)) {
    if (!std::isfinite(lin->lambda))
      issues.push_back("lambda must be finite");
  } else if (!std::get<NonlinearRhs>(raw.rhs).rhs) {
    issues.push_back("nonlinear right-hand side callback must be set");
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return raw;
}

}  // namespace epde
