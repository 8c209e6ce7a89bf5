#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace epde {

inline constexpr const char* kVersion = "0.1.0";

// Invalid inputs: every offending field is reported, not just the first.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::string what)
      : std::invalid_argument(what), issues_{std::move(what)} {}
  explicit ValidationError(std::vector<std::string> issues)
      : std::invalid_argument(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& v);
  std::vector<std::string> issues_;
};

// Runtime numerical failures (divergent iteration, precision exhaustion,
// singular systems). Distinct from ValidationError so callers can map them
// to different process exit codes.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pointwise coefficients of the parametric form at collocation point θ.
// The memory variable at θ obeys  ∂_t φ + c1 φ = c0 F + c1 φ0,  and the
// solution is recovered as ∫₀¹ φ(t,θ) w_alpha(θ) dθ.
struct ThetaCoeffs {
  double c0;        // 1/(1-θ)
  double c1;        // θ/(1-θ)
  double w_alpha;   // θ^{-α}(1-θ)^{α-1} / (Γ(1-α)Γ(α)), total mass 1
  double w_alpha0;  // (1-θ)·w_alpha, total mass α
  double w_alpha1;  // θ·w_alpha,     total mass 1-α
};

// Requires θ ∈ (0,1), α ∈ (0,1). Γ(1-α)Γ(α) is evaluated as π/sin(πα).
ThetaCoeffs theta_coefficients(double theta, double alpha);

// d^α φ / dt^α = -λ φ + f(t); empty forcing means f ≡ 0.
struct LinearRhs {
  double lambda = 0.0;
  std::function<double(double)> forcing;
};

// d^α φ / dt^α = F(t, φ), treated by lagging F in the nonlinear stepper.
struct NonlinearRhs {
  std::function<double(double, double)> rhs;
};

using RhsSpec = std::variant<LinearRhs, NonlinearRhs>;

struct FdeProblem {
  double alpha = 0.5;    // fractional order, in (0,1)
  double phi0 = 0.0;     // initial value φ(0)
  double horizon = 1.0;  // final time T
  RhsSpec rhs = LinearRhs{};
};

bool is_linear(const FdeProblem& p);

// F(t, φ) regardless of which variant is stored.
double rhs_value(const FdeProblem& p, double t, double phi);

// f(t) for the linear variant (0 when no forcing is set); throws for the
// nonlinear variant.
double forcing_value(const FdeProblem& p, double t);

// Returns the problem unchanged if well-posed; otherwise throws a
// ValidationError listing every defective field.
FdeProblem validate_problem(const FdeProblem& raw);

}  // namespace epde
