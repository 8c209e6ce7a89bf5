#pragma once

#include <Eigen/Dense>
#include <utility>

#include "epde/core.hpp"

namespace epde {

// Three-term recurrence of the symmetrized Jacobi operator for the weight
// (1-x)^a (1+x)^b on [-1,1]: diag holds d_0..d_{n-1}, offdiag holds
// e_1..e_{n-1} (square roots of the monic recurrence b_k).
struct JacobiRecurrence {
  Eigen::VectorXd diag;
  Eigen::VectorXd offdiag;
};

// Requires n >= 1, a > -1, b > -1.
JacobiRecurrence jacobi_recurrence(int n, double a, double b);

// n-point Gauss rule on [0,1] for the weight (1-u)^a u^b, with the weights
// scaled to sum to total_mass. Nodes ascending, strictly inside (0,1).
std::pair<Eigen::VectorXd, Eigen::VectorXd> jacobi_rule_01(int n, double a,
                                                           double b,
                                                           double total_mass);

// Collocation grid in θ for the memory weight
// w_alpha(θ) = θ^{-α}(1-θ)^{α-1}/(Γ(1-α)Γ(α)); M is the highest node index,
// so the grid carries M+1 nodes. Weights are positive and sum to 1 exactly
// by construction.
struct ThetaGrid {
  double alpha = 0.0;
  Eigen::VectorXd theta;   // size M+1, ascending
  Eigen::VectorXd weight;  // size M+1, positive, Σ = 1
  int max_index() const { return static_cast<int>(theta.size()) - 1; }
  Eigen::Index size() const { return theta.size(); }
};

// Requires M >= 0, α ∈ (0,1). Deterministic: identical inputs produce
// bitwise-identical grids. The returned grid is immutable in use and safe
// to share across threads.
ThetaGrid gauss_jacobi_grid(int M, double alpha);

// Discrete counterpart of φ(t) = ∫₀¹ φ(t,θ) w_alpha(θ) dθ.
template <class Derived>
double reconstruct(const Eigen::MatrixBase<Derived>& state,
                   const ThetaGrid& grid) {
  if (state.size() != grid.weight.size())
    throw ValidationError("reconstruct: state size " +
                          std::to_string(state.size()) +
                          " does not match grid size " +
                          std::to_string(grid.weight.size()));
  return grid.weight.dot(state);
}

// J_p(c,t) = ∫₀ᵗ e^{-c(t-τ)} τ^p dτ, the building block of closed-form
// θ-states used for exact startup. One instance caches the Gauss rule for
// its exponent p; evaluation is then a 64-term dot product.
//
// Accuracy: ~1e-15 relative. For c·t ≤ 70 a 64-node Gauss–Jacobi rule with
// weight (1-u)^p integrates the analytic factor e^{-c·t·u} essentially
// exactly; beyond that the integrand support shrinks to u ≲ 45/(c·t) and a
// 64-node Gauss–Legendre rule on the truncated interval takes over
// (truncation error ≤ e^{-45} relative).
class ExpPowerMoment {
 public:
  explicit ExpPowerMoment(double p);  // requires p > -1
  double operator()(double c, double t) const;  // requires c ≥ 0, t ≥ 0
  double power() const { return p_; }

 private:
  double p_;
  Eigen::VectorXd u_, w_;  // Gauss–Jacobi nodes/weights, mass 1/(p+1)
};

// One-shot convenience (builds the rule each call).
double exp_power_moment(double p, double c, double t);

}  // namespace epde
