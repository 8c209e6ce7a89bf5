#pragma once

#include <Eigen/Dense>

#include "epde/core.hpp"

namespace epde {

// Backward differentiation formula of order k written as
//   α_k φ^{n+1} - Σ_{j=0}^{k-1} b_j φ^{n-j} = Δt · rhs(t_{n+1}),
// with Σ b_j = α_k. tau is the multiplier shift used by the energy
// argument ((φ^{n+1} - τ_k φ^n) test function); it is 0 for k ≤ 2.
struct BdfScheme {
  int k = 1;
  double alpha_k = 1.0;
  Eigen::VectorXd b;  // size k, b[j] multiplies φ^{n-j}
  double tau = 0.0;
};

// Requires 1 <= k <= 5.
BdfScheme bdf_coefficients(int k);

}  // namespace epde
