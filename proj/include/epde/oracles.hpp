#pragma once

#include <Eigen/Dense>

#include "epde/core.hpp"

namespace epde {

// Independent reference discretizations of d^α φ = F(t, φ) on a uniform
// mesh with N steps. Both carry the full history (O(N) state, O(N²) work)
// and share no machinery with the collocation solver; they exist to
// cross-check it.

// Implicit piecewise-linear (L1) scheme; linear right-hand sides only.
// Returns φ at t_0..t_N.
Eigen::VectorXd l1_solve(const FdeProblem& problem, long N);

// Fractional Adams predictor-corrector on the Volterra integral form
// (product rectangle predictor, product trapezoid corrector, one
// correction per step).
Eigen::VectorXd adams_solve(const FdeProblem& problem, long N);

}  // namespace epde
