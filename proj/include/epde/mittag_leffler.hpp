#pragma once

#include "epde/core.hpp"

namespace epde {

// E_α(z) = Σ_{m≥0} z^m / Γ(αm + 1) for α ∈ (0,1], real z, |z| ≤ 100,
// to ~1e-13 absolute accuracy (the default target).
//
// Branch selection: the Taylor series suffers cancellation of size
// e^{(-z)^{1/α}} for z < 0, which double-double summation absorbs up to
// e^33; beyond that the asymptotic expansion's optimal-truncation error
// e^{-(-z)^{1/α}} ≤ e^{-33} is below target. The crossover is therefore
// α-dependent: series iff (-z)^{1/α} ≤ 33. For z > 0 the series has no
// cancellation and is used everywhere the value is representable; a
// NumericalError reports overflow past ~1e308.
double ml(double alpha, double z, double target_abs_err = 1e-13);

// Closed-form solutions of the benchmark cases that have one:
//   case 1 → t^α,   case 2 → E_α(-λ t^α),   case 4 → t^{2+α}.
// Cases 3 and 5 have no closed form; asking for them throws a
// ValidationError that points the caller at self-reference trajectories.
double exact_solution(int case_id, double alpha, double lambda, double t);

namespace detail {
// Both branches exposed for direct testing.
double ml_series(double alpha, double z, double target_abs_err);
double ml_asymptotic(double alpha, double z, double target_abs_err);
}  // namespace detail

}  // namespace epde
