#pragma once

#include <functional>
#include <string>

#include "epde/core.hpp"

namespace epde {

// Built-in benchmark problems.
//
//   1  d^α φ = Γ(1+α),          φ0 = 0      exact: t^α
//   2  d^α φ = -φ,              φ0 = 1      exact: E_α(-t^α)
//   3  d^α φ = -φ + sin t,      φ0 = 1      no closed form
//   4  d^α φ = -φ³ + f(t),      φ0 = 0      exact: t^{2+α}
//        f(t) = Γ(3+α)/2 · t² + t^{3(2+α)}
//   5  d^α φ = -φ³,             φ0 = 1      no closed form
//
// For cases with a closed form, `state` gives the full θ-resolved solution
// φ(t,θ) of the parametric system (used for exact startup); `exact` gives
// the reconstructed scalar solution.
struct CaseSpec {
  int id = 0;
  std::string name;
  FdeProblem problem;
  std::function<double(double)> exact;                 // may be empty
  std::function<double(double, double)> state;         // may be empty
};

// Requires id ∈ 1..5, α ∈ (0,1), horizon > 0.
CaseSpec make_case(int id, double alpha, double horizon);

}  // namespace epde
