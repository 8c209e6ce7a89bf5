#include "epde/problems.hpp"

#include <cmath>
#include <map>
#include <memory>

#include "epde/mittag_leffler.hpp"
#include "epde/quadrature.hpp"

namespace epde {
namespace {

// θ-resolved solution of ∂_t φ + c1 φ = c0 g(t) + c1 φ0, φ(0,θ) = φ0:
//   φ(t,θ) = φ0 + c0 ∫₀ᵗ e^{-c1(t-τ)} g(τ) dτ,
// where g is the right-hand side evaluated along the exact trajectory.
// The integrals reduce to exponential-power moments J_p(c1, t).

// g(t) = Γ(1+α) constant:  φ = φ0 + Γ(1+α)(1 - e^{-c1 t})/θ.
std::function<double(double, double)> power_law_state(double alpha,
                                                      double phi0) {
  const double g = std::tgamma(1.0 + alpha);
  return [g, phi0](double t, double theta) {
    const double c1 = theta / (1.0 - theta);
    return phi0 + g * (-std::expm1(-c1 * t)) / theta;
  };
}

// g(t) = -E_α(-t^α) = Σ_{m≥0} (-1)^{m+1} t^{αm} / Γ(αm+1):
//   φ = 1 + c0 Σ_m (-1)^{m+1} J_{αm}(c1, t) / Γ(αm+1).
// One ExpPowerMoment per series index m, cached in the closure.
std::function<double(double, double)> relaxation_state(double alpha) {
  struct Cache {
    std::map<int, ExpPowerMoment> rules;
    const ExpPowerMoment& rule(int m, double alpha) {
      auto it = rules.find(m);
      if (it == rules.end())
        it = rules.emplace(m, ExpPowerMoment(alpha * m)).first;
      return it->second;
    }
  };
  auto cache = std::make_shared<Cache>();
  return [alpha, cache](double t, double theta) -> double {
    if (t == 0.0) return 1.0;
    const double c0 = 1.0 / (1.0 - theta);
    const double c1 = theta / (1.0 - theta);
    double sum = 0.0;
    int below = 0;
    for (int m = 0; m < 500; ++m) {
      const double jm = cache->rule(m, alpha)(c1, t);
      const double term =
          ((m & 1) ? 1.0 : -1.0) * jm / std::tgamma(alpha * m + 1.0);
      sum += term;
      if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) {
        if (++below >= 3) break;
      } else {
        below = 0;
      }
    }
    if (below < 3)
      throw NumericalError(
          "relaxation startup state: series did not converge at t = " +
          std::to_string(t));
    return 1.0 + c0 * sum;
  };
}

// Along the exact trajectory of case 4 the cubic term cancels the second
// forcing term, leaving g(t) = Γ(3+α)/2 · t²:  φ = c0 Γ(3+α)/2 · J_2(c1,t).
std::function<double(double, double)> cubic_manufactured_state(double alpha) {
  const double g = std::tgamma(3.0 + alpha) / 2.0;
  auto rule = std::make_shared<ExpPowerMoment>(2.0);
  return [g, rule](double t, double theta) {
    const double c0 = 1.0 / (1.0 - theta);
    const double c1 = theta / (1.0 - theta);
    return c0 * g * (*rule)(c1, t);
  };
}

}  // namespace

CaseSpec make_case(int id, double alpha, double horizon) {
  if (id < 1 || id > 5)
    throw ValidationError("case id must be in 1..5, got " +
                          std::to_string(id));
  CaseSpec c;
  c.id = id;
  c.problem.alpha = alpha;
  c.problem.horizon = horizon;

  switch (id) {
    case 1: {
      c.name = "power-law (constant forcing)";
      c.problem.phi0 = 0.0;
      const double g = std::tgamma(1.0 + alpha);
      c.problem.rhs = LinearRhs{0.0, [g](double) { return g; }};
      c.exact = [alpha](double t) { return std::pow(t, alpha); };
      c.state = power_law_state(alpha, 0.0);
      break;
    }
    case 2: {
      c.name = "linear relaxation";
      c.problem.phi0 = 1.0;
      c.problem.rhs = LinearRhs{1.0, {}};
      c.exact = [alpha](double t) {
        return t == 0.0 ? 1.0 : ml(alpha, -std::pow(t, alpha));
      };
      c.state = relaxation_state(alpha);
      break;
    }
    case 3: {
      c.name = "driven relaxation";
      c.problem.phi0 = 1.0;
      c.problem.rhs = LinearRhs{1.0, [](double t) { return std::sin(t); }};
      break;
    }
    case 4: {
      c.name = "cubic with manufactured solution";
      c.problem.phi0 = 0.0;
      const double g = std::tgamma(3.0 + alpha) / 2.0;
      const double q = 3.0 * (2.0 + alpha);
      c.problem.rhs = NonlinearRhs{[g, q](double t, double phi) {
        return -phi * phi * phi + g * t * t + std::pow(t, q);
      }};
      c.exact = [alpha](double t) { return std::pow(t, 2.0 + alpha); };
      c.state = cubic_manufactured_state(alpha);
      break;
    }
    case 5: {
      c.name = "cubic decay";
      c.problem.phi0 = 1.0;
      c.problem.rhs = NonlinearRhs{
          [](double, double phi) { return -phi * phi * phi; }};
      break;
    }
  }
  validate_problem(c.problem);
  return c;
}

}  // namespace epde
