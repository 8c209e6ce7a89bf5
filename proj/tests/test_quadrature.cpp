#include <cmath>
#include <vector>

#include "doctest.h"
#include "epde/quadrature.hpp"

namespace {

// ∫₀¹ θ^m w_alpha dθ = Γ(m+1-α)/(Γ(m+1)Γ(1-α)):
// μ₀ = 1, μ_{m+1} = μ_m (m+1-α)/(m+1).
std::vector<double> weight_moments(double alpha, int count) {
  std::vector<double> mu(count);
  mu[0] = 1.0;
  for (int m = 0; m + 1 < count; ++m)
    mu[m + 1] = mu[m] * (m + 1.0 - alpha) / (m + 1.0);
  return mu;
}

}  // namespace

TEST_SUITE("quadrature") {

TEST_CASE("rule integrates every resolvable monomial moment") {
  for (int M : {0, 1, 2, 3, 5, 8, 13, 30}) {
    for (double alpha : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      CAPTURE(M);
      CAPTURE(alpha);
      const auto g = epde::gauss_jacobi_grid(M, alpha);
      const int degree = 2 * M + 1;  // M+1 Gauss nodes
      const auto mu = weight_moments(alpha, degree + 1);
      for (int m = 0; m <= degree; ++m) {
        double s = 0.0;
        for (int j = 0; j <= M; ++j)
          s += g.weight[j] * std::pow(g.theta[j], m);
        CHECK(s == doctest::Approx(mu[m]).epsilon(2e-13));
      }
    }
  }
}

TEST_CASE("nodes ascend strictly inside (0,1) and weights are positive") {
  for (double alpha : {0.15, 0.5, 0.85}) {
    CAPTURE(alpha);
    const auto g = epde::gauss_jacobi_grid(24, alpha);
    REQUIRE(g.size() == 25);
    CHECK(g.max_index() == 24);
    CHECK(g.alpha == alpha);
    for (int j = 0; j < 25; ++j) {
      CHECK(g.theta[j] > 0.0);
      CHECK(g.theta[j] < 1.0);
      CHECK(g.weight[j] > 0.0);
      if (j) CHECK(g.theta[j] > g.theta[j - 1]);
    }
    CHECK(g.weight.sum() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("consecutive rules interlace") {
  const auto a = epde::gauss_jacobi_grid(9, 0.6);   // 10 nodes
  const auto b = epde::gauss_jacobi_grid(10, 0.6);  // 11 nodes
  for (int j = 0; j <= 9; ++j) {
    CHECK(b.theta[j] < a.theta[j]);
    CHECK(a.theta[j] < b.theta[j + 1]);
  }
}

TEST_CASE("single-node rule sits at the weight centroid") {
  for (double alpha : {0.2, 0.5, 0.8}) {
    const auto g = epde::gauss_jacobi_grid(0, alpha);
    REQUIRE(g.size() == 1);
    CHECK(g.theta[0] == doctest::Approx(1.0 - alpha).epsilon(1e-15));
    CHECK(g.weight[0] == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("grids are bitwise deterministic") {
  const auto a = epde::gauss_jacobi_grid(30, 0.37);
  const auto b = epde::gauss_jacobi_grid(30, 0.37);
  for (int j = 0; j <= 30; ++j) {
    CHECK(a.theta[j] == b.theta[j]);
    CHECK(a.weight[j] == b.weight[j]);
  }
}

TEST_CASE("grid input validation") {
  CHECK_THROWS_AS(epde::gauss_jacobi_grid(-1, 0.5), epde::ValidationError);
  CHECK_THROWS_AS(epde::gauss_jacobi_grid(5, 0.0), epde::ValidationError);
  CHECK_THROWS_AS(epde::gauss_jacobi_grid(5, 1.0), epde::ValidationError);
}

TEST_CASE("recurrence matches the Chebyshev special case") {
  // a = b = -1/2 on [-1,1]: zero diagonal; monic b_1 = 1/2, b_k = 1/4, and
  // offdiag stores their square roots.
  const auto r = epde::jacobi_recurrence(8, -0.5, -0.5);
  REQUIRE(r.diag.size() == 8);
  REQUIRE(r.offdiag.size() == 7);
  for (int i = 0; i < 8; ++i)
    CHECK(r.diag[i] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(r.offdiag[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  for (int i = 1; i < 7; ++i)
    CHECK(r.offdiag[i] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("recurrence matches the Legendre special case") {
  // a = b = 0: zero diagonal, b_k = k²/(4k²-1).
  const auto r = epde::jacobi_recurrence(6, 0.0, 0.0);
  for (int i = 0; i < 6; ++i)
    CHECK(r.diag[i] == doctest::Approx(0.0).epsilon(1e-14));
  for (int i = 1; i <= 5; ++i) {
    const double k = static_cast<double>(i);
    CHECK(r.offdiag[i - 1] ==
          doctest::Approx(k / std::sqrt(4.0 * k * k - 1.0)).epsilon(1e-14));
  }
}

TEST_CASE("legendre rule on the unit interval") {
  auto [x, w] = epde::jacobi_rule_01(3, 0.0, 0.0, 1.0);
  REQUIRE(x.size() == 3);
  const double off = std::sqrt(3.0 / 20.0);
  CHECK(x[0] == doctest::Approx(0.5 - off).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(x[2] == doctest::Approx(0.5 + off).epsilon(1e-14));
  CHECK(w[0] == doctest::Approx(5.0 / 18.0).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(8.0 / 18.0).epsilon(1e-14));
  CHECK(w[2] == doctest::Approx(5.0 / 18.0).epsilon(1e-14));
}

TEST_CASE("reconstruct is the weighted dot product and checks sizes") {
  const auto g = epde::gauss_jacobi_grid(5, 0.5);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(6);
  CHECK(epde::reconstruct(ones, g) == doctest::Approx(1.0).epsilon(1e-14));
  // ∫ θ w_alpha = 1-α.
  CHECK(epde::reconstruct(g.theta, g) == doctest::Approx(0.5).epsilon(1e-13));
  const Eigen::VectorXd bad = Eigen::VectorXd::Ones(5);
  CHECK_THROWS_AS(epde::reconstruct(bad, g), epde::ValidationError);
}

TEST_CASE("exp-power moment anchors") {
  // Fixed-point values from an independent high-precision evaluation of
  // J_p(c,t) = ∫₀ᵗ e^{-c(t-τ)} τ^p dτ across both internal branches.
  CHECK(epde::exp_power_moment(0.7, 3.0, 0.4) ==
        doctest::Approx(0.08294099260566158).epsilon(1e-13));
  CHECK(epde::exp_power_moment(2.3, 800.0, 0.9) ==
        doctest::Approx(0.0009778691528185423).epsilon(1e-13));
  CHECK(epde::exp_power_moment(0.0, 0.001, 1.0) ==
        doctest::Approx(0.9995001666250083).epsilon(1e-13));
  CHECK(epde::exp_power_moment(1.6, 40.0, 0.25) ==
        doctest::Approx(0.0023125609777690877).epsilon(1e-13));
  CHECK(epde::exp_power_moment(0.24, 2000.0, 0.5) ==
        doctest::Approx(0.00042327096938431827).epsilon(1e-13));
  CHECK(epde::exp_power_moment(36.0, 60.0, 1.0) ==
        doctest::Approx(0.010375603036418539).epsilon(1e-13));
}

TEST_CASE("exp-power moment closed forms and recurrence") {
  // p = 0: J = (1 - e^{-ct})/c.
  CHECK(epde::exp_power_moment(0.0, 3.0, 0.4) ==
        doctest::Approx((1.0 - std::exp(-1.2)) / 3.0).epsilon(1e-14));
  // c = 0: plain power integral t^{p+1}/(p+1).
  CHECK(epde::exp_power_moment(0.7, 0.0, 0.4) ==
        doctest::Approx(std::pow(0.4, 1.7) / 1.7).epsilon(1e-14));
  // Integration by parts: c·J_p = t^p - p·J_{p-1}.
  for (auto [p, c, t] : {std::tuple{1.6, 40.0, 0.25},
                         std::tuple{2.3, 800.0, 0.9},
                         std::tuple{1.0, 3.0, 2.0}}) {
    CAPTURE(p);
    const double lhs = c * epde::exp_power_moment(p, c, t);
    const double rhs =
        std::pow(t, p) - p * epde::exp_power_moment(p - 1.0, c, t);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("cached functor agrees with the one-shot form") {
  const epde::ExpPowerMoment j(0.7);
  CHECK(j.power() == 0.7);
  for (auto [c, t] : {std::pair{3.0, 0.4}, std::pair{120.0, 0.8},
                      std::pair{0.0, 1.0}}) {
    CHECK(j(c, t) ==
          doctest::Approx(epde::exp_power_moment(0.7, c, t)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(epde::ExpPowerMoment(-1.0), epde::ValidationError);
}

}  // TEST_SUITE
