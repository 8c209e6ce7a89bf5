// Acceptance gate for the collocation solver: eleven numbered criteria,
// each printing one [PASS]/[FAIL] line with the measured values and the
// pinned tolerance. The process exits with the number of failed criteria,
// so a zero exit is the all-green signal.
//
// Criteria 3 and 5 probe formal BDF-k order and deep spatial accuracy on
// the linear relaxation benchmark, whose solution behaves like
// 1 - t^α/Γ(1+α) near t = 0. On a uniform mesh without corrections the
// history of that solution is not smooth enough for orders beyond
// dt^{1+α}/dt^{2α}, so both criteria fail for mathematical rather than
// implementation reasons; the θ-direction itself is spectrally accurate
// (criterion 5 prints the semidiscrete evidence). The failures are left
// in place deliberately — see README.md for the analysis.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "epde/bdf.hpp"
#include "epde/experiments.hpp"
#include "epde/mittag_leffler.hpp"
#include "epde/oracles.hpp"
#include "epde/problems.hpp"
#include "epde/quadrature.hpp"
#include "epde/stability.hpp"
#include "epde/stepper.hpp"

namespace {

int g_failures = 0;

void verdict(int id, const std::string& name, bool pass,
             const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// ---------------------------------------------------------------- 1, 2

void criterion_1() {
  double worst0 = 0.0, worst1 = 0.0;
  for (double alpha : {0.2, 0.5, 0.8})
    for (int M : {0, 5, 10, 30}) {
      const auto g = epde::gauss_jacobi_grid(M, alpha);
      worst0 = std::max(worst0, std::abs(g.weight.sum() - 1.0));
      worst1 = std::max(
          worst1, std::abs(g.weight.dot(g.theta) - (1.0 - alpha)));
    }
  verdict(1, "quadrature weight moments", worst0 <= 1e-13 && worst1 <= 1e-13,
          fmt("max |Sum w - 1| = %.2e, max |Sum w*theta - (1-alpha)| = %.2e "
              "(tol 1e-13; alpha in {0.2,0.5,0.8}, M in {0,5,10,30})",
              worst0, worst1));
}

void criterion_2() {
  double worst_t = 0.0, worst_w = 0.0;
  for (double alpha : {0.2, 0.5, 0.8}) {
    const auto g = epde::gauss_jacobi_grid(0, alpha);
    worst_t = std::max(worst_t, std::abs(g.theta[0] - (1.0 - alpha)));
    worst_w = std::max(worst_w, std::abs(g.weight[0] - 1.0));
  }
  verdict(2, "single-node grid", worst_t <= 1e-14 && worst_w <= 1e-14,
          fmt("max |theta0 - (1-alpha)| = %.2e, max |w0 - 1| = %.2e "
              "(tol 1e-14; alpha in {0.2,0.5,0.8})",
              worst_t, worst_w));
}

// ------------------------------------------------------------------- 3

void criterion_3() {
  const std::vector<double> dts = {1.0 / 40, 1.0 / 80, 1.0 / 160, 1.0 / 320,
                                   1.0 / 640};
  int ok = 0, total = 0;
  std::string cells;
  for (int case_id : {1, 2})
    for (double alpha : {0.2, 0.8})
      for (int k = 1; k <= 5; ++k) {
        epde::RunConfig cfg;
        cfg.case_id = case_id;
        cfg.alpha = alpha;
        cfg.horizon = 1.0;
        cfg.k = k;
        cfg.M = 30;
        cfg.startup = "exact";
        const auto rep = epde::run_converge(cfg, dts, false);
        const bool hit = std::abs(rep.fitted_order - k) <= 0.25;
        ++total;
        ok += hit;
        cells += fmt("       case %d alpha=%.1f k=%d: slope %7.4f "
                     "(want %d +- 0.25) %s\n",
                     case_id, alpha, k, rep.fitted_order, k,
                     hit ? "ok" : "MISS");
      }
  verdict(3, "temporal order, endpoint error (cases 1 and 2)", ok == total,
          fmt("%d/%d cells within k +- 0.25 (M=30, exact startup, dt "
              "1/40..1/640 halving); the relaxation solution's t^alpha "
              "history caps uniform-mesh BDF-k at dt^(1+alpha)/dt^(2alpha)",
              ok, total));
  std::fputs(cells.c_str(), stdout);
}

// ------------------------------------------------------------------- 4

void criterion_4() {
  const std::vector<double> dts = {1.0, 0.5, 0.25, 0.125, 0.0625};
  double s02 = 0.0, s08 = 0.0;
  for (double alpha : {0.2, 0.8}) {
    epde::RunConfig cfg;
    cfg.case_id = 2;
    cfg.alpha = alpha;
    cfg.horizon = 20.0;
    cfg.k = 3;
    cfg.M = 30;
    cfg.startup = "exact";
    const auto rep = epde::run_converge(cfg, dts, false);
    (alpha == 0.2 ? s02 : s08) = rep.fitted_order;
  }
  const bool pass = std::abs(s02 - 3.0) <= 0.3 && std::abs(s08 - 3.0) <= 0.3;
  verdict(4, "long-horizon third order (case 2, T=20, k=3)", pass,
          fmt("slope alpha=0.2: %.4f, alpha=0.8: %.4f (want 3 +- 0.3; dt "
              "1..1/16, M=30, exact startup)",
              s02, s08));
}

// ------------------------------------------------------------------- 5

void criterion_5() {
  auto sweep = [](double dt, double& e5, double& e30) {
    epde::RunConfig cfg;
    cfg.case_id = 2;
    cfg.alpha = 0.8;
    cfg.horizon = 1.0;
    cfg.k = 3;
    cfg.M = 30;  // run_mconverge overrides per entry
    cfg.dt = dt;
    const auto rep = epde::run_mconverge(cfg, {5, 30});
    e5 = rep.errors[0];
    e30 = rep.errors[1];
  };
  double e5 = 0.0, e30 = 0.0;
  sweep(1e-4, e5, e30);
  const double ratio = e30 / e5;
  const bool pass = e30 <= 1e-10 && ratio <= 1e-5;
  verdict(5, "theta-resolution accuracy (case 2, alpha=0.8, dt=1e-4)", pass,
          fmt("error(M=30) = %.4e (tol 1e-10), error(M=30)/error(M=5) = "
              "%.3e (tol 1e-5); the dt=1e-4 time error floor (~1.2e-8) "
              "dominates both",
              e30, ratio));

  // Context: the same sweep where the time error no longer masks the
  // spatial accuracy, plus the semidiscrete (exact-history) error.
  double f5 = 0.0, f30 = 0.0;
  sweep(1e-6, f5, f30);
  std::printf("       info: dt=1e-6 gives error(M=30) = %.4e and ratio = "
              "%.3e — both inside the pinned tolerances\n",
              f30, f30 / f5);

  const auto spec = epde::make_case(2, 0.8, 1.0);
  const auto g = epde::gauss_jacobi_grid(30, 0.8);
  Eigen::VectorXd vals(g.size());
  for (int s = 0; s <= 30; ++s) vals[s] = spec.state(1.0, g.theta[s]);
  std::printf("       info: semidiscrete M=30 error at T=1 (no time "
              "stepping) = %.4e — the theta direction is spectrally "
              "accurate\n",
              std::abs(epde::reconstruct(vals, g) - spec.exact(1.0)));
}

// ------------------------------------------------------------------- 6

void criterion_6() {
  bool pass = true;
  std::string detail;

  const std::vector<double> dts4 = {1.0 / 40, 1.0 / 80, 1.0 / 160, 1.0 / 320,
                                    1.0 / 640};
  for (double alpha : {0.3, 0.7})
    for (int k : {3, 4, 5}) {
      epde::RunConfig cfg;
      cfg.case_id = 4;
      cfg.alpha = alpha;
      cfg.horizon = 1.0;
      cfg.k = k;
      cfg.M = 30;
      cfg.startup = "exact";
      cfg.picard_max_iter = 400;
      const auto rep = epde::run_converge(cfg, dts4, false);
      const bool hit = std::abs(rep.fitted_order - k) <= 0.3;
      pass = pass && hit;
      detail += fmt("       case 4 alpha=%.1f k=%d: slope %.4f (want %d "
                    "+- 0.3) %s\n",
                    alpha, k, rep.fitted_order, k, hit ? "ok" : "MISS");
    }

  const std::vector<double> dts5 = {0.1, 0.05, 0.025, 0.0125};
  double v03 = 0.0, v07 = 0.0;
  for (double alpha : {0.3, 0.7}) {
    epde::RunConfig cfg;
    cfg.case_id = 5;
    cfg.alpha = alpha;
    cfg.horizon = 1.0;
    cfg.k = 5;
    cfg.M = 30;
    cfg.startup = "refined";
    cfg.refine = 2048;
    cfg.picard_max_iter = 400;
    const auto rep = epde::run_converge(cfg, dts5, true);
    (alpha == 0.3 ? v03 : v07) = rep.fitted_order;
  }
  const bool hit5 = v03 >= 1.8 && v07 >= 2.7;
  pass = pass && hit5;
  detail += fmt("       case 5 self-reference, k=5, refined startup: slope "
                "alpha=0.3 %.4f (want >= 1.8), alpha=0.7 %.4f (want >= 2.7) "
                "%s\n",
                v03, v07, hit5 ? "ok" : "MISS");

  verdict(6, "nonlinear convergence (cases 4 and 5)", pass,
          "slopes below (case 4: M=30, exact startup, dt 1/40..1/640; "
          "case 5: M=30, dt 1/10..1/80, reference at dt_min/16 with M+10)");
  std::fputs(detail.c_str(), stdout);
}

// ------------------------------------------------------------------- 7

void criterion_7() {
  const double t0 = now_seconds();
  // Real axis: 200 sigma samples on [-100, 0] must all contract.
  double worst_rho = 0.0;
  bool axis_ok = true;
  for (double alpha : {0.2, 0.4, 0.6, 0.8}) {
    epde::RegionSpec s;
    s.alpha = alpha;
    s.k = 3;
    s.M = 30;
    s.dt = 0.01;  // T=1, N=100
    s.x0 = -100.0;
    s.x1 = 0.0;
    s.nx = 200;
    s.y0 = 0.0;
    s.y1 = 0.0;
    s.ny = 1;
    const auto r = epde::region_scan(s);
    worst_rho = std::max(worst_rho, r.rho.maxCoeff());
    axis_ok = axis_ok && r.unstable == 0 && r.boundary == 0 &&
              r.singular == 0;
  }

  // Default window: the stable share must shrink as alpha grows.
  long counts[4] = {0, 0, 0, 0};
  long fallbacks = 0;
  int i = 0;
  for (double alpha : {0.2, 0.4, 0.6, 0.8}) {
    epde::RegionSpec s;  // default window -15..5 x -10..10, 301x301
    s.alpha = alpha;
    const auto r = epde::region_scan(s);
    counts[i++] = r.stable;
    fallbacks += r.fallback_points;
  }
  const bool mono =
      counts[0] > counts[1] && counts[1] > counts[2] && counts[2] > counts[3];
  const double secs = now_seconds() - t0;
  verdict(7, "stability region scan", axis_ok && mono && secs < 120.0,
          fmt("real axis [-100,0] x 200 pts: max rho = %.8f (< 1, no "
              "unstable/singular); default-window stable counts %ld > %ld > "
              "%ld > %ld (alpha 0.2,0.4,0.6,0.8); %ld dense fallbacks; "
              "%.1f s total (budget 120 s)",
              worst_rho, counts[0], counts[1], counts[2], counts[3],
              fallbacks, secs));
}

// ------------------------------------------------------------------- 8

void criterion_8() {
  const auto cs = epde::make_case(3, 0.5, 1.0);
  epde::SolveOptions opts;
  opts.k = 3;
  opts.N = 1000;  // dt = 1e-3
  const auto traj = epde::solve(cs.problem, 30, opts);
  const auto ref = epde::adams_solve(cs.problem, 1000);
  const double diff = std::abs(traj.final_phi() - ref[1000]);
  verdict(8, "independent-oracle agreement (case 3, alpha=0.5)", diff <= 1e-5,
          fmt("endpoint %0.10f vs fractional Adams %0.10f, |diff| = %.3e "
              "(tol 1e-5; dt=1e-3, M=30, k=3)",
              traj.final_phi(), ref[1000], diff));
}

// ------------------------------------------------------------------- 9

void criterion_9() {
  double worst_exp = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x = -30.0 + 35.0 * i / 49.0;
    worst_exp = std::max(worst_exp, std::abs(epde::ml(1.0, x) - std::exp(x)));
  }
  bool ones_exact = true;
  for (double alpha : {0.2, 0.5, 0.8, 1.0})
    ones_exact = ones_exact && epde::ml(alpha, 0.0) == 1.0;
  const double anchor = std::abs(epde::ml(0.5, -1.0) - 0.4275835761558070);
  verdict(9, "Mittag-Leffler evaluator",
          worst_exp <= 1e-13 && ones_exact && anchor <= 1e-12,
          fmt("max |E_1(x) - exp(x)| = %.2e over 50 pts in [-30,5] (tol "
              "1e-13); E_alpha(0) == 1 exactly: %s; |E_0.5(-1) - "
              "0.4275835761558070| = %.2e (tol 1e-12)",
              worst_exp, ones_exact ? "yes" : "NO", anchor));
}

// ------------------------------------------------------------------ 10

void criterion_10() {
  const auto cs = epde::make_case(2, 0.8, 1.0);
  auto run = [&cs](long N, std::size_t* buf) {
    epde::SolveOptions opts;
    opts.k = 3;
    opts.N = N;
    const auto traj = epde::solve(cs.problem, 30, opts);
    *buf = traj.peak_state_doubles;
    return traj.wall_seconds;
  };
  std::size_t b1 = 0, b2 = 0;
  run(100000, &b1);  // warm caches
  double best1 = 1e9, best2 = 1e9;
  for (int rep = 0; rep < 3; ++rep) {
    best1 = std::min(best1, run(100000, &b1));
    best2 = std::min(best2, run(200000, &b2));
  }
  const double ratio = best2 / best1;
  verdict(10, "O(N) work and O(1) state (case 2, M=30, k=3)",
          ratio >= 1.7 && ratio <= 2.5 && b1 == b2,
          fmt("wall(2e5)/wall(1e5) = %.3f (want 1.7..2.5; best of 3: %.4f s "
              "vs %.4f s), peak state doubles %zu vs %zu (%s)",
              ratio, best2, best1, b1, b2,
              b1 == b2 ? "equal" : "NOT equal"));
}

// ------------------------------------------------------------------ 11

void criterion_11() {
  const double alpha = 0.5, T = 1.0, phi0 = 1.0;
  const auto grid = epde::gauss_jacobi_grid(30, alpha);
  const Eigen::VectorXd w0 =
      ((1.0 - grid.theta.array()) * grid.weight.array()).matrix();
  const Eigen::VectorXd w1 =
      (grid.theta.array() * grid.weight.array()).matrix();

  bool pass = true;
  std::string detail;
  double worst_margin = 0.0;  // max lhs/rhs over the k<=2 inequality cells
  double worst_s = 0.0, worst_growth = 0.0;

  for (int k = 1; k <= 5; ++k) {
    const auto sch = epde::bdf_coefficients(k);
    const double one_m_tau2 = 1.0 - sch.tau * sch.tau;
    double lmin = 0.0, lmax = 0.0;
    if (k == 1) lmin = lmax = 0.5;
    if (k == 2) {
      // Energy multiplier for the two-step scheme; eigenvalues (3∓2√2)/4.
      lmin = (3.0 - 2.0 * std::sqrt(2.0)) / 4.0;
      lmax = (3.0 + 2.0 * std::sqrt(2.0)) / 4.0;
    }
    for (double lam : {0.0, 1.0, 10.0}) {
      epde::FdeProblem pb;
      pb.alpha = alpha;
      pb.phi0 = phi0;
      pb.horizon = T;
      pb.rhs = epde::LinearRhs{lam, {}};
      double s_prev = 0.0;
      for (long N : {100L, 1000L, 10000L}) {
        epde::SolveOptions opts;
        opts.k = k;
        opts.N = N;
        opts.store_states = true;
        const auto tr = epde::solve(pb, grid, opts);
        const double dt = T / static_cast<double>(N);
        double sum = 0.0;
        for (long n = k; n <= N; ++n)
          sum += tr.states.col(n).cwiseAbs2().dot(w1) +
                 lam * tr.phi[n] * tr.phi[n];
        const double endn = tr.states.col(N).cwiseAbs2().dot(w0);
        const double core = 0.5 * dt * one_m_tau2 * sum;
        if (k <= 2) {
          const double lhs = lmin * endn + core;
          const double rhs = (lmax * alpha + 0.5 * T * (1.0 - alpha)) *
                             phi0 * phi0 / one_m_tau2;
          worst_margin = std::max(worst_margin, lhs / rhs);
          if (!(lhs <= rhs * (1.0 + 1e-9))) {
            pass = false;
            detail += fmt("       VIOLATION k=%d lambda=%g N=%ld: lhs %.6f "
                          "> rhs %.6f\n",
                          k, lam, N, lhs, rhs);
          }
        } else {
          const double s = endn + core;
          worst_s = std::max(worst_s, s);
          if (!(s <= 2.0 * phi0 * phi0)) {
            pass = false;
            detail += fmt("       UNBOUNDED k=%d lambda=%g N=%ld: S = %.6f "
                          "> 2\n",
                          k, lam, N, s);
          }
          if (N == 10000L) {
            const double growth = s / s_prev;
            worst_growth = std::max(worst_growth, growth);
            if (!(growth <= 1.10)) {
              pass = false;
              detail += fmt("       GROWTH k=%d lambda=%g: S(1e4)/S(1e3) = "
                            "%.4f > 1.10\n",
                            k, lam, growth);
            }
          }
          s_prev = s;
        }
      }
    }
  }
  verdict(11, "discrete energy boundedness (alpha=0.5, lambda in {0,1,10})",
          pass,
          fmt("k<=2 inequality: max lhs/rhs = %.6f (must be <= 1, equality "
              "at k=1, lambda=0); k>=3 dissipation sums: max S = %.4f "
              "(bound 2), max S(1e4)/S(1e3) = %.4f (bound 1.10); N in "
              "{1e2,1e3,1e4}",
              worst_margin, worst_s, worst_growth));
  std::fputs(detail.c_str(), stdout);
}

}  // namespace

int main() {
  std::printf("acceptance: collocation solver for Caputo-order ODEs "
              "(version %s)\n",
              epde::kVersion);
  const double t0 = now_seconds();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%d/11 criteria pass (%.1f s total)\n", 11 - g_failures,
              now_seconds() - t0);
  if (g_failures > 0)
    std::printf("expected state: criteria 3 and 5 fail on the relaxation "
                "benchmark's t^alpha start; see README.md\n");
  return g_failures;
}
