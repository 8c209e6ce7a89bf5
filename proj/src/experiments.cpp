#include "epde/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <variant>

#include "epde/mittag_leffler.hpp"

namespace epde {

namespace {

struct ResolvedRun {
  CaseSpec spec;
  SolveOptions opts;
  double dt = 0.0;
  long N = 0;
  std::string startup_name;
};

CaseSpec inline_case(const RunConfig& cfg) {
  std::function<double(double)> f;
  double alpha = cfg.alpha;
  if (cfg.forcing == "zero") f = nullptr;
  else if (cfg.forcing == "one") f = [](double) { return 1.0; };
  else if (cfg.forcing == "sin") f = [](double t) { return std::sin(t); };
  else if (cfg.forcing == "cos") f = [](double t) { return std::cos(t); };
  else if (cfg.forcing == "gamma")
    f = [alpha](double) { return std::tgamma(1.0 + alpha); };
  else
    throw ValidationError("unknown forcing '" + cfg.forcing +
                          "' (supported: zero, one, sin, cos, gamma)");
  CaseSpec spec;
  spec.id = 0;
  spec.name = "inline";
  spec.problem = validate_problem(FdeProblem{
      cfg.alpha, cfg.phi0, cfg.horizon, LinearRhs{cfg.lambda, std::move(f)}});
  return spec;
}

// Turns the flat config into a case + solver options. which: the
// subcommand, controlling the default startup mode.
ResolvedRun resolve(const RunConfig& cfg, const std::string& which) {
  std::vector<std::string> issues;
  if (cfg.error_norm != "endpoint" && cfg.error_norm != "max")
    issues.push_back("error_norm must be 'endpoint' or 'max', got '" +
                     cfg.error_norm + "'");
  std::string mode = cfg.startup;
  if (mode.empty()) mode = "default";
  if (mode != "default" && mode != "cascade" && mode != "refined" &&
      mode != "exact")
    issues.push_back("startup must be cascade, refined or exact, got '" +
                     cfg.startup + "'");
  if (cfg.M < 0) issues.push_back("M must be >= 0");
  if (cfg.picard_max_iter < 0)
    issues.push_back("picard_max_iter must be >= 0");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  ResolvedRun r;
  r.spec = cfg.case_id == 0 ? inline_case(cfg)
                            : make_case(cfg.case_id, cfg.alpha, cfg.horizon);
  if (mode == "default")
    mode = (which == "mconverge" && r.spec.state) ? "exact" : "cascade";
  if (mode == "exact" && !r.spec.state)
    throw ValidationError("startup=exact requires a closed-form state, which "
                          "case " + std::to_string(cfg.case_id) +
                          " does not have; use cascade or refined");
  r.startup_name = mode;
  r.opts.k = cfg.k;
  r.opts.N = cfg.N;
  r.opts.dt = cfg.dt;
  r.opts.force_dense = cfg.force_dense;
  if (cfg.picard_max_iter > 0) r.opts.picard.max_iter = cfg.picard_max_iter;
  if (mode == "cascade") r.opts.startup = StartupCascade{};
  else if (mode == "refined") r.opts.startup = StartupRefined{cfg.refine};
  else r.opts.startup = StartupExact{r.spec.state};
  return r;
}

double endpoint_error(const Trajectory& traj,
                      const std::function<double(double)>& exact) {
  return std::abs(traj.phi[traj.phi.size() - 1] -
                  exact(traj.t[traj.t.size() - 1]));
}

double max_error(const Trajectory& traj,
                 const std::function<double(double)>& exact) {
  double worst = 0.0;
  for (long n = 0; n < traj.phi.size(); ++n)
    worst = std::max(worst, std::abs(traj.phi[n] - exact(traj.t[n])));
  return worst;
}

// Least-squares slope of log(err) against log(dt).  Rows at or below the
// double-precision error floor (spatial quadrature at M≈30 plus rounding
// leaves ~1e-12) would flatten the fit, so they are excluded; with fewer
// than two informative rows the slope is undefined.
double fitted_slope(const std::vector<double>& dts,
                    const std::vector<double>& errs) {
  constexpr double kFloorGuard = 5e-12;
  int m = 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (!(errs[i] > kFloorGuard)) continue;
    double x = std::log(dts[i]);
    double y = std::log(errs[i]);
    ++m;
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  double denom = m * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (m * sxy - sx * sy) / denom;
}

std::string startup_flag(const ResolvedRun& run) {
  std::string s = " --startup " + run.startup_name;
  if (const auto* r = std::get_if<StartupRefined>(&run.opts.startup))
    s += " --refine " + std::to_string(r->substeps);
  return s;
}

std::string base_command(const RunConfig& cfg, const ResolvedRun& run) {
  std::string cmd;
  if (cfg.case_id == 0)
    cmd = "--lambda " + format17(cfg.lambda) + " --phi0 " +
          format17(cfg.phi0) + " --forcing " + cfg.forcing;
  else
    cmd = "--case " + std::to_string(cfg.case_id);
  cmd += " --alpha " + format17(cfg.alpha) + " --T " + format17(cfg.horizon) +
         " --k " + std::to_string(cfg.k) + " --M " + std::to_string(cfg.M);
  cmd += startup_flag(run);
  cmd += " --error-norm " + cfg.error_norm;
  if (cfg.force_dense) cmd += " --force-dense";
  if (cfg.picard_max_iter > 0)
    cmd += " --picard-max-iter " + std::to_string(cfg.picard_max_iter);
  return cmd;
}

}  // namespace

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string provenance_line(const std::string& command) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(command)));
  return "# cmd=" + command + " version=" + kVersion + " config_hash=" + hex +
         "\n";
}

SolveReport run_solve(const RunConfig& cfg, bool store_states) {
  ResolvedRun run = resolve(cfg, "solve");
  run.opts.store_states = store_states;
  SolveReport rep;
  rep.traj = solve(run.spec.problem, cfg.M, run.opts);

  long N = rep.traj.steps;
  double dt = rep.traj.t[1] - rep.traj.t[0];
  rep.large_dt = dt >= 1.0;
  if (run.spec.exact) {
    rep.error = cfg.error_norm == "max" ? max_error(rep.traj, run.spec.exact)
                                        : endpoint_error(rep.traj,
                                                         run.spec.exact);
  }

  std::string cmd = "solve " + base_command(cfg, run) + " --N " +
                    std::to_string(N);
  std::ostringstream out;
  out << provenance_line(cmd) << "t,phi\n";
  for (long n = 0; n <= N; ++n)
    out << format17(rep.traj.t[n]) << ',' << format17(rep.traj.phi[n]) << '\n';
  rep.csv = out.str();

  if (store_states) {
    std::ostringstream st;
    st << provenance_line(cmd + " --states") << "t,theta_index,value\n";
    for (long n = 0; n < rep.traj.states.cols(); ++n)
      for (long j = 0; j < rep.traj.states.rows(); ++j)
        st << format17(rep.traj.t[n]) << ',' << j << ','
           << format17(rep.traj.states(j, n)) << '\n';
    rep.states_csv = st.str();
  }

  std::ostringstream sum;
  sum << "final_phi=" << format17(rep.traj.final_phi());
  if (rep.error) sum << " error=" << format17(*rep.error);
  sum << " steps=" << N << " wall_seconds=" << format17(rep.traj.wall_seconds)
      << " peak_state_doubles=" << rep.traj.peak_state_doubles;
  if (rep.traj.picard_total > 0)
    sum << " picard_total=" << rep.traj.picard_total
        << " picard_max=" << rep.traj.picard_max;
  sum << '\n';
  rep.summary = sum.str();
  return rep;
}

ConvergeReport run_converge(const RunConfig& cfg, std::vector<double> dts,
                            bool self_reference) {
  ResolvedRun run = resolve(cfg, "converge");
  std::vector<std::string> issues;
  if (dts.size() < 3) issues.push_back("need at least 3 dt values");
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (!(dts[i] > 0.0) || !std::isfinite(dts[i])) {
      issues.push_back("dt values must be positive and finite");
      break;
    }
    if (i > 0 && std::abs(dts[i - 1] / dts[i] - 2.0) > 1e-9) {
      issues.push_back("dt values must decrease by exact factors of 2");
      break;
    }
  }
  if (!self_reference && !run.spec.exact)
    issues.push_back("case " + std::to_string(cfg.case_id) +
                     " has no closed form; pass --self-reference to compare "
                     "against a fine-step run");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  // Reference: closed form, or the same scheme at dt_min/16 with M+10.
  Trajectory ref_traj;
  double ref_dt = 0.0;
  if (self_reference) {
    SolveOptions ropts = run.opts;
    ropts.N = 0;
    ropts.dt = ref_dt = dts.back() / 16.0;
    ref_traj = solve(run.spec.problem, cfg.M + 10, ropts);
  }

  ConvergeReport rep;
  rep.dts = dts;
  for (double dt : dts) {
    SolveOptions opts = run.opts;
    opts.N = 0;
    opts.dt = dt;
    Trajectory traj = solve(run.spec.problem, cfg.M, opts);
    double err;
    if (self_reference) {
      long stride = std::lround(dt / ref_dt);
      if (cfg.error_norm == "max") {
        err = 0.0;
        for (long n = 0; n < traj.phi.size(); ++n)
          err = std::max(err,
                         std::abs(traj.phi[n] - ref_traj.phi[n * stride]));
      } else {
        err = std::abs(traj.final_phi() - ref_traj.final_phi());
      }
    } else {
      err = cfg.error_norm == "max" ? max_error(traj, run.spec.exact)
                                    : endpoint_error(traj, run.spec.exact);
    }
    rep.errors.push_back(err);
  }

  rep.observed_orders.assign(dts.size(),
                             std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i < dts.size(); ++i)
    rep.observed_orders[i] =
        std::log2(std::max(rep.errors[i - 1], 1e-300) /
                  std::max(rep.errors[i], 1e-300));
  rep.fitted_order = fitted_slope(rep.dts, rep.errors);

  std::string cmd = "converge " + base_command(cfg, run) + " --dts ";
  for (std::size_t i = 0; i < dts.size(); ++i)
    cmd += (i ? "," : "") + format17(dts[i]);
  if (self_reference) cmd += " --self-reference";

  std::ostringstream out;
  out << provenance_line(cmd) << "dt,error,observed_order\n";
  for (std::size_t i = 0; i < dts.size(); ++i) {
    out << format17(rep.dts[i]) << ',' << format17(rep.errors[i]) << ',';
    if (i > 0) out << format17(rep.observed_orders[i]);
    out << '\n';
  }
  out << "# fitted_order=" << format17(rep.fitted_order) << '\n';
  rep.csv = out.str();

  std::ostringstream sum;
  sum << "fitted_order=" << format17(rep.fitted_order)
      << " rows=" << dts.size() << " final_error="
      << format17(rep.errors.back()) << '\n';
  rep.summary = sum.str();
  return rep;
}

MconvergeReport run_mconverge(const RunConfig& cfg, std::vector<int> Ms) {
  std::vector<std::string> issues;
  if (Ms.size() < 2) issues.push_back("need at least 2 M values");
  for (std::size_t i = 0; i < Ms.size(); ++i) {
    if (Ms[i] < 0) {
      issues.push_back("M values must be >= 0");
      break;
    }
    if (i > 0 && Ms[i] <= Ms[i - 1]) {
      issues.push_back("M values must be strictly increasing");
      break;
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));

  RunConfig local = cfg;
  if (local.N == 0 && local.dt == 0.0) local.dt = 1e-4 * local.horizon;
  ResolvedRun run = resolve(local, "mconverge");

  // Reference: closed form, else the same run at M_max + 10.
  std::function<double(double)> exact = run.spec.exact;
  Trajectory ref_traj;
  if (!exact) {
    SolveOptions ropts = run.opts;
    ref_traj = solve(run.spec.problem, Ms.back() + 10, ropts);
  }

  MconvergeReport rep;
  rep.Ms = Ms;
  for (int m : Ms) {
    Trajectory traj = solve(run.spec.problem, m, run.opts);
    double err;
    if (exact) {
      err = local.error_norm == "max" ? max_error(traj, exact)
                                      : endpoint_error(traj, exact);
    } else if (local.error_norm == "max") {
      err = 0.0;
      for (long n = 0; n < traj.phi.size(); ++n)
        err = std::max(err, std::abs(traj.phi[n] - ref_traj.phi[n]));
    } else {
      err = std::abs(traj.final_phi() - ref_traj.final_phi());
    }
    rep.errors.push_back(err);
  }
  rep.ratio = rep.errors.back() / std::max(rep.errors.front(), 1e-300);

  std::string cmd = "mconverge " + base_command(local, run);
  cmd += local.N > 0 ? " --N " + std::to_string(local.N)
                     : " --dt " + format17(local.dt);
  cmd += " --Ms ";
  for (std::size_t i = 0; i < Ms.size(); ++i)
    cmd += (i ? "," : "") + std::to_string(Ms[i]);

  std::ostringstream out;
  out << provenance_line(cmd) << "M,error\n";
  for (std::size_t i = 0; i < Ms.size(); ++i)
    out << Ms[i] << ',' << format17(rep.errors[i]) << '\n';
  out << "# ratio_max_over_min=" << format17(rep.ratio) << '\n';
  rep.csv = out.str();

  std::ostringstream sum;
  sum << "error_at_M_max=" << format17(rep.errors.back())
      << " ratio_max_over_min=" << format17(rep.ratio) << '\n';
  rep.summary = sum.str();
  return rep;
}

RegionReport run_region(const RegionSpec& spec) {
  RegionReport rep;
  rep.result = region_scan(spec);
  const RegionResult& r = rep.result;

  std::string cmd = "region --alpha " + format17(spec.alpha) + " --k " +
                    std::to_string(spec.k) + " --M " + std::to_string(spec.M) +
                    " --dt " + format17(spec.dt) + " --x0 " +
                    format17(spec.x0) + " --x1 " + format17(spec.x1) +
                    " --y0 " + format17(spec.y0) + " --y1 " +
                    format17(spec.y1) + " --nx " + std::to_string(spec.nx) +
                    " --ny " + std::to_string(spec.ny);

  std::ostringstream out;
  out << provenance_line(cmd) << "re_sigma,im_sigma,rho,flag\n";
  for (int i = 0; i < spec.nx; ++i)
    for (int j = 0; j < spec.ny; ++j)
      out << format17(r.x[i]) << ',' << format17(r.y[j]) << ','
          << format17(r.rho(j, i)) << ','
          << flag_name(static_cast<PointFlag>(r.flag(j, i))) << '\n';
  out << "# stable_count=" << r.stable << " unstable_count=" << r.unstable
      << " boundary_count=" << r.boundary
      << " singular_count=" << r.singular << '\n';
  rep.csv = out.str();

  std::ostringstream sum;
  sum << "stable=" << r.stable << " unstable=" << r.unstable
      << " boundary=" << r.boundary << " singular=" << r.singular
      << " fallback_points=" << r.fallback_points
      << " seconds=" << format17(r.seconds) << '\n';
  rep.summary = sum.str();
  return rep;
}

std::string run_grid_dump(double alpha, int M) {
  ThetaGrid grid = gauss_jacobi_grid(M, alpha);
  std::string cmd =
      "grid-dump --alpha " + format17(alpha) + " --M " + std::to_string(M);
  std::ostringstream out;
  out << provenance_line(cmd) << "j,theta,weight\n";
  for (long j = 0; j < grid.theta.size(); ++j)
    out << j << ',' << format17(grid.theta[j]) << ','
        << format17(grid.weight[j]) << '\n';
  return out.str();
}

std::string run_ml_line(double alpha, double z) {
  return format17(ml(alpha, z)) + "\n";
}

}  // namespace epde
