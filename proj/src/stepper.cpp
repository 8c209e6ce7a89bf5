#include "epde/stepper.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>

namespace epde {

Eigen::MatrixXd StepSystem::dense() const {
  Eigen::MatrixXd a = diag.asDiagonal();
  if (lambda != 0.0)
    a += (dt * lambda) *
         (Eigen::VectorXd::Ones(diag.size()) * grid.weight.transpose());
  return a;
}

StepSystem assemble_system(const ThetaGrid& grid, const BdfScheme& scheme,
                           double dt, double lambda) {
  std::vector<std::string> issues;
  if (grid.size() < 1) issues.push_back("grid is empty");
  if (!(dt > 0.0) || !std::isfinite(dt))
    issues.push_back("dt must be positive and finite, got " +
                     std::to_string(dt));
  if (!std::isfinite(lambda)) issues.push_back("lambda must be finite");
  if (!issues.empty()) throw ValidationError(std::move(issues));

  StepSystem sys;
  sys.grid = grid;
  sys.scheme = scheme;
  sys.dt = dt;
  sys.lambda = lambda;
  sys.hist_w = 1.0 - grid.theta.array();
  sys.diag = scheme.alpha_k * sys.hist_w.array() + dt * grid.theta.array();
  sys.large_dt = dt >= 1.0;
  return sys;
}

StepFactorization StepFactorization::build(const StepSystem& sys,
                                           bool force_dense) {
  StepFactorization f;
  f.diag_ = sys.diag;
  f.w_ = sys.grid.weight;
  f.dtl_ = sys.dt * sys.lambda;
  if (force_dense || sys.lambda < 0.0) {
    f.method_ = Method::dense_lu;
    f.lu_.compute(sys.dense());
    // PartialPivLU does not signal singularity; check the residual scale.
    const double dmin = f.lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
    const double dmax = f.lu_.matrixLU().diagonal().cwiseAbs().maxCoeff();
    if (!(dmin > dmax * 1e-15))
      throw NumericalError("step matrix is numerically singular (LU pivot " +
                           std::to_string(dmin) + ")");
    return f;
  }
  if (sys.lambda == 0.0) {
    f.method_ = Method::diagonal;
    f.inv_diag_ = sys.diag.cwiseInverse();
    return f;
  }
  // λ > 0: symmetrize with S = diag(√ω).  Â = D + Δt λ qqᵀ, q = √ω.
  f.method_ = Method::rank_one_spectral;
  f.s_ = sys.grid.weight.cwiseSqrt();
  f.inv_s_ = f.s_.cwiseInverse();
  Eigen::MatrixXd ahat = sys.diag.asDiagonal();
  ahat.noalias() += (sys.dt * sys.lambda) * (f.s_ * f.s_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ahat);
  if (es.info() != Eigen::Success)
    throw NumericalError("rank-one spectral factorization failed to converge");
  f.eval_ = es.eigenvalues();
  f.q_ = es.eigenvectors();
  for (Eigen::Index i = 0; i < f.eval_.size(); ++i) {
    if (!(f.eval_[i] > 0.0))
      throw NumericalError("step matrix not positive definite: mode " +
                           std::to_string(i) + " has eigenvalue " +
                           std::to_string(f.eval_[i]));
  }
  f.inv_eval_ = f.eval_.cwiseInverse();
  return f;
}

Eigen::VectorXd StepFactorization::raw_solve(const Eigen::VectorXd& rhs) const {
  switch (method_) {
    case Method::diagonal:
      return inv_diag_.cwiseProduct(rhs);
    case Method::rank_one_spectral: {
      Eigen::VectorXd y = q_.transpose() * s_.cwiseProduct(rhs);
      y.array() *= inv_eval_.array();
      return inv_s_.cwiseProduct(q_ * y);
    }
    case Method::dense_lu:
      return lu_.solve(rhs);
  }
  throw NumericalError("unreachable factorization method");
}

Eigen::VectorXd StepFactorization::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = raw_solve(rhs);
  if (method_ == Method::diagonal) return x;  // already componentwise exact
  Eigen::VectorXd r = rhs - diag_.cwiseProduct(x);
  if (dtl_ != 0.0) r.array() -= dtl_ * w_.dot(x);
  x += raw_solve(r);
  return x;
}

SolverState SolverState::prime(std::vector<Eigen::VectorXd> states,
                               double dt) {
  if (states.empty()) throw ValidationError("prime: no states given");
  if (!(dt > 0.0)) throw ValidationError("prime: dt must be positive");
  SolverState s;
  const int k = static_cast<int>(states.size());
  s.hist_.resize(k);
  for (int i = 0; i < k; ++i) s.hist_[i] = std::move(states[k - 1 - i]);
  s.head_ = 0;
  s.n_ = k - 1;
  s.dt_ = dt;
  return s;
}

const Eigen::VectorXd& SolverState::past(int j) const {
  if (j < 0 || j >= depth())
    throw ValidationError("past: history index " + std::to_string(j) +
                          " out of range (depth " + std::to_string(depth()) +
                          ")");
  return hist_[(head_ + j) % depth()];
}

void SolverState::push(Eigen::VectorXd next) {
  const int k = depth();
  head_ = (head_ + k - 1) % k;
  hist_[head_] = std::move(next);
  ++n_;
}

std::size_t SolverState::state_doubles() const {
  std::size_t total = 0;
  for (const auto& v : hist_) total += static_cast<std::size_t>(v.size());
  return total;
}

Eigen::VectorXd history_combination(const SolverState& state,
                                    const StepSystem& sys) {
  const int k = sys.scheme.k;
  Eigen::VectorXd r =
      sys.scheme.b[0] * sys.hist_w.cwiseProduct(state.past(0));
  for (int j = 1; j < k; ++j)
    r.noalias() += sys.scheme.b[j] * sys.hist_w.cwiseProduct(state.past(j));
  return r;
}

void step_linear(SolverState& state, const StepSystem& sys,
                 const StepFactorization& fact, double phi0, double f_next) {
  Eigen::VectorXd rhs = history_combination(state, sys);
  rhs.noalias() += sys.dt * phi0 * sys.grid.theta;
  rhs.array() += sys.dt * f_next;
  state.push(fact.solve(rhs));
}

PicardStats step_nonlinear_picard(
    SolverState& state, const StepSystem& sys,
    const std::function<double(double, double)>& rhs, double phi0,
    const PicardOptions& opts) {
  if (sys.lambda != 0.0)
    throw ValidationError(
        "step_nonlinear_picard: reaction coefficient must be folded into the "
        "lagged right-hand side (lambda must be 0)");
  if (!rhs) throw ValidationError("step_nonlinear_picard: rhs not set");

  const double t_next = state.time() + sys.dt;
  Eigen::VectorXd base = history_combination(state, sys);
  base.noalias() += sys.dt * phi0 * sys.grid.theta;

  double phat = sys.grid.weight.dot(state.past(0));
  Eigen::VectorXd cand(base.size());
  PicardStats stats;
  for (int l = 0; l < opts.max_iter; ++l) {
    const double fval = rhs(t_next, phat);
    if (!std::isfinite(fval))
      throw NumericalError("picard: right-hand side returned " +
                           std::to_string(fval) + " at t = " +
                           std::to_string(t_next));
    cand = (base.array() + sys.dt * fval) / sys.diag.array();
    const double phat_new = sys.grid.weight.dot(cand);
    stats.iterations = l + 1;
    stats.residual = std::abs(phat_new - phat);
    phat = phat_new;
    if (stats.residual <= opts.tol) {
      state.push(std::move(cand));
      return stats;
    }
  }
  throw NumericalError(
      "picard iteration failed to converge: residual " +
      std::to_string(stats.residual) + " after " +
      std::to_string(stats.iterations) + " iterations at t = " +
      std::to_string(t_next));
}

namespace {

// One cascade or refined sub-step for startup; dispatches on linearity.
void advance_startup_step(SolverState& tmp, const StepSystem& sys,
                          const FdeProblem& problem, double t_next,
                          const PicardOptions& picard,
                          const StepFactorization* fact) {
  if (is_linear(problem)) {
    step_linear(tmp, sys, *fact, problem.phi0, forcing_value(problem, t_next));
  } else {
    step_nonlinear_picard(tmp, sys,
                          std::get<NonlinearRhs>(problem.rhs).rhs,
                          problem.phi0, picard);
  }
}

}  // namespace

SolverState startup(const FdeProblem& problem, const ThetaGrid& grid,
                    const BdfScheme& scheme, double dt,
                    const StartupMode& mode, const PicardOptions& picard) {
  if (!(dt > 0.0)) throw ValidationError("startup: dt must be positive");
  const int k = scheme.k;
  const Eigen::Index m1 = grid.size();
  const double lambda =
      is_linear(problem) ? std::get<LinearRhs>(problem.rhs).lambda : 0.0;

  std::vector<Eigen::VectorXd> states(k);
  states[0] = Eigen::VectorXd::Constant(m1, problem.phi0);

  if (k > 1) {
    if (const auto* exact = std::get_if<StartupExact>(&mode)) {
      if (!exact->state)
        throw ValidationError("startup: exact state callback not set");
      for (int n = 1; n < k; ++n) {
        states[n].resize(m1);
        const double tn = n * dt;
        for (Eigen::Index s = 0; s < m1; ++s)
          states[n][s] = exact->state(tn, grid.theta[s]);
      }
    } else if (const auto* refined = std::get_if<StartupRefined>(&mode)) {
      if (refined->substeps < 1)
        throw ValidationError("startup: refined substep count must be >= 1");
      const int r = refined->substeps;
      const double dts = dt / r;
      const StepSystem sys =
          assemble_system(grid, bdf_coefficients(1), dts, lambda);
      StepFactorization fact;
      if (is_linear(problem)) fact = StepFactorization::build(sys);
      SolverState tmp = SolverState::prime({states[0]}, dts);
      for (int n = 1; n < k; ++n) {
        for (int i = 0; i < r; ++i)
          advance_startup_step(tmp, sys, problem, tmp.time() + dts, picard,
                               &fact);
        states[n] = tmp.past(0);
      }
    } else {
      // cascade: the n-th starting value comes from one BDF-n step
      for (int n = 1; n < k; ++n) {
        const StepSystem sys =
            assemble_system(grid, bdf_coefficients(n), dt, lambda);
        StepFactorization fact;
        if (is_linear(problem)) fact = StepFactorization::build(sys);
        std::vector<Eigen::VectorXd> prefix(states.begin(),
                                            states.begin() + n);
        SolverState tmp = SolverState::prime(std::move(prefix), dt);
        advance_startup_step(tmp, sys, problem, n * dt, picard, &fact);
        states[n] = tmp.past(0);
      }
    }
  }
  return SolverState::prime(std::move(states), dt);
}

Trajectory solve(const FdeProblem& problem, const ThetaGrid& grid,
                 const SolveOptions& opts) {
  const FdeProblem p = validate_problem(problem);
  const BdfScheme scheme = bdf_coefficients(opts.k);

  std::vector<std::string> issues;
  long n_steps = opts.N;
  double dt = opts.dt;
  if (opts.N > 0 && opts.dt > 0.0)
    issues.push_back("set exactly one of N and dt, not both");
  else if (opts.N > 0)
    dt = p.horizon / static_cast<double>(opts.N);
  else if (opts.dt > 0.0) {
    n_steps = std::llround(p.horizon / opts.dt);
    if (n_steps < 1 ||
        std::abs(n_steps * opts.dt - p.horizon) > 1e-8 * p.horizon)
      issues.push_back("dt must divide the horizon evenly");
  } else
    issues.push_back("one of N or dt must be set");
  if (n_steps < scheme.k && issues.empty())
    issues.push_back("N must be >= k (need " + std::to_string(scheme.k) +
                     " starting values, got N = " + std::to_string(n_steps) +
                     ")");
  if (std::abs(grid.alpha - p.alpha) > 1e-14)
    issues.push_back("grid was built for alpha = " +
                     std::to_string(grid.alpha) + ", problem has alpha = " +
                     std::to_string(p.alpha));
  if (!issues.empty()) throw ValidationError(std::move(issues));

  const double lambda =
      is_linear(p) ? std::get<LinearRhs>(p.rhs).lambda : 0.0;
  const Eigen::Index m1 = grid.size();

  const auto t_start = std::chrono::steady_clock::now();

  const StepSystem sys = assemble_system(grid, scheme, dt, lambda);
  SolverState state = startup(p, grid, scheme, dt, opts.startup, opts.picard);

  Trajectory traj;
  traj.steps = n_steps;
  traj.t.resize(n_steps + 1);
  for (long n = 0; n <= n_steps; ++n) traj.t[n] = n * dt;
  traj.phi.resize(n_steps + 1);
  if (opts.store_states) traj.states.resize(m1, n_steps + 1);

  for (int n = 0; n < scheme.k; ++n) {
    const Eigen::VectorXd& st = state.past(scheme.k - 1 - n);
    traj.phi[n] = reconstruct(st, grid);
    if (opts.store_states) traj.states.col(n) = st;
  }

  if (is_linear(p)) {
    const StepFactorization fact =
        StepFactorization::build(sys, opts.force_dense);
    const auto& lin = std::get<LinearRhs>(p.rhs);
    for (long n = scheme.k - 1; n < n_steps; ++n) {
      const double t_next = (n + 1) * dt;
      step_linear(state, sys, fact, p.phi0,
                  lin.forcing ? lin.forcing(t_next) : 0.0);
      traj.phi[n + 1] = reconstruct(state.past(0), grid);
      if (opts.store_states) traj.states.col(n + 1) = state.past(0);
    }
  } else {
    const auto& fun = std::get<NonlinearRhs>(p.rhs).rhs;
    for (long n = scheme.k - 1; n < n_steps; ++n) {
      const PicardStats st =
          step_nonlinear_picard(state, sys, fun, p.phi0, opts.picard);
      traj.picard_total += st.iterations;
      traj.picard_max = std::max(traj.picard_max, st.iterations);
      traj.phi[n + 1] = reconstruct(state.past(0), grid);
      if (opts.store_states) traj.states.col(n + 1) = state.past(0);
    }
  }

  traj.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  // k history vectors plus step scratch; constant in the number of steps.
  traj.peak_state_doubles =
      state.state_doubles() + 4 * static_cast<std::size_t>(m1);
  return traj;
}

Trajectory solve(const FdeProblem& problem, int M, const SolveOptions& opts) {
  return solve(problem, gauss_jacobi_grid(M, problem.alpha), opts);
}

}  // namespace epde
