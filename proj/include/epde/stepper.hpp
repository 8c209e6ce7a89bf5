#pragma once

#include <Eigen/Dense>
#include <Eigen/LU>
#include <cstddef>
#include <variant>

#include "epde/bdf.hpp"
#include "epde/core.hpp"
#include "epde/quadrature.hpp"

namespace epde {

// Fully discrete step system. One step of the collocated scheme solves
//   A Φ^{n+1} = Σ_j b_j (1-θ) ⊙ Φ^{n-j} + Δt (θ φ0 + f(t_{n+1}) 1),
// where A = diag(α_k(1-θ_s) + Δt θ_s) + Δt λ 1 wᵀ.
struct StepSystem {
  ThetaGrid grid;
  BdfScheme scheme;
  double dt = 0.0;
  double lambda = 0.0;
  Eigen::VectorXd diag;    // α_k(1-θ_s) + Δt θ_s
  Eigen::VectorXd hist_w;  // 1-θ_s
  // The error estimates assume Δt < 1; larger steps are accepted but the
  // caller should surface this flag as a warning.
  bool large_dt = false;

  Eigen::MatrixXd dense() const;  // materialized A, for tests and LU
};

// Requires dt > 0 and a grid/scheme pair from this library.
StepSystem assemble_system(const ThetaGrid& grid, const BdfScheme& scheme,
                           double dt, double lambda);

// Precomputed solve operator for A, reused across all time steps.
//
//   diagonal:          λ = 0, trivial inverse, O(M) per solve.
//   rank_one_spectral: λ > 0. With S = diag(√ω), Â = S A S⁻¹ =
//                      D + Δt λ qqᵀ (q = √ω) is symmetric positive
//                      definite; one eigendecomposition up front, O(M²)
//                      per solve afterwards.
//   dense_lu:          fallback for λ < 0 or when forced.
//
// The factored solves finish with one iterative-refinement pass (residual
// via the O(M) diagonal-plus-rank-one product).  Without it the per-step
// forward error of the eigenbasis solve is coherent across steps and
// accumulates into a Δt-independent drift of order κ(A)·ε in long runs.
class StepFactorization {
 public:
  enum class Method { diagonal, rank_one_spectral, dense_lu };

  static StepFactorization build(const StepSystem& sys,
                                 bool force_dense = false);

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Method method() const { return method_; }
  // Spectrum of the symmetrized matrix (rank_one_spectral only).
  const Eigen::VectorXd& eigenvalues() const { return eval_; }

 private:
  Eigen::VectorXd raw_solve(const Eigen::VectorXd& rhs) const;

  Method method_ = Method::diagonal;
  Eigen::VectorXd inv_diag_;       // diagonal path
  Eigen::VectorXd s_, inv_s_;      // S and S⁻¹ scalings
  Eigen::MatrixXd q_;              // eigenvectors of Â
  Eigen::VectorXd eval_, inv_eval_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd diag_, w_;       // A = diag(diag_) + dtl_·𝟙w_ᵀ
  double dtl_ = 0.0;               // Δt·λ
};

// Ring buffer of the k most recent θ-states; storage is independent of the
// number of steps taken.
class SolverState {
 public:
  // states[i] = Φ^i for i = 0..k-1, each of size M+1.
  static SolverState prime(std::vector<Eigen::VectorXd> states, double dt);

  const Eigen::VectorXd& past(int j) const;  // Φ^{n-j}, j = 0..k-1
  void push(Eigen::VectorXd next);           // append Φ^{n+1}
  int depth() const { return static_cast<int>(hist_.size()); }
  long index() const { return n_; }  // n of the newest state
  double time() const { return static_cast<double>(n_) * dt_; }
  double dt() const { return dt_; }
  std::size_t state_doubles() const;

 private:
  std::vector<Eigen::VectorXd> hist_;
  int head_ = 0;
  long n_ = 0;
  double dt_ = 0.0;
};

// Σ_j b_j (1-θ) ⊙ Φ^{n-j}, the history part of the step right-hand side.
Eigen::VectorXd history_combination(const SolverState& state,
                                    const StepSystem& sys);

// Advances one step of the linear problem d^α φ = -λ φ + f.
// f_next = f(t_{n+1}).
void step_linear(SolverState& state, const StepSystem& sys,
                 const StepFactorization& fact, double phi0, double f_next);

struct PicardOptions {
  double tol = 1e-15;  // absolute tolerance on the reconstructed iterate
  int max_iter = 100;
};
struct PicardStats {
  int iterations = 0;
  double residual = 0.0;
};

// Advances one step with the right-hand side lagged: every inner solve is
// diagonal because F couples the modes only through the reconstructed
// scalar. Requires sys.lambda == 0 (the reaction term lives inside F).
// Throws NumericalError if the iteration fails to converge.
PicardStats step_nonlinear_picard(
    SolverState& state, const StepSystem& sys,
    const std::function<double(double, double)>& rhs, double phi0,
    const PicardOptions& opts = {});

// Startup: produce Φ^0..Φ^{k-1} before the k-step march begins.
struct StartupCascade {};                  // BDF-n for the n-th value
struct StartupRefined { int substeps = 64; };  // first-order substepping
struct StartupExact {
  std::function<double(double, double)> state;  // φ(t, θ)
};
using StartupMode = std::variant<StartupCascade, StartupRefined, StartupExact>;

SolverState startup(const FdeProblem& problem, const ThetaGrid& grid,
                    const BdfScheme& scheme, double dt, const StartupMode& mode,
                    const PicardOptions& picard = {});

struct SolveOptions {
  int k = 3;
  long N = 0;      // number of steps; exactly one of N / dt must be set
  double dt = 0.0;
  StartupMode startup = StartupCascade{};
  bool store_states = false;
  bool force_dense = false;
  PicardOptions picard{};
};

struct Trajectory {
  Eigen::VectorXd t;       // size N+1
  Eigen::VectorXd phi;     // reconstructed solution at each time
  Eigen::MatrixXd states;  // (M+1) x (N+1), only when store_states
  long steps = 0;
  long picard_total = 0;
  int picard_max = 0;
  std::size_t peak_state_doubles = 0;  // solver state, trajectory excluded
  double wall_seconds = 0.0;
  double final_phi() const { return phi[phi.size() - 1]; }
};

Trajectory solve(const FdeProblem& problem, const ThetaGrid& grid,
                 const SolveOptions& opts);
Trajectory solve(const FdeProblem& problem, int M, const SolveOptions& opts);

}  // namespace epde
