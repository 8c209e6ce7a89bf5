#include "epde/stability.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "epde/core.hpp"

namespace epde {

namespace {

using Cplx = std::complex<double>;

// Per-window real data of the companion operator. With d_s = α_k(1-θ_s)+Δtθ_s,
//   A(σ) = diag(d) - σ·1wᵀ,   A(σ)^{-1} = D^{-1} + σ/den · (D^{-1}1) vwᵀ,
//   vw = ω/d,  den = 1 - σ·Σ vw.
struct WindowData {
  int k = 0;
  int m1 = 0;  // grid size M+1
  Eigen::VectorXd b;
  Eigen::VectorXd hist_w;    // 1-θ
  Eigen::VectorXcd inv_d;    // 1/d, complex copy for mixed products
  Eigen::VectorXcd vw;       // ω/d
  double vw_sum = 0.0;
};

WindowData make_window_data(const ThetaGrid& grid, const BdfScheme& scheme,
                            double dt) {
  WindowData wd;
  wd.k = scheme.k;
  wd.m1 = static_cast<int>(grid.size());
  wd.b = scheme.b;
  wd.hist_w = (1.0 - grid.theta.array()).matrix();
  Eigen::VectorXd d =
      (scheme.alpha_k * (1.0 - grid.theta.array()) + dt * grid.theta.array())
          .matrix();
  wd.inv_d = d.cwiseInverse().cast<Cplx>();
  Eigen::VectorXd vw_real = grid.weight.cwiseQuotient(d);
  wd.vw = vw_real.cast<Cplx>();
  wd.vw_sum = vw_real.sum();
  return wd;
}

bool sigma_singular(const WindowData& wd, Cplx sigma, Cplx& den) {
  den = 1.0 - sigma * wd.vw_sum;
  double scale = 1.0 + std::abs(sigma) * std::abs(wd.vw_sum);
  return std::abs(den) <= 1e-13 * scale;
}

Eigen::VectorXcd deterministic_start(int dim) {
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i)
    v[i] = Cplx(1.0 + 0.125 * (i % 7), 0.0);
  v /= v.norm();
  return v;
}

// Exact characteristic structure of the companion operator. Eliminating the
// history blocks, the eigenvalues ζ of E(σ) solve
//   Π_s q_s(ζ) · (1 − σ ζ^k Σ_s w_s/q_s(ζ)) = 0,
//   q_s(ζ) = d_s ζ^k − (1−θ_s) p(ζ),   p(ζ) = Σ_j b_j ζ^{k−1−j},
// and partial fractions over the (σ-independent) per-mode roots λ_i of the
// q_s turn the bracket into the secular equation
//   Σ_i r_i/(ζ − λ_i) = 1/σ − Σ_s w_s/d_s,   r_i = w_s λ_i^k / q_s'(λ_i).
// The poles and residues are fixed for the whole window; each grid point
// only re-solves the secular equation, warm-started from its neighbour.
struct SecularData {
  Eigen::VectorXcd poles;  // λ_i, all k(M+1) per-mode roots
  Eigen::VectorXcd res;    // r_i
  double vinf = 0.0;       // Σ w_s/d_s
  bool usable = false;     // false on (near-)defective per-mode roots
};

SecularData make_secular_data(const ThetaGrid& grid, const BdfScheme& scheme,
                              double dt) {
  SecularData sd;
  const int k = scheme.k;
  const int m1 = static_cast<int>(grid.size());
  sd.poles.resize(k * m1);
  sd.res.resize(k * m1);

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
  if (k > 1) companion.bottomLeftCorner(k - 1, k - 1).setIdentity();

  double min_sep = std::numeric_limits<double>::infinity();
  for (int s = 0; s < m1; ++s) {
    double d = scheme.alpha_k * (1.0 - grid.theta[s]) + dt * grid.theta[s];
    double e = 1.0 - grid.theta[s];
    sd.vinf += grid.weight[s] / d;
    // monic form ζ^k = (e/d)·(b₀ζ^{k-1} + … + b_{k-1})
    for (int j = 0; j < k; ++j) companion(0, j) = e / d * scheme.b[j];
    Eigen::VectorXcd roots;
    if (k == 1) {
      roots = Eigen::VectorXcd::Constant(1, Cplx(companion(0, 0), 0.0));
    } else {
      Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
      roots = es.eigenvalues();
    }
    for (int j = 0; j < k; ++j) {
      Cplx lam = roots[j];
      // q'(λ) = k·d·λ^{k-1} − e·p'(λ)
      Cplx lp = 0.0;
      for (int a = k - 2; a >= 0; --a) {
        lp += double(k - 1 - a) * scheme.b[a] * std::pow(lam, k - 2 - a);
      }
      Cplx qp = double(k) * d * std::pow(lam, k - 1) - e * lp;
      Cplx num = grid.weight[s] * std::pow(lam, k);
      sd.poles[s * k + j] = lam;
      sd.res[s * k + j] = num / qp;
      min_sep = std::min(min_sep, std::abs(qp));
    }
  }
  sd.usable = sd.res.allFinite() && sd.poles.allFinite() && min_sep > 1e-12;
  return sd;
}

struct SecularWorkspace {
  Eigen::VectorXcd z;  // current root set (warm across σ)
  Eigen::VectorXcd g, gp, psum, pair;
  bool warm = false;
};

// One Aberth–Ehrlich sweep on F(ζ) = Π_j(ζ−λ_j)·(G(ζ)−c) for all roots
// simultaneously: F'/F = Σ_j 1/(ζ−λ_j) + G'/(G−c), and the pairwise Aberth
// term keeps the iterates from collapsing onto one another. Returns the
// largest relative correction.
double aberth_sweep(const SecularData& sd, Cplx c, SecularWorkspace& ws) {
  const int n = static_cast<int>(sd.poles.size());
  ws.g.setZero(n);
  ws.gp.setZero(n);
  ws.psum.setZero(n);
  ws.pair.setZero(n);
  for (int i = 0; i < n; ++i) {
    Cplx zi = ws.z[i];
    Cplx g = 0.0, gp = 0.0, ps = 0.0;
    for (int j = 0; j < n; ++j) {
      Cplx inv = 1.0 / (zi - sd.poles[j]);
      g += sd.res[j] * inv;
      gp -= sd.res[j] * inv * inv;
      ps += inv;
    }
    ws.g[i] = g;
    ws.gp[i] = gp;
    ws.psum[i] = ps;
  }
  for (int i = 0; i < n; ++i) {
    Cplx zi = ws.z[i];
    Cplx acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      acc += 1.0 / (zi - ws.z[j]);
    }
    ws.pair[i] = acc;
  }
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    Cplx denom = ws.psum[i] + ws.gp[i] / (ws.g[i] - c) - ws.pair[i];
    Cplx step = 1.0 / denom;
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
      // iterate sitting on a pole or a twin: nudge deterministically
      step = Cplx(1e-8, 1e-8) * (1.0 + std::abs(ws.z[i]));
    }
    ws.z[i] -= step;
    worst = std::max(worst, std::abs(step) / (1.0 + std::abs(ws.z[i])));
  }
  return worst;
}

// Largest root modulus of the secular equation at one σ. Returns NaN when the
// sweeps fail to settle (caller falls back to the dense eigensolve).
double secular_rho(const SecularData& sd, Cplx sigma, SecularWorkspace& ws) {
  const int n = static_cast<int>(sd.poles.size());
  if (sigma == 0.0) {
    ws.warm = false;  // exact decoupled spectrum; nothing to track
    return sd.poles.cwiseAbs().maxCoeff();
  }
  Cplx c = 1.0 / sigma - sd.vinf;
  int max_sweeps = 24;
  if (!ws.warm || ws.z.size() != n || !ws.z.allFinite()) {
    // first-order detachment of each root from its pole
    ws.z = sd.poles;
    if (std::abs(c) > 1e-290) ws.z += sd.res / c;
    max_sweeps = 60;
  }
  constexpr double tol = 1e-12;
  double worst = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    worst = aberth_sweep(sd, c, ws);
    if (worst <= tol) break;
  }
  if (!(worst <= 1e-9) || !ws.z.allFinite()) {
    ws.warm = false;
    return std::numeric_limits<double>::quiet_NaN();
  }
  ws.warm = true;
  return ws.z.cwiseAbs().maxCoeff();
}

PointFlag classify(double rho) {
  if (std::isnan(rho)) return PointFlag::singular;
  if (std::abs(rho - 1.0) <= 1e-6) return PointFlag::boundary;
  return rho < 1.0 ? PointFlag::stable : PointFlag::unstable;
}

// Small Krylov Rayleigh-Ritz estimate of the dominant eigenvalue modulus;
// used to refine the Gelfand bound after repeated squaring.
double ritz_modulus(const Eigen::MatrixXcd& c) {
  const int n = static_cast<int>(c.rows());
  const int m = std::min(4, n);
  Eigen::MatrixXcd v(n, m);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m, m);
  v.col(0) = deterministic_start(n);
  int r = m;
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXcd w = c * v.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXcd proj = v.leftCols(j + 1).adjoint() * w;
      w -= v.leftCols(j + 1) * proj;
      h.col(j).head(j + 1) += proj;
    }
    if (j + 1 == m) break;
    double rem = w.norm();
    if (rem <= 1e-14) {
      r = j + 1;
      break;
    }
    h(j + 1, j) = rem;
    v.col(j + 1) = w / rem;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h.topLeftCorner(r, r));
  if (es.info() != Eigen::Success) return 1.0;
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::MatrixXcd amplification_matrix(Cplx sigma, const ThetaGrid& grid,
                                      const BdfScheme& scheme, double dt) {
  std::vector<std::string> issues;
  if (grid.size() == 0) issues.push_back("theta grid must be non-empty");
  if (!(dt > 0.0) || !std::isfinite(dt))
    issues.push_back("dt must be positive and finite");
  if (!std::isfinite(sigma.real()) || !std::isfinite(sigma.imag()))
    issues.push_back("sigma must be finite");
  if (!issues.empty()) throw ValidationError(issues);

  WindowData wd = make_window_data(grid, scheme, dt);
  Cplx den;
  if (sigma_singular(wd, sigma, den))
    throw NumericalError(
        "amplification matrix is singular: 1 - sigma*sum(w/d) vanishes at "
        "sigma = (" +
        std::to_string(sigma.real()) + ", " + std::to_string(sigma.imag()) +
        ")");

  const int m1 = wd.m1;
  const int k = wd.k;
  const int dim = k * m1;
  const Cplx g = sigma / den;
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < k; ++j) {
    for (int c = 0; c < m1; ++c) {
      double bw = scheme.b[j] * wd.hist_w[c];
      int col = j * m1 + c;
      e.col(col).head(m1) = (bw * g * wd.vw[c]) * wd.inv_d;
      e(c, col) += bw * wd.inv_d[c];
    }
  }
  for (int j = 0; j + 1 < k; ++j)
    e.block((j + 1) * m1, j * m1, m1, m1).setIdentity();
  return e;
}

double spectral_radius(const Eigen::MatrixXcd& m, double rel_tol) {
  std::vector<std::string> issues;
  if (m.rows() == 0 || m.rows() != m.cols())
    issues.push_back("matrix must be square and non-empty");
  if (!(rel_tol > 0.0)) issues.push_back("rel_tol must be positive");
  if (!issues.empty()) throw ValidationError(issues);
  if (!m.allFinite()) throw ValidationError("matrix entries must be finite");

  double norm0 = m.norm();
  if (norm0 == 0.0) return 0.0;

  // B^(2^p) = norm0^(2^p) · Π s_i^(2^(p-i)) · C_p with ‖C_p‖_F = 1, so
  // log ρ(B) = log norm0 + Σ 2^-i log s_i + 2^-p log ρ(C_p).
  Eigen::MatrixXcd c = m / norm0;
  double log_rho = std::log(norm0);
  int p = 0;
  for (int iter = 1; iter <= 14; ++iter) {
    c = (c * c).eval();
    double s = c.norm();
    if (s < 1e-280) return 0.0;  // nilpotent part collapsed
    c /= s;
    log_rho += std::ldexp(std::log(s), -iter);
    p = iter;
  }
  double mu = std::max(ritz_modulus(c), 1e-300);
  (void)rel_tol;
  return std::exp(log_rho + std::ldexp(std::log(mu), -p));
}

RegionResult region_scan(const RegionSpec& spec) {
  std::vector<std::string> issues;
  if (spec.nx < 1) issues.push_back("nx must be >= 1");
  if (spec.ny < 1) issues.push_back("ny must be >= 1");
  if (!std::isfinite(spec.x0) || !std::isfinite(spec.x1) ||
      !std::isfinite(spec.y0) || !std::isfinite(spec.y1))
    issues.push_back("window bounds must be finite");
  if (spec.nx > 1 && !(spec.x1 > spec.x0))
    issues.push_back("x1 must exceed x0 when nx > 1");
  if (spec.ny > 1 && !(spec.y1 > spec.y0))
    issues.push_back("y1 must exceed y0 when ny > 1");
  if (!(spec.dt > 0.0) || !std::isfinite(spec.dt))
    issues.push_back("dt must be positive and finite");
  if (spec.M < 0) issues.push_back("M must be >= 0");
  if (spec.threads < 0) issues.push_back("threads must be >= 0");
  if (!issues.empty()) throw ValidationError(issues);

  ThetaGrid grid = gauss_jacobi_grid(spec.M, spec.alpha);
  BdfScheme scheme = bdf_coefficients(spec.k);
  WindowData wd = make_window_data(grid, scheme, spec.dt);

  RegionResult res;
  res.spec = spec;
  res.x.resize(spec.nx);
  for (int i = 0; i < spec.nx; ++i)
    res.x[i] = spec.nx == 1
                   ? spec.x0
                   : spec.x0 + i * (spec.x1 - spec.x0) / (spec.nx - 1);
  res.y.resize(spec.ny);
  for (int i = 0; i < spec.ny; ++i)
    res.y[i] = spec.ny == 1
                   ? spec.y0
                   : spec.y0 + i * (spec.y1 - spec.y0) / (spec.ny - 1);
  res.rho.resize(spec.ny, spec.nx);
  res.flag.resize(spec.ny, spec.nx);

  SecularData sd = make_secular_data(grid, scheme, spec.dt);

  auto t0 = std::chrono::steady_clock::now();

  // ρ(E(σ̄)) = ρ(E(σ)): on a window symmetric about the real axis only the
  // upper half is computed and the lower half is mirrored row by row.
  const bool mirrored = spec.ny > 1 && spec.y0 == -spec.y1;
  const int row_start = mirrored ? spec.ny / 2 : 0;
  const int compute_rows = spec.ny - row_start;

  unsigned hw = std::thread::hardware_concurrency();
  int nthreads = spec.threads > 0 ? spec.threads
                                  : static_cast<int>(hw > 0 ? hw : 1);
  nthreads = std::max(1, std::min(nthreads, compute_rows));

  std::vector<long> fallback_per_thread(nthreads, 0);
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&](int tid, int r0, int r1) {
    try {
      SecularWorkspace ws;
      for (int r = r0; r < r1; ++r) {
        ws.warm = false;  // fresh start per row keeps rows independent
        for (int i = 0; i < spec.nx; ++i) {
          Cplx sigma(res.x[i], res.y[r]);
          Cplx den;
          if (sigma_singular(wd, sigma, den)) {
            res.rho(r, i) = std::numeric_limits<double>::quiet_NaN();
            res.flag(r, i) = static_cast<std::uint8_t>(PointFlag::singular);
            continue;
          }
          double rho = sd.usable
                           ? secular_rho(sd, sigma, ws)
                           : std::numeric_limits<double>::quiet_NaN();
          if (std::isnan(rho)) {
            rho = spectral_radius(
                amplification_matrix(sigma, grid, scheme, spec.dt), 1e-8);
            ++fallback_per_thread[tid];
          }
          res.rho(r, i) = rho;
          res.flag(r, i) = static_cast<std::uint8_t>(classify(rho));
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  if (nthreads == 1) {
    worker(0, row_start, spec.ny);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    int base = compute_rows / nthreads, extra = compute_rows % nthreads,
        row = row_start;
    for (int t = 0; t < nthreads; ++t) {
      int count = base + (t < extra ? 1 : 0);
      pool.emplace_back(worker, t, row, row + count);
      row += count;
    }
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  if (mirrored) {
    for (int r = row_start; r < spec.ny; ++r) {
      int mr = spec.ny - 1 - r;
      if (mr == r) continue;
      res.rho.row(mr) = res.rho.row(r);
      res.flag.row(mr) = res.flag.row(r);
    }
  }

  for (long f : fallback_per_thread) res.fallback_points += f;
  for (int r = 0; r < spec.ny; ++r) {
    for (int i = 0; i < spec.nx; ++i) {
      switch (static_cast<PointFlag>(res.flag(r, i))) {
        case PointFlag::stable: ++res.stable; break;
        case PointFlag::unstable: ++res.unstable; break;
        case PointFlag::boundary: ++res.boundary; break;
        case PointFlag::singular: ++res.singular; break;
      }
    }
  }
  res.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

const char* flag_name(PointFlag f) {
  switch (f) {
    case PointFlag::stable: return "stable";
    case PointFlag::unstable: return "unstable";
    case PointFlag::boundary: return "boundary";
    case PointFlag::singular: return "singular";
  }
  return "unknown";
}

}  // namespace epde
