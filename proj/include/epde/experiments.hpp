#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epde/problems.hpp"
#include "epde/stability.hpp"
#include "epde/stepper.hpp"

namespace epde {

// One solver invocation on a built-in case (case_id 1..5) or an inline
// linear problem (case_id 0: d^α φ = -λφ + f with f from a small forcing
// registry: zero, one, sin, cos, gamma = Γ(1+α)). Exactly one of N / dt
// selects the step size (run_converge ignores both and takes its own dt
// list). startup: "cascade", "refined", "exact", or "" for the per-command
// default — cascade for solve/converge; exact-when-available for
// mconverge, whose M-study would otherwise bottom out on startup error.
struct RunConfig {
  int case_id = 2;
  double alpha = 0.5;
  double horizon = 1.0;
  int k = 3;
  int M = 30;
  long N = 0;
  double dt = 0.0;
  std::string startup;
  int refine = 64;                      // substeps for refined startup
  std::string error_norm = "endpoint";  // endpoint | max
  double lambda = 0.0;                  // inline problems only
  double phi0 = 0.0;
  std::string forcing = "zero";
  bool force_dense = false;             // dense LU instead of the fast path
  int picard_max_iter = 0;              // 0 keeps the solver default (100);
                                        // lagged-F iteration on stiff cubic
                                        // problems can need ~200 at coarse dt
};

struct SolveReport {
  Trajectory traj;
  std::optional<double> error;  // vs closed form, when the case has one
  std::string csv;              // provenance line + t,phi table
  std::string states_csv;       // t,theta_index,value; only when requested
  std::string summary;          // final φ, error, work and wall time
  bool large_dt = false;        // dt >= 1: outside the error theory
};
SolveReport run_solve(const RunConfig& cfg, bool store_states = false);

struct ConvergeReport {
  std::vector<double> dts;
  std::vector<double> errors;
  std::vector<double> observed_orders;  // log2 ratios; NaN on the first row
  double fitted_order = 0.0;  // LS slope over rows above the error floor
  std::string csv;
  std::string summary;
};
// dts must halve strictly and contain at least 3 entries. Cases without a
// closed form require self_reference, which reruns the same scheme at
// dt_ref = min(dts)/16 with M+10 nodes as the reference.
ConvergeReport run_converge(const RunConfig& cfg, std::vector<double> dts,
                            bool self_reference);

struct MconvergeReport {
  std::vector<int> Ms;
  std::vector<double> errors;
  double ratio = 0.0;  // error(M_max) / error(M_min)
  std::string csv;
  std::string summary;
};
// Ms must be strictly increasing with at least 2 entries; dt defaults to
// 1e-4·T when the config sets neither N nor dt.
MconvergeReport run_mconverge(const RunConfig& cfg, std::vector<int> Ms);

struct RegionReport {
  RegionResult result;
  std::string csv;  // re_sigma,im_sigma,rho,flag rows plus count comments
  std::string summary;
};
RegionReport run_region(const RegionSpec& spec);

std::string run_grid_dump(double alpha, int M);  // j,theta,weight table
std::string run_ml_line(double alpha, double z); // bare 17-digit value

// Shared CSV plumbing.
std::string format17(double v);
std::uint64_t fnv1a64(const std::string& s);
// "# cmd=<command> version=<v> config_hash=<16 hex digits>\n"; the hash
// covers the canonical command, so spelling differences in user flags that
// resolve to the same configuration hash identically.
std::string provenance_line(const std::string& command);

}  // namespace epde
