#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "epde/experiments.hpp"

namespace {

// Accepts "1".."5" or Roman numerals "I".."V"; 0 selects an inline problem.
int parse_case_id(const std::string& token) {
  if (token == "I" || token == "i") return 1;
  if (token == "II" || token == "ii") return 2;
  if (token == "III" || token == "iii") return 3;
  if (token == "IV" || token == "iv") return 4;
  if (token == "V" || token == "v") return 5;
  try {
    std::size_t pos = 0;
    int id = std::stoi(token, &pos);
    if (pos == token.size()) return id;
  } catch (const std::exception&) {
  }
  throw epde::ValidationError("unrecognized case '" + token +
                              "' (use 1-5 or I-V)");
}

void write_output(const std::string& content, const std::string& path) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("error writing output file: " + path);
}

// Summary goes to stdout when the table went to a file (the documented
// behaviour), to stderr otherwise so stdout stays machine-readable CSV.
void emit(const std::string& csv, const std::string& summary,
          const std::string& out_path) {
  write_output(csv, out_path);
  (out_path.empty() ? std::cerr : std::cout) << summary;
}

void warn_large_dt(bool large_dt) {
  if (large_dt)
    std::cerr << "warning: dt >= 1 lies outside the regime the error "
                 "estimates assume (dt < 1); results may lose accuracy\n";
}

struct CommonFlags {
  std::string case_token;
  epde::RunConfig cfg;
  std::string out_path;
};

// Options shared by solve/converge/mconverge.
void add_problem_flags(CLI::App* sub, CommonFlags& c, bool with_stepping) {
  sub->add_option("--case", c.case_token,
                  "built-in case 1-5 (Roman numerals accepted); omit for an "
                  "inline linear problem");
  sub->add_option("--alpha", c.cfg.alpha, "fractional order in (0,1)")
      ->required();
  sub->add_option("--T", c.cfg.horizon, "final time")->capture_default_str();
  sub->add_option("--lambda", c.cfg.lambda,
                  "inline problem: reaction coefficient")->capture_default_str();
  sub->add_option("--phi0", c.cfg.phi0, "inline problem: initial value")->capture_default_str();
  sub->add_option("--forcing", c.cfg.forcing,
                  "inline problem: zero|one|sin|cos|gamma")->capture_default_str();
  sub->add_option("--k", c.cfg.k, "BDF order 1..5")->capture_default_str();
  sub->add_option("--M", c.cfg.M, "largest collocation index")->capture_default_str();
  if (with_stepping) {
    sub->add_option("--N", c.cfg.N, "number of steps (excludes --dt)");
    sub->add_option("--dt", c.cfg.dt, "step size (excludes --N)");
  }
  sub->add_option("--startup", c.cfg.startup,
                  "cascade|refined|exact (default: cascade; mconverge "
                  "defaults to exact when the case has a closed form)");
  sub->add_option("--refine", c.cfg.refine,
                  "substeps for refined startup")->capture_default_str();
  sub->add_option("--error-norm", c.cfg.error_norm, "endpoint|max")->capture_default_str();
  sub->add_option("--picard-max-iter", c.cfg.picard_max_iter,
                  "cap on Picard sweeps per step for nonlinear problems "
                  "(0 = solver default)")->capture_default_str();
  sub->add_option("--out", c.out_path, "write the table here (default: stdout)");
  sub->set_config("--config", "", "flat key=value config file");
}

void finish_config(CommonFlags& c) {
  c.cfg.case_id = c.case_token.empty() ? 0 : parse_case_id(c.case_token);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Collocation solver for Caputo fractional ODEs: the memory integral "
      "is traded for a one-parameter family of local ODEs, discretized by "
      "Gauss-Jacobi collocation in the parameter and BDF-k in time."};
  app.require_subcommand(1);

  CommonFlags solve_c, conv_c, mconv_c;
  std::string states_out;

  CLI::App* solve = app.add_subcommand(
      "solve", "march one trajectory and emit a t,phi table");
  add_problem_flags(solve, solve_c, true);
  solve->add_option("--states-out", states_out,
                    "also dump collocation states (t,theta_index,value)");
  solve->add_flag("--force-dense", solve_c.cfg.force_dense,
                  "use the dense LU factorization path");

  CLI::App* conv = app.add_subcommand(
      "converge", "error vs dt table over a halving dt list");
  add_problem_flags(conv, conv_c, false);
  std::vector<double> dts;
  double dt0 = 0.0;
  int levels = 0;
  bool self_ref = false;
  conv->add_option("--dts", dts,
                   "comma-separated dt list, each half the previous")
      ->delimiter(',');
  conv->add_option("--dt0", dt0, "coarsest dt (with --levels)");
  conv->add_option("--levels", levels, "number of halvings from --dt0");
  conv->add_flag("--self-reference", self_ref,
                 "compare against the same scheme at dt_min/16 and M+10 "
                 "(required for cases without a closed form)");

  CLI::App* mconv = app.add_subcommand(
      "mconverge", "error vs collocation size M at fixed dt");
  add_problem_flags(mconv, mconv_c, true);
  std::vector<int> Ms;
  mconv->add_option("--Ms", Ms, "comma-separated increasing M list")
      ->delimiter(',')
      ->required();

  CLI::App* region = app.add_subcommand(
      "region", "spectral-radius scan of the one-step operator over a "
                "window of sigma = -dt*lambda");
  epde::RegionSpec rspec;
  std::string region_out;
  region->add_option("--alpha", rspec.alpha, "fractional order in (0,1)")
      ->required();
  region->add_option("--k", rspec.k, "BDF order 1..5")->capture_default_str();
  region->add_option("--M", rspec.M, "largest collocation index")->capture_default_str();
  region->add_option("--dt", rspec.dt, "step size")->capture_default_str();
  region->add_option("--x0", rspec.x0, "window: min Re sigma")->capture_default_str();
  region->add_option("--x1", rspec.x1, "window: max Re sigma")->capture_default_str();
  region->add_option("--y0", rspec.y0, "window: min Im sigma")->capture_default_str();
  region->add_option("--y1", rspec.y1, "window: max Im sigma")->capture_default_str();
  region->add_option("--nx", rspec.nx, "grid count in Re sigma")->capture_default_str()
      ->check(CLI::Range(2, 100000));
  region->add_option("--ny", rspec.ny, "grid count in Im sigma")->capture_default_str()
      ->check(CLI::Range(2, 100000));
  region->add_option("--threads", rspec.threads,
                     "worker threads (0 = hardware)")->capture_default_str();
  region->add_option("--out", region_out, "write the table here");
  region->set_config("--config", "", "flat key=value config file");

  CLI::App* ml_cmd = app.add_subcommand(
      "ml", "evaluate the one-parameter Mittag-Leffler function");
  double ml_alpha = 0.0, ml_z = 0.0;
  ml_cmd->add_option("--alpha", ml_alpha, "order in (0,1]")->required();
  ml_cmd->add_option("--z", ml_z, "real argument, |z| <= 100")->required();

  CLI::App* gdump = app.add_subcommand(
      "grid-dump", "emit the Gauss-Jacobi nodes and weights");
  double gd_alpha = 0.0;
  int gd_M = 30;
  std::string gd_out;
  gdump->add_option("--alpha", gd_alpha, "fractional order in (0,1)")
      ->required();
  gdump->add_option("--M", gd_M, "largest collocation index")->capture_default_str();
  gdump->add_option("--out", gd_out, "write the table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return 2;
  }

  try {
    if (app.got_subcommand(solve)) {
      finish_config(solve_c);
      epde::SolveReport rep = epde::run_solve(solve_c.cfg, !states_out.empty());
      warn_large_dt(rep.large_dt);
      if (!states_out.empty()) write_output(rep.states_csv, states_out);
      emit(rep.csv, rep.summary, solve_c.out_path);
    } else if (app.got_subcommand(conv)) {
      finish_config(conv_c);
      if (dts.empty()) {
        if (!(dt0 > 0.0) || levels < 3)
          throw epde::ValidationError(
              "converge needs --dts or --dt0 with --levels >= 3");
        for (int i = 0; i < levels; ++i)
          dts.push_back(dt0 / double(1L << i));
      }
      epde::ConvergeReport rep =
          epde::run_converge(conv_c.cfg, dts, self_ref);
      emit(rep.csv, rep.summary, conv_c.out_path);
    } else if (app.got_subcommand(mconv)) {
      finish_config(mconv_c);
      epde::MconvergeReport rep = epde::run_mconverge(mconv_c.cfg, Ms);
      emit(rep.csv, rep.summary, mconv_c.out_path);
    } else if (app.got_subcommand(region)) {
      epde::RegionReport rep = epde::run_region(rspec);
      emit(rep.csv, rep.summary, region_out);
    } else if (app.got_subcommand(ml_cmd)) {
      std::cout << epde::run_ml_line(ml_alpha, ml_z);
    } else if (app.got_subcommand(gdump)) {
      write_output(epde::run_grid_dump(gd_alpha, gd_M), gd_out);
    }
  } catch (const epde::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const epde::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
