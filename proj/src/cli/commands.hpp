#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace nemlab::cli {

enum ExitCode : int { kOk = 0, kInvalidInput = 1, kNotConverged = 2 };

/// One solved equilibrium, flattened to the output columns.
struct SolveRow {
  std::string model;
  double q = 0.0;
  double beta = 0.0;
  double j = 0.0;
  double l = 0.0;
  double mu = 0.0;
  double m_star = 0.0;
  double z_q = 0.0;
  double active_fraction = 0.0;
  double price_change = 0.0;
  bool converged = false;
  int iterations = 0;
};

SolveRow solve_row(const RunConfig& config);
SolveRow branch_row(const RunConfig& config);

int run_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_fit(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line entry. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nemlab::cli
