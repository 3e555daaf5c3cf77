#pragma once

#include <array>
#include <utility>
#include <vector>

#include "nemlab/fixed_point.hpp"
#include "nemlab/maxent.hpp"

namespace nemlab {

enum class HoldingCost {
  linear,     // H0 = c y
  quadratic,  // H0 = c y^2
};

/// Joint magnitude y in [0, y_max] and bias sigma in {-1, 0, +1}; every
/// coupling is weighted by the magnitude.
struct JointParams {
  double j_coupling = 0.0;
  double l_coupling = 0.0;
  double mu = 0.0;
  double holding_cost = 0.0;  // c, energy per share
  double y_max = 1.0;
  int n_investors = 1;
  double market_depth = 1.0;
  QParams qp;
  double field = 0.0;  // enters as -h y sigma
  HoldingCost holding = HoldingCost::linear;
  QuadratureSpec quad;

  void validate() const;
};

struct JointSolution {
  double m_star = 0.0;
  /// Densities over y for sigma = -1, 0, +1, sharing one normalization.
  std::array<GridDistribution, 3> joint_density;
  double mean_demand = 0.0;    // <y sigma>
  double excess_demand = 0.0;  // N <y sigma>
  double price_change = 0.0;
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;

  double z_q() const { return joint_density[0].z_q; }
  /// Probability of a nonzero bias.
  double active_fraction() const {
    return joint_density[0].mass() + joint_density[2].mass();
  }
};

/// E(y, sigma; M) = H0(y) - J M y sigma + L |M| y sigma^2 - mu y sigma^2 - h y sigma.
double joint_energy(double y, int sigma, double m, const JointParams& params);

std::array<GridDistribution, 3> joint_distribution(double m, const JointParams& params);

/// Ordinary average <sigma> = sum_sigma int sigma P(y, sigma) dy.
double mean_joint_bias(double m, const JointParams& params);

JointSolution solve_joint(const JointParams& params, double m0, const SolverOptions& options = {});

JointSolution evaluate_joint(const JointParams& params, double m);

JointSolution joint_positive_branch(const JointParams& params);

std::vector<ScanPoint> joint_scan(const JointParams& params, const std::vector<double>& grid,
                                  int threads = 1);

/// (D, Delta x) with D = N sum_sigma int y sigma P dy and Delta x = D / lambda.
std::pair<double, double> excess_demand_and_price(const JointSolution& solution,
                                                  const JointParams& params);

}  // namespace nemlab
