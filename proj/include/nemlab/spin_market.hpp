#pragma once

#include <vector>

#include "nemlab/fixed_point.hpp"
#include "nemlab/maxent.hpp"
#include "nemlab/qmath.hpp"

namespace nemlab {

/// How the contrarian coupling enters the mean-field energy.
enum class ContrarianForm {
  abs_bias,  // +L |m| sigma^2: activity is penalized when consensus is strong
  linear,    // -(J - L) m sigma: contrarians just weaken the herding field
};

/// Which weights turn probabilities into occupation counts.
enum class CountWeights { escort, ordinary };

/// Three-state investor model: sigma in {-1, 0, +1}.
struct ModelParams {
  double j_coupling = 0.0;  // herding J
  double l_coupling = 0.0;  // contrarian L
  double mu = 0.0;          // chemical potential, couples to sigma^2
  int n_investors = 1;
  double market_depth = 1.0;  // lambda
  QParams qp;
  double field = 0.0;  // external bias field h, enters as -h sigma
  ContrarianForm contrarian = ContrarianForm::abs_bias;
  Averaging averaging = Averaging::escort;
  CountWeights counts = CountWeights::escort;

  void validate() const;
};

struct MeanFieldSolution {
  double m_star = 0.0;
  DiscreteDistribution distribution;  // states -1, 0, +1
  double n_up = 0.0;
  double n_zero = 0.0;
  double n_down = 0.0;
  double active_fraction = 0.0;  // <sigma^2> under the count weights
  double price_change = 0.0;
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> roots;  // filled when SolverOptions::collect_roots is set
};

/// Mean-field single-investor energy. E(0; m) == 0 for every m.
double energy(int sigma, double m, const ModelParams& params);

/// Distribution over {-1, 0, +1} for a given mean bias m.
DiscreteDistribution bias_distribution(double m, const ModelParams& params);

/// <sigma>_q under bias_distribution(m); the self-consistency map.
double mean_bias(double m, const ModelParams& params);

/// Self-consistent m* = <sigma>_q(m*) reached from m0.
MeanFieldSolution self_consistent_bias(const ModelParams& params, double m0,
                                       const SolverOptions& options = {});

/// Distribution, counts and price change at a given bias, without solving.
MeanFieldSolution evaluate_bias(const ModelParams& params, double m);

/// Solution on the largest nonnegative root (found by root enumeration).
MeanFieldSolution positive_branch(const ModelParams& params);

/// For each beta*J in the ascending grid, the largest nonnegative fixed
/// point. J is set to grid / beta; the other parameters are kept.
std::vector<ScanPoint> bifurcation_scan(const ModelParams& params,
                                        const std::vector<double>& coupling_grid,
                                        int threads = 1);

struct ExactEnsemble {
  DiscreteDistribution distribution;  // state label = base-3 configuration index
  double mean_bias = 0.0;             // <(sum sigma_i)/N>_q
  double mean_bias_sq = 0.0;          // <((sum sigma_i)/N)^2>_q
  int n = 0;
};

/// Exact q-distribution over all 3^N configurations of the pairwise model
///   H = -(J/N) sum_{i<j} s_i s_j + (L/2N) (sum s_i)^2 - mu sum s_i^2 - h sum s_i.
/// Refuses N > 12.
ExactEnsemble brute_force_full_model(int n_small, const ModelParams& params);

/// Delta x = N m / lambda.
double price_change_from_bias(double m, const ModelParams& params);

}  // namespace nemlab
