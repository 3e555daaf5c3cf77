#pragma once

#include <vector>

#include "nemlab/fixed_point.hpp"
#include "nemlab/maxent.hpp"

namespace nemlab {

enum class AngleDomain {
  half_circle,  // theta in [0, pi]
  full_circle,  // theta in [0, 2 pi]
};

/// Continuous bias angle with a cosine mean-field interaction and a fixed
/// demand magnitude per investor.
struct XYParams {
  double j_coupling = 0.0;
  double magnitude = 1.0;  // y, shares per investor
  int n_investors = 1;
  double market_depth = 1.0;
  QParams qp;
  double field = 0.0;  // enters as -h cos(theta)
  AngleDomain domain = AngleDomain::half_circle;
  QuadratureSpec quad;

  void validate() const;
  Interval interval() const;
};

struct XYSolution {
  double m_star = 0.0;  // M = <cos theta>, ordinary average
  GridDistribution distribution;
  double price_change = 0.0;
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// E(theta; M) = -J M cos(theta) - h cos(theta).
double xy_energy(double theta, double m, const XYParams& params);

GridDistribution angle_distribution(double m, const XYParams& params);

/// Ordinary quadrature average of cos(theta) at order parameter m.
double mean_cosine(double m, const XYParams& params);

XYSolution solve_order_parameter(const XYParams& params, double m0,
                                 const SolverOptions& options = {});

XYSolution evaluate_order_parameter(const XYParams& params, double m);

XYSolution xy_positive_branch(const XYParams& params);

/// Largest nonnegative M* over an ascending beta*J grid (J = grid / beta).
std::vector<ScanPoint> xy_critical_scan(const XYParams& params, const std::vector<double>& grid,
                                        int threads = 1);

}  // namespace nemlab
