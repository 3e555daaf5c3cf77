#include "nemlab/continuous_market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nemlab/errors.hpp"
#include "nemlab/parallel.hpp"

namespace nemlab {
namespace {

double holding_energy(double y, const JointParams& params) {
  return params.holding == HoldingCost::linear ? params.holding_cost * y
                                               : params.holding_cost * y * y;
}

// Energy without the range check, for quadrature nodes.
double raw_energy(double y, int sigma, double m, const JointParams& params) {
  const double s = sigma;
  return holding_energy(y, params) - params.j_coupling * m * y * s +
         params.l_coupling * std::abs(m) * y * s * s - params.mu * y * s * s -
         params.field * y * s;
}

}  // namespace

void JointParams::validate() const {
  for (double v : {j_coupling, l_coupling, mu, holding_cost, y_max, market_depth, field}) {
    if (!std::isfinite(v)) throw std::domain_error("joint model parameters must be finite");
  }
  if (j_coupling < 0.0) throw std::domain_error("herding coupling J must be >= 0");
  if (l_coupling < 0.0) throw std::domain_error("contrarian coupling L must be >= 0");
  if (!(y_max > 0.0)) throw std::domain_error("maximum magnitude y_max must be > 0");
  if (holding_cost < 0.0) throw std::domain_error("holding cost c must be >= 0");
  if (n_investors < 1) throw std::domain_error("investor count N must be >= 1");
  if (!(market_depth > 0.0)) throw std::domain_error("market depth lambda must be > 0");
  qp.validate();
  quad.validate();
}

double joint_energy(double y, int sigma, double m, const JointParams& params) {
  if (!(y >= 0.0 && y <= params.y_max)) {
    throw std::domain_error("magnitude y outside [0, y_max]");
  }
  if (sigma < -1 || sigma > 1) throw std::domain_error("spin must be -1, 0 or +1");
  return raw_energy(y, sigma, m, params);
}

std::array<GridDistribution, 3> joint_distribution(double m, const JointParams& params) {
  if (!(std::abs(m) <= 1.0)) {
    throw std::domain_error("order parameter must satisfy |M| <= 1");
  }
  const EnergyFn branches[] = {
      [&](double y) { return raw_energy(y, -1, m, params); },
      [&](double y) { return raw_energy(y, 0, m, params); },
      [&](double y) { return raw_energy(y, 1, m, params); },
  };
  auto grids = build_joint_grid(branches, {0.0, params.y_max}, params.qp, params.quad);
  return {std::move(grids[0]), std::move(grids[1]), std::move(grids[2])};
}

double mean_joint_bias(double m, const JointParams& params) {
  const auto grids = joint_distribution(m, params);
  return grids[2].mass() - grids[0].mass();
}

JointSolution evaluate_joint(const JointParams& params, double m) {
  JointSolution sol;
  sol.m_star = m;
  sol.joint_density = joint_distribution(m, params);
  const auto y = [](double v) { return v; };
  sol.mean_demand = sol.joint_density[2].integrate(y) - sol.joint_density[0].integrate(y);
  sol.excess_demand = params.n_investors * sol.mean_demand;
  sol.price_change = sol.excess_demand / params.market_depth;
  sol.residual = std::abs(sol.joint_density[2].mass() - sol.joint_density[0].mass() - m);
  return sol;
}

JointSolution solve_joint(const JointParams& params, double m0, const SolverOptions& options) {
  params.validate();
  const OrderMap map = [&](double m) { return mean_joint_bias(m, params); };
  const FixedPointResult fp = solve_fixed_point(map, m0, options);
  JointSolution sol = evaluate_joint(params, fp.root);
  sol.converged = fp.converged;
  sol.iterations = fp.iterations;
  return sol;
}

JointSolution joint_positive_branch(const JointParams& params) {
  params.validate();
  const OrderMap map = [&](double m) { return mean_joint_bias(m, params); };
  const double root = largest_nonnegative_root(map);
  if (!std::isfinite(root)) throw NumericalError("no fixed point found on [-1, 1]");
  JointSolution sol = evaluate_joint(params, root);
  sol.converged = true;
  return sol;
}

std::vector<ScanPoint> joint_scan(const JointParams& params, const std::vector<double>& grid,
                                  int threads) {
  params.validate();
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw std::domain_error("coupling grid must be sorted ascending");
  }
  std::vector<ScanPoint> out(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    out[i].coupling = grid[i];
    JointParams p = params;
    p.j_coupling = grid[i] / params.qp.beta;
    try {
      out[i].m_plus = joint_positive_branch(p).m_star;
    } catch (const std::exception& e) {
      out[i].ok = false;
      out[i].m_plus = std::numeric_limits<double>::quiet_NaN();
      out[i].error = e.what();
    }
  });
  return out;
}

std::pair<double, double> excess_demand_and_price(const JointSolution& solution,
                                                  const JointParams& params) {
  const double demand = params.n_investors * solution.mean_demand;
  return {demand, demand / params.market_depth};
}

}  // namespace nemlab
