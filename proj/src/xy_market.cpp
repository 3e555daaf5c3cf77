#include "nemlab/xy_market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nemlab/errors.hpp"
#include "nemlab/parallel.hpp"

namespace nemlab {

void XYParams::validate() const {
  if (!std::isfinite(j_coupling) || j_coupling < 0.0) {
    throw std::domain_error("coupling J must be >= 0");
  }
  if (!std::isfinite(magnitude) || !(magnitude > 0.0)) {
    throw std::domain_error("demand magnitude y must be > 0");
  }
  if (n_investors < 1) throw std::domain_error("investor count N must be >= 1");
  if (!std::isfinite(market_depth) || !(market_depth > 0.0)) {
    throw std::domain_error("market depth lambda must be > 0");
  }
  if (!std::isfinite(field)) throw std::domain_error("field must be finite");
  qp.validate();
  quad.validate();
}

Interval XYParams::interval() const {
  return {0.0, domain == AngleDomain::half_circle ? std::numbers::pi : 2.0 * std::numbers::pi};
}

double xy_energy(double theta, double m, const XYParams& params) {
  const Interval range = params.interval();
  if (!(theta >= range.lower && theta <= range.upper)) {
    throw std::domain_error("angle outside the bias domain");
  }
  return -(params.j_coupling * m + params.field) * std::cos(theta);
}

GridDistribution angle_distribution(double m, const XYParams& params) {
  if (!(std::abs(m) <= 1.0)) {
    throw std::domain_error("order parameter must satisfy |M| <= 1");
  }
  const double coupling = params.j_coupling * m + params.field;
  auto e = [coupling](double theta) { return -coupling * std::cos(theta); };
  return build_grid(e, params.interval(), params.qp, params.quad);
}

double mean_cosine(double m, const XYParams& params) {
  const GridDistribution g = angle_distribution(m, params);
  // A flat density averages cos to zero on either domain; the quadrature sum
  // would leave a 1e-17 residue that shows up as a spurious root.
  if (params.j_coupling * m + params.field == 0.0) return 0.0;
  return g.integrate([](double theta) { return std::cos(theta); });
}

XYSolution evaluate_order_parameter(const XYParams& params, double m) {
  XYSolution sol;
  sol.m_star = m;
  sol.distribution = angle_distribution(m, params);
  sol.residual =
      std::abs(sol.distribution.integrate([](double t) { return std::cos(t); }) - m);
  sol.price_change = params.n_investors * params.magnitude * m / params.market_depth;
  return sol;
}

XYSolution solve_order_parameter(const XYParams& params, double m0,
                                 const SolverOptions& options) {
  params.validate();
  const OrderMap map = [&](double m) { return mean_cosine(m, params); };
  const FixedPointResult fp = solve_fixed_point(map, m0, options);
  XYSolution sol = evaluate_order_parameter(params, fp.root);
  sol.converged = fp.converged;
  sol.iterations = fp.iterations;
  return sol;
}

XYSolution xy_positive_branch(const XYParams& params) {
  params.validate();
  const OrderMap map = [&](double m) { return mean_cosine(m, params); };
  const double root = largest_nonnegative_root(map);
  if (!std::isfinite(root)) throw NumericalError("no fixed point found on [-1, 1]");
  XYSolution sol = evaluate_order_parameter(params, root);
  sol.converged = true;
  return sol;
}

std::vector<ScanPoint> xy_critical_scan(const XYParams& params, const std::vector<double>& grid,
                                        int threads) {
  params.validate();
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw std::domain_error("coupling grid must be sorted ascending");
  }
  std::vector<ScanPoint> out(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    out[i].coupling = grid[i];
    XYParams p = params;
    p.j_coupling = grid[i] / params.qp.beta;
    try {
      out[i].m_plus = xy_positive_branch(p).m_star;
    } catch (const std::exception& e) {
      out[i].ok = false;
      out[i].m_plus = std::numeric_limits<double>::quiet_NaN();
      out[i].error = e.what();
    }
  });
  return out;
}

}  // namespace nemlab
