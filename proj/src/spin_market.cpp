#include "nemlab/spin_market.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nemlab/errors.hpp"
#include "nemlab/parallel.hpp"

namespace nemlab {
namespace {

constexpr int kMaxBruteForce = 12;

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << name << " must be finite";
    throw std::domain_error(msg.str());
  }
}

}  // namespace

void ModelParams::validate() const {
  require_finite(j_coupling, "J");
  require_finite(l_coupling, "L");
  require_finite(mu, "mu");
  require_finite(field, "field");
  if (j_coupling < 0.0) throw std::domain_error("herding coupling J must be >= 0");
  if (l_coupling < 0.0) throw std::domain_error("contrarian coupling L must be >= 0");
  if (n_investors < 1) throw std::domain_error("investor count N must be >= 1");
  if (!(market_depth > 0.0) || !std::isfinite(market_depth)) {
    throw std::domain_error("market depth lambda must be > 0");
  }
  qp.validate();
}

double energy(int sigma, double m, const ModelParams& params) {
  if (sigma < -1 || sigma > 1) {
    throw std::domain_error("spin must be -1, 0 or +1");
  }
  if (!(std::abs(m) <= 1.0)) {
    throw std::domain_error("mean bias must satisfy |m| <= 1");
  }
  if (sigma == 0) return 0.0;
  const double s = sigma;
  if (params.contrarian == ContrarianForm::linear) {
    return -(params.j_coupling - params.l_coupling) * m * s - params.mu - params.field * s;
  }
  return -params.j_coupling * m * s + params.l_coupling * std::abs(m) - params.mu -
         params.field * s;
}

DiscreteDistribution bias_distribution(double m, const ModelParams& params) {
  const std::array<double, 3> e = {energy(-1, m, params), energy(0, m, params),
                                   energy(1, m, params)};
  return build_discrete({-1, 0, 1}, e, params.qp);
}

double mean_bias(double m, const ModelParams& params) {
  const DiscreteDistribution dist = bias_distribution(m, params);
  const double q = params.qp.q;
  // Near m = 0 the difference w+^q - w-^q cancels, so it is formed from the
  // sigma-odd part of the energy instead of from the two weights.
  const double j_eff = params.contrarian == ContrarianForm::linear
                           ? params.j_coupling - params.l_coupling
                           : params.j_coupling;
  const double du = 2.0 * params.qp.beta * (j_eff * m + params.field);  // u(+1) - u(-1)
  const double w_down = dist.weights[0];
  const double w_up = dist.weights[2];
  const double big_down = std::pow(w_down, q);
  const double big_up = std::pow(w_up, q);
  double numerator = 0.0;
  if (w_down == 0.0 || w_up == 0.0) {
    numerator = big_up - big_down;
  } else if (is_classical(q)) {
    numerator = big_down * std::expm1(q * du);
  } else {
    const double x_down = (1.0 - q) * (-params.qp.beta * dist.energies[0]);
    const double log_ratio = std::log1p((1.0 - q) * du / (1.0 + x_down));
    numerator = big_down * std::expm1(q / (1.0 - q) * log_ratio);
  }
  const double denominator =
      params.averaging == Averaging::escort
          ? big_down + std::pow(dist.weights[1], q) + big_up
          : std::pow(dist.z_q, q);
  return std::clamp(numerator / denominator, -1.0, 1.0);
}

MeanFieldSolution evaluate_bias(const ModelParams& params, double m) {
  MeanFieldSolution sol;
  sol.m_star = m;
  sol.distribution = bias_distribution(m, params);
  const std::vector<double> w = params.counts == CountWeights::escort
                                    ? escort(sol.distribution.probs, params.qp.q)
                                    : sol.distribution.probs;
  const double n = params.n_investors;
  sol.n_down = n * w[0];
  sol.n_zero = n * w[1];
  sol.n_up = n * w[2];
  sol.active_fraction = w[0] + w[2];
  sol.price_change = price_change_from_bias(m, params);
  sol.residual = std::abs(mean_bias(m, params) - m);
  return sol;
}

MeanFieldSolution self_consistent_bias(const ModelParams& params, double m0,
                                       const SolverOptions& options) {
  params.validate();
  options.validate();
  const OrderMap map = [&](double m) { return mean_bias(m, params); };
  const FixedPointResult fp = solve_fixed_point(map, m0, options);
  MeanFieldSolution sol = evaluate_bias(params, fp.root);
  sol.converged = fp.converged;
  sol.iterations = fp.iterations;
  if (options.collect_roots) sol.roots = distinct_roots(map, options);
  return sol;
}

MeanFieldSolution positive_branch(const ModelParams& params) {
  params.validate();
  const OrderMap map = [&](double m) { return mean_bias(m, params); };
  const double root = largest_nonnegative_root(map);
  if (!std::isfinite(root)) {
    throw NumericalError("no fixed point found on [-1, 1]");
  }
  MeanFieldSolution sol = evaluate_bias(params, root);
  sol.converged = true;
  return sol;
}

std::vector<ScanPoint> bifurcation_scan(const ModelParams& params,
                                        const std::vector<double>& coupling_grid, int threads) {
  params.validate();
  if (!std::is_sorted(coupling_grid.begin(), coupling_grid.end())) {
    throw std::domain_error("coupling grid must be sorted ascending");
  }
  std::vector<ScanPoint> out(coupling_grid.size());
  parallel_for(coupling_grid.size(), threads, [&](std::size_t i) {
    ScanPoint& point = out[i];
    point.coupling = coupling_grid[i];
    ModelParams p = params;
    p.j_coupling = coupling_grid[i] / params.qp.beta;
    try {
      point.m_plus = positive_branch(p).m_star;
    } catch (const std::exception& e) {
      point.ok = false;
      point.m_plus = std::numeric_limits<double>::quiet_NaN();
      point.error = e.what();
    }
  });
  return out;
}

ExactEnsemble brute_force_full_model(int n_small, const ModelParams& params) {
  if (n_small < 1 || n_small > kMaxBruteForce) {
    std::ostringstream msg;
    msg << "exact enumeration is limited to 1 <= N <= " << kMaxBruteForce << ", got " << n_small;
    throw std::domain_error(msg.str());
  }
  params.validate();
  std::int64_t count = 1;
  for (int i = 0; i < n_small; ++i) count *= 3;

  const double n = n_small;
  std::vector<std::int64_t> labels(count);
  std::vector<double> energies(count);
  std::vector<double> bias(count);
  std::vector<double> bias_sq(count);
  std::vector<int> digits(n_small, 0);  // sigma_i + 1
  for (std::int64_t idx = 0; idx < count; ++idx) {
    int sum = 0;
    int active = 0;
    for (int d : digits) {
      sum += d - 1;
      active += d != 1;
    }
    const double s = sum;
    const double pairs = 0.5 * (s * s - active);
    labels[idx] = idx;
    energies[idx] = -(params.j_coupling / n) * pairs + (params.l_coupling / (2.0 * n)) * s * s -
                    params.mu * active - params.field * s;
    bias[idx] = s / n;
    bias_sq[idx] = bias[idx] * bias[idx];
    for (int& d : digits) {  // base-3 increment, least significant first
      if (++d < 3) break;
      d = 0;
    }
  }
  ExactEnsemble out;
  out.n = n_small;
  out.distribution = build_discrete(std::move(labels), energies, params.qp);
  out.mean_bias = q_expectation(bias, out.distribution.probs, params.qp.q, params.averaging);
  out.mean_bias_sq = q_expectation(bias_sq, out.distribution.probs, params.qp.q, params.averaging);
  return out;
}

double price_change_from_bias(double m, const ModelParams& params) {
  if (!(std::abs(m) <= 1.0)) {
    throw std::domain_error("mean bias must satisfy |m| <= 1");
  }
  return params.n_investors * m / params.market_depth;
}

}  // namespace nemlab
