#include "nemlab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "nemlab/csv.hpp"
#include "nemlab/errors.hpp"
#include "nemlab/parallel.hpp"

namespace nemlab {

InverseCdfSampler::InverseCdfSampler(std::vector<double> masses, std::vector<double> values)
    : values_(std::move(values)) {
  if (masses.empty() || masses.size() != values_.size()) {
    throw std::domain_error("sampler needs one mass per value");
  }
  cdf_.resize(masses.size());
  double total = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!(masses[i] >= 0.0)) throw std::domain_error("sampler masses must be >= 0");
    total += masses[i];
    cdf_[i] = total;
    if (masses[i] > 0.0) last_positive_ = i;
  }
  if (!(total > 0.0)) throw std::domain_error("sampler masses sum to zero");
  for (double& c : cdf_) c /= total;
}

std::size_t InverseCdfSampler::index_at(double u) const {
  // upper_bound never lands on a zero-mass state; u >= 1 maps to the last
  // state that carries mass.
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return last_positive_;
  return static_cast<std::size_t>(it - cdf_.begin());
}

double InverseCdfSampler::value_at(double u) const { return values_[index_at(u)]; }

double InverseCdfSampler::draw(Rng& rng, bool antithetic) const {
  const double u = rng.uniform();
  return value_at(antithetic ? 1.0 - u : u);
}

std::vector<std::int64_t> sample_investors(const DiscreteDistribution& dist, std::size_t n,
                                           Rng& rng) {
  std::vector<double> labels(dist.states.begin(), dist.states.end());
  const InverseCdfSampler sampler(dist.probs, labels);
  std::vector<std::int64_t> out(n);
  for (auto& s : out) s = dist.states[sampler.index_at(rng.uniform())];
  return out;
}

std::vector<double> sample_investors(const GridDistribution& grid, std::size_t n, Rng& rng) {
  std::vector<double> masses(grid.nodes.size());
  for (std::size_t i = 0; i < masses.size(); ++i) masses[i] = grid.node_weights[i] * grid.density[i];
  const InverseCdfSampler sampler(std::move(masses), grid.nodes);
  std::vector<double> out(n);
  for (double& x : out) x = sampler.draw(rng);
  return out;
}

namespace {

struct JointSampler {
  InverseCdfSampler sampler;
  std::vector<int> sigma;
  std::vector<double> y;
};

JointSampler make_joint_sampler(std::span<const GridDistribution, 3> branches) {
  JointSampler js;
  std::vector<double> masses;
  std::vector<double> index;
  for (int b = 0; b < 3; ++b) {
    const GridDistribution& g = branches[b];
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      masses.push_back(g.node_weights[i] * g.density[i]);
      index.push_back(static_cast<double>(js.sigma.size()));
      js.sigma.push_back(b - 1);
      js.y.push_back(g.nodes[i]);
    }
  }
  js.sampler = InverseCdfSampler(std::move(masses), std::move(index));
  return js;
}

// Per-step equilibrium for the chosen model: the order parameter and a
// sampler whose values are each investor's signed demand.
struct Equilibrium {
  double order = 0.0;
  InverseCdfSampler demand;
};

Equilibrium solve_equilibrium(const SimConfig& config, double field, double m0) {
  Equilibrium eq;
  switch (config.model) {
    case ModelKind::discrete: {
      ModelParams p = config.discrete;
      p.field = field;
      const MeanFieldSolution sol = self_consistent_bias(p, m0, config.solver);
      if (!sol.converged) throw NumericalError("self-consistency did not converge");
      eq.order = sol.m_star;
      eq.demand = InverseCdfSampler({sol.n_down, sol.n_zero, sol.n_up}, {-1.0, 0.0, 1.0});
      break;
    }
    case ModelKind::xy: {
      XYParams p = config.xy;
      p.field = field;
      const XYSolution sol = solve_order_parameter(p, m0, config.solver);
      if (!sol.converged) throw NumericalError("self-consistency did not converge");
      eq.order = sol.m_star;
      const GridDistribution& g = sol.distribution;
      std::vector<double> masses(g.nodes.size());
      std::vector<double> values(g.nodes.size());
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        masses[i] = g.node_weights[i] * g.density[i];
        values[i] = p.magnitude * std::cos(g.nodes[i]);
      }
      eq.demand = InverseCdfSampler(std::move(masses), std::move(values));
      break;
    }
    case ModelKind::joint: {
      JointParams p = config.joint;
      p.field = field;
      const JointSolution sol = solve_joint(p, m0, config.solver);
      if (!sol.converged) throw NumericalError("self-consistency did not converge");
      eq.order = sol.m_star;
      std::vector<double> masses;
      std::vector<double> values;
      for (int b = 0; b < 3; ++b) {
        const GridDistribution& g = sol.joint_density[b];
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
          masses.push_back(g.node_weights[i] * g.density[i]);
          values.push_back((b - 1) * g.nodes[i]);
        }
      }
      eq.demand = InverseCdfSampler(std::move(masses), std::move(values));
      break;
    }
  }
  return eq;
}

}  // namespace

std::vector<std::pair<int, double>> sample_investors(std::span<const GridDistribution, 3> branches,
                                                     std::size_t n, Rng& rng) {
  const JointSampler js = make_joint_sampler(branches);
  std::vector<std::pair<int, double>> out(n);
  for (auto& draw : out) {
    const auto k = static_cast<std::size_t>(js.sampler.draw(rng));
    draw = {js.sigma[k], js.y[k]};
  }
  return out;
}

void SimConfig::validate() const {
  if (steps < 1) throw std::domain_error("simulation needs T >= 1 steps");
  if (!(field.persistence >= 0.0 && field.persistence < 1.0)) {
    throw std::domain_error("field persistence rho must lie in [0, 1)");
  }
  if (!(field.innovation >= 0.0) || !std::isfinite(field.innovation)) {
    throw std::domain_error("field innovation scale s must be >= 0");
  }
  if (!std::isfinite(field.initial) || !std::isfinite(x0)) {
    throw std::domain_error("initial field and price must be finite");
  }
  if (!(std::abs(m0) <= 1.0)) throw std::domain_error("initial guess m0 must satisfy |m0| <= 1");
  solver.validate();
  switch (model) {
    case ModelKind::discrete: discrete.validate(); break;
    case ModelKind::xy: xy.validate(); break;
    case ModelKind::joint: joint.validate(); break;
  }
}

double SimConfig::market_depth() const {
  switch (model) {
    case ModelKind::discrete: return discrete.market_depth;
    case ModelKind::xy: return xy.market_depth;
    case ModelKind::joint: return joint.market_depth;
  }
  return 1.0;
}

int SimConfig::n_investors() const {
  switch (model) {
    case ModelKind::discrete: return discrete.n_investors;
    case ModelKind::xy: return xy.n_investors;
    case ModelKind::joint: return joint.n_investors;
  }
  return 1;
}

PriceSeries run_series(const SimConfig& config) {
  config.validate();
  SolverOptions solver = config.solver;
  solver.collect_roots = false;
  SimConfig cfg = config;
  cfg.solver = solver;

  Rng rng(cfg.seed);
  const double depth = cfg.market_depth();
  const std::size_t investors = static_cast<std::size_t>(cfg.n_investors());

  double h = cfg.field.initial;
  Equilibrium eq = solve_equilibrium(cfg, h, cfg.m0);

  PriceSeries series;
  series.t.reserve(cfg.steps);
  series.x.reserve(cfg.steps);
  series.dx.reserve(cfg.steps);
  series.demand.reserve(cfg.steps);
  series.field.reserve(cfg.steps);
  series.order.reserve(cfg.steps);

  double x = cfg.x0;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    double eps = rng.normal();
    if (cfg.antithetic) eps = -eps;
    h = cfg.field.persistence * h + cfg.field.innovation * eps;
    try {
      eq = solve_equilibrium(cfg, h, eq.order);
    } catch (const InfeasibleError&) {
      series.failed_steps.push_back(step);
    } catch (const NumericalError&) {
      series.failed_steps.push_back(step);
    }

    double demand = 0.0;
    for (std::size_t i = 0; i < investors; ++i) demand += eq.demand.draw(rng, cfg.antithetic);

    const double next = cfg.price_mode == PriceMode::relative ? x + demand / depth
                                                               : cfg.x0 + demand / depth;
    const double dx = cfg.price_mode == PriceMode::relative ? demand / depth : next - x;
    series.t.push_back(static_cast<std::int64_t>(step));
    series.x.push_back(x);
    series.dx.push_back(dx);
    series.demand.push_back(demand);
    series.field.push_back(h);
    series.order.push_back(eq.order);
    x = next;
  }
  series.final_price = x;
  return series;
}

std::vector<PriceSeries> run_ensemble(const SimConfig& config, std::size_t replicas, int threads) {
  config.validate();
  std::vector<PriceSeries> out(replicas);
  parallel_for(replicas, threads, [&](std::size_t k) {
    SimConfig c = config;
    c.seed = config.seed + k;
    out[k] = run_series(c);
  });
  return out;
}

void write_series_csv(std::ostream& out, const PriceSeries& series) {
  out << "t,x,dx,demand,field\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.t[i] << ',' << format_number(series.x[i]) << ',' << format_number(series.dx[i])
        << ',' << format_number(series.demand[i]) << ',' << format_number(series.field[i]) << '\n';
  }
}

}  // namespace nemlab
