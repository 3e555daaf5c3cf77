#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "nemlab/continuous_market.hpp"
#include "nemlab/fixed_point.hpp"
#include "nemlab/maxent.hpp"
#include "nemlab/rng.hpp"
#include "nemlab/spin_market.hpp"
#include "nemlab/xy_market.hpp"

namespace nemlab {

enum class ModelKind { discrete, xy, joint };

/// AR(1) external field h_t = persistence * h_{t-1} + innovation * eps_t.
struct FieldProcess {
  double persistence = 0.0;
  double innovation = 0.0;
  double initial = 0.0;
};

enum class PriceMode {
  relative,  // x_{t+1} = x_t + d_t / lambda
  level,     // x_{t+1} = x0 + d_t / lambda
};

struct SimConfig {
  ModelKind model = ModelKind::discrete;
  ModelParams discrete;
  XYParams xy;
  JointParams joint;
  std::size_t steps = 1000;
  std::uint64_t seed = 0;
  FieldProcess field;
  double x0 = 0.0;
  double m0 = 0.5;  // start of the first self-consistent solve
  PriceMode price_mode = PriceMode::relative;
  bool antithetic = false;  // 1-u for sampling, -eps for field innovations
  SolverOptions solver;

  void validate() const;
  double market_depth() const;
  int n_investors() const;
};

/// Row t holds the pre-step price x_t and the step's change, so that
/// x[t+1] == x[t] + dx[t]; final_price is the price after the last step.
struct PriceSeries {
  std::vector<std::int64_t> t;
  std::vector<double> x;
  std::vector<double> dx;
  std::vector<double> demand;
  std::vector<double> field;
  std::vector<double> order;  // self-consistent order parameter used at t
  double final_price = 0.0;
  std::vector<std::size_t> failed_steps;  // steps that reused the previous equilibrium

  std::size_t size() const { return t.size(); }
};

/// Inverse-CDF sampler over a finite set of values.
class InverseCdfSampler {
 public:
  InverseCdfSampler() = default;
  InverseCdfSampler(std::vector<double> masses, std::vector<double> values);

  /// Value for a uniform u in [0, 1].
  double value_at(double u) const;
  std::size_t index_at(double u) const;
  double draw(Rng& rng, bool antithetic = false) const;

  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> cdf_;
  std::vector<double> values_;
  std::size_t last_positive_ = 0;
};

/// n investors drawn from a discrete distribution; returns state labels.
std::vector<std::int64_t> sample_investors(const DiscreteDistribution& dist, std::size_t n,
                                           Rng& rng);

/// n angles (or magnitudes) drawn from the quadrature measure of a grid.
std::vector<double> sample_investors(const GridDistribution& grid, std::size_t n, Rng& rng);

/// n (sigma, y) pairs drawn from the three jointly normalized branches
/// (sigma = -1, 0, +1 in order).
std::vector<std::pair<int, double>> sample_investors(std::span<const GridDistribution, 3> branches,
                                                     std::size_t n, Rng& rng);

PriceSeries run_series(const SimConfig& config);

/// Replica k runs with seed config.seed + k.
std::vector<PriceSeries> run_ensemble(const SimConfig& config, std::size_t replicas,
                                      int threads = 1);

/// CSV with header t,x,dx,demand,field, shortest round-trip numbers.
void write_series_csv(std::ostream& out, const PriceSeries& series);

}  // namespace nemlab
