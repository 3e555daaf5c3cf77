#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nemlab/qmath.hpp"
#include "nemlab/quadrature.hpp"

namespace nemlab {

/// Least-biased q-distribution over a finite set of labelled states.
///
/// probs[i] == weights[i] / z_q, with weights[i] = exp_q(-beta * energies[i]).
/// z_q is the sum of the unnormalized weights, not of the probabilities.
struct DiscreteDistribution {
  std::vector<std::int64_t> states;
  std::vector<double> energies;
  std::vector<double> weights;
  std::vector<double> probs;
  double z_q = 0.0;

  std::size_t size() const { return probs.size(); }
};

/// Least-biased q-density sampled at quadrature nodes.
///
/// Integrals are sum_i node_weights[i] * density[i] * f(nodes[i]). For a
/// joint (multi-branch) construction z_q is the shared normalization and each
/// branch carries only its own share of the mass.
struct GridDistribution {
  std::vector<double> nodes;
  std::vector<double> node_weights;
  std::vector<double> density;
  double z_q = 0.0;
  int order = 0;  // accepted Gauss-Legendre order per support piece

  double integrate(const std::function<double(double)>& f) const;
  double mass() const;
};

/// Gauss-Legendre order doubling: accept order 2n once z_q(2n) agrees with
/// z_q(n) to rel_tol.
struct QuadratureSpec {
  int initial_order = 16;
  int max_order = 2048;
  double rel_tol = 1e-8;

  void validate() const;
};

using EnergyFn = std::function<double(double)>;

DiscreteDistribution build_discrete(std::span<const double> energies, const QParams& params);
DiscreteDistribution build_discrete(std::vector<std::int64_t> states,
                                    std::span<const double> energies, const QParams& params);

GridDistribution build_grid(const EnergyFn& energy, Interval interval, const QParams& params,
                            const QuadratureSpec& quad = {});

/// One GridDistribution per branch, all normalized by the same z_q so that
/// the branch masses add up to one.
std::vector<GridDistribution> build_joint_grid(std::span<const EnergyFn> branches,
                                               Interval interval, const QParams& params,
                                               const QuadratureSpec& quad = {});

/// Subintervals of `interval` where the q-exponential weight is nonzero.
/// Only q < 1 can cut off; q > 1 with a pole inside the interval throws
/// InfeasibleError.
std::vector<Interval> support_pieces(const EnergyFn& energy, Interval interval,
                                     const QParams& params);

}  // namespace nemlab
