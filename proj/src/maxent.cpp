#include "nemlab/maxent.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "nemlab/errors.hpp"

namespace nemlab {
namespace {

constexpr int kSupportSamples = 256;

[[noreturn]] void throw_pole(const QParams& params, double x, double e) {
  std::ostringstream msg;
  msg << "q-exponential weight is infinite (q=" << params.q << ", beta=" << params.beta
      << ", E=" << e << " at x=" << x << ")";
  throw InfeasibleError(msg.str());
}

double checked_energy(const EnergyFn& energy, double x) {
  const double e = energy(x);
  if (!std::isfinite(e)) {
    std::ostringstream msg;
    msg << "energy is not finite at x=" << x;
    throw std::domain_error(msg.str());
  }
  return e;
}

double base_value(const QParams& params, double e) {
  return 1.0 + (1.0 - params.q) * (-params.beta * e);
}

// Boundary between a supported sample `inside` and a cut-off sample `outside`.
double locate_cutoff(const EnergyFn& energy, const QParams& params, double inside, double outside) {
  auto f = [&](double x) { return base_value(params, checked_energy(energy, x)); };
  double lo = std::min(inside, outside);
  double hi = std::max(inside, outside);
  double flo = f(lo);
  double fhi = f(hi);
  if (fhi == 0.0) return hi;
  if (flo == 0.0) return lo;
  boost::uintmax_t max_iter = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
  // Snap to the side that keeps the support closed around `inside`.
  return inside < outside ? a : b;
}

struct PieceSet {
  std::vector<Interval> pieces;
};

// Unnormalized integral of one branch at a fixed order. Fills nodes/weights
// and the raw weight values when `out` is given.
double integrate_branch(const EnergyFn& energy, const PieceSet& support, const QParams& params,
                        int order, GridDistribution* out) {
  auto rule = gauss_legendre(order);
  double total = 0.0;
  if (out) {
    out->nodes.clear();
    out->node_weights.clear();
    out->density.clear();
  }
  for (const Interval& piece : support.pieces) {
    const double mid = 0.5 * (piece.lower + piece.upper);
    const double half = 0.5 * piece.width();
    for (int i = 0; i < order; ++i) {
      const double x = mid + half * rule->nodes[i];
      const double w = half * rule->weights[i];
      const double e = checked_energy(energy, x);
      const double value = q_exp(params.q, -params.beta * e);
      if (!std::isfinite(value)) throw_pole(params, x, e);
      total += w * value;
      if (out) {
        out->nodes.push_back(x);
        out->node_weights.push_back(w);
        out->density.push_back(value);
      }
    }
  }
  return total;
}

}  // namespace

double GridDistribution::integrate(const std::function<double(double)>& f) const {
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    total += node_weights[i] * density[i] * f(nodes[i]);
  }
  return total;
}

double GridDistribution::mass() const {
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) total += node_weights[i] * density[i];
  return total;
}

void QuadratureSpec::validate() const {
  if (initial_order < 8) {
    throw std::domain_error("quadrature order must be >= 8");
  }
  if (max_order < initial_order) {
    throw std::domain_error("quadrature max_order must be >= initial_order");
  }
  if (!(rel_tol > 0.0)) {
    throw std::domain_error("quadrature rel_tol must be > 0");
  }
}

DiscreteDistribution build_discrete(std::span<const double> energies, const QParams& params) {
  std::vector<std::int64_t> states(energies.size());
  std::iota(states.begin(), states.end(), std::int64_t{0});
  return build_discrete(std::move(states), energies, params);
}

DiscreteDistribution build_discrete(std::vector<std::int64_t> states,
                                    std::span<const double> energies, const QParams& params) {
  params.validate();
  if (energies.empty()) {
    throw std::domain_error("build_discrete: at least one state is required");
  }
  if (states.size() != energies.size()) {
    throw std::domain_error("build_discrete: states and energies differ in length");
  }
  DiscreteDistribution dist;
  dist.states = std::move(states);
  dist.energies.assign(energies.begin(), energies.end());
  dist.weights.resize(energies.size());
  double z = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    const double e = energies[i];
    if (!std::isfinite(e)) {
      throw std::domain_error("build_discrete: energies must be finite");
    }
    const double w = q_exp(params.q, -params.beta * e);
    if (!std::isfinite(w)) throw_pole(params, static_cast<double>(dist.states[i]), e);
    dist.weights[i] = w;
    z += w;
  }
  if (z <= 0.0) {
    std::ostringstream msg;
    msg << "every state is cut off (q=" << params.q << ", beta=" << params.beta << ", E=[";
    for (std::size_t i = 0; i < energies.size(); ++i) msg << (i ? ", " : "") << energies[i];
    msg << "])";
    throw InfeasibleError(msg.str());
  }
  dist.z_q = z;
  dist.probs.resize(energies.size());
  for (std::size_t i = 0; i < energies.size(); ++i) dist.probs[i] = dist.weights[i] / z;
  return dist;
}

std::vector<Interval> support_pieces(const EnergyFn& energy, Interval interval,
                                     const QParams& params) {
  if (!(interval.upper > interval.lower)) {
    throw std::domain_error("interval upper bound must exceed lower bound");
  }
  if (is_classical(params.q)) return {interval};

  std::vector<double> xs(kSupportSamples + 1);
  std::vector<double> base(kSupportSamples + 1);
  for (int i = 0; i <= kSupportSamples; ++i) {
    xs[i] = i == kSupportSamples
                ? interval.upper
                : interval.lower + interval.width() * i / static_cast<double>(kSupportSamples);
    const double e = checked_energy(energy, xs[i]);
    base[i] = base_value(params, e);
    if (params.q > 1.0 && base[i] <= 0.0) throw_pole(params, xs[i], e);
  }
  if (params.q > 1.0) return {interval};

  std::vector<Interval> pieces;
  int i = 0;
  while (i <= kSupportSamples) {
    if (base[i] <= 0.0) {
      ++i;
      continue;
    }
    const int start = i;
    while (i <= kSupportSamples && base[i] > 0.0) ++i;
    const int stop = i - 1;
    Interval piece;
    piece.lower = start == 0 ? interval.lower : locate_cutoff(energy, params, xs[start], xs[start - 1]);
    piece.upper = stop == kSupportSamples ? interval.upper
                                          : locate_cutoff(energy, params, xs[stop], xs[stop + 1]);
    if (piece.upper > piece.lower) pieces.push_back(piece);
  }
  return pieces;
}

std::vector<GridDistribution> build_joint_grid(std::span<const EnergyFn> branches,
                                               Interval interval, const QParams& params,
                                               const QuadratureSpec& quad) {
  params.validate();
  quad.validate();
  if (branches.empty()) {
    throw std::domain_error("build_joint_grid: at least one branch is required");
  }
  std::vector<PieceSet> supports;
  supports.reserve(branches.size());
  for (const EnergyFn& energy : branches) {
    supports.push_back({support_pieces(energy, interval, params)});
  }

  auto total_at = [&](int order) {
    double z = 0.0;
    for (std::size_t b = 0; b < branches.size(); ++b) {
      z += integrate_branch(branches[b], supports[b], params, order, nullptr);
    }
    return z;
  };

  int order = quad.initial_order;
  double z_coarse = total_at(order);
  for (;;) {
    const int fine = 2 * order;
    if (fine > quad.max_order) {
      std::ostringstream msg;
      msg << "quadrature did not converge by order " << quad.max_order << " (q=" << params.q
          << ", beta=" << params.beta << ")";
      throw NumericalError(msg.str());
    }
    const double z_fine = total_at(fine);
    if (!std::isfinite(z_fine)) {
      throw InfeasibleError("partition integral is not finite");
    }
    if (std::abs(z_fine - z_coarse) <= quad.rel_tol * std::abs(z_fine)) {
      order = fine;
      break;
    }
    order = fine;
    z_coarse = z_fine;
  }

  std::vector<GridDistribution> out(branches.size());
  double z = 0.0;
  for (std::size_t b = 0; b < branches.size(); ++b) {
    z += integrate_branch(branches[b], supports[b], params, order, &out[b]);
  }
  if (!(z > 0.0)) {
    std::ostringstream msg;
    msg << "every state is cut off (q=" << params.q << ", beta=" << params.beta
        << ") on [" << interval.lower << ", " << interval.upper << "]";
    throw InfeasibleError(msg.str());
  }
  for (GridDistribution& g : out) {
    for (double& d : g.density) d /= z;
    g.z_q = z;
    g.order = order;
  }
  return out;
}

GridDistribution build_grid(const EnergyFn& energy, Interval interval, const QParams& params,
                            const QuadratureSpec& quad) {
  const EnergyFn branches[] = {energy};
  auto out = build_joint_grid(branches, interval, params, quad);
  return std::move(out.front());
}

}  // namespace nemlab
