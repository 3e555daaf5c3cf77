#pragma once

#include <memory>
#include <vector>

namespace nemlab {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rule of the given order (>= 1). Rules are computed once by Newton
/// iteration on P_n and cached; the returned pointer stays valid for the
/// life of the process and the cache is safe to use from several threads.
std::shared_ptr<const GaussLegendreRule> gauss_legendre(int order);

/// Closed interval [lower, upper].
struct Interval {
  double lower = 0.0;
  double upper = 1.0;

  double width() const { return upper - lower; }
};

}  // namespace nemlab
