#pragma once

#include <functional>
#include <string>
#include <vector>

namespace nemlab {

/// Damped iteration m <- (1 - damping) m + damping F(m).
struct SolverOptions {
  double damping = 0.5;
  double tolerance = 1e-12;
  int max_iterations = 10000;
  /// Also solve from m0 in {-0.99, 0, +0.99} and report every distinct root.
  bool collect_roots = false;

  void validate() const;
};

struct FixedPointResult {
  double root = 0.0;
  double residual = 0.0;  // |F(root) - root|
  int iterations = 0;
  bool converged = false;
  bool used_fallback = false;
};

using OrderMap = std::function<double(double)>;

/// Fixed point of `map` on [-1, 1] reached from m0. Converged iterates are
/// polished on a +-1e-6 bracket. When the damped iteration stalls the roots
/// on [0, 1] and [-1, 0] are enumerated and the one closest to the last
/// iterate is returned.
FixedPointResult solve_fixed_point(const OrderMap& map, double m0, const SolverOptions& options);

/// Every root of map(m) - m on [lower, upper] visible as a sign change (or an
/// exact zero) on a sampling grid that is log-spaced near m = 0.
std::vector<double> enumerate_roots(const OrderMap& map, double lower, double upper);

/// Largest root in [0, 1]; when none exists there, the largest root in [-1, 0].
double largest_nonnegative_root(const OrderMap& map);

/// Roots reached from m0 in {-0.99, 0, +0.99}, deduplicated at 1e-6.
std::vector<double> distinct_roots(const OrderMap& map, const SolverOptions& options);

/// One point of a coupling scan.
struct ScanPoint {
  double coupling = 0.0;  // beta * J
  double m_plus = 0.0;
  bool ok = true;         // false when the point raised a solver error
  std::string error;
};

struct Onset {
  bool found = false;
  double lower = 0.0;     // last grid point with m_plus <= threshold
  double upper = 0.0;     // first grid point with m_plus > threshold
  double estimate = 0.0;  // midpoint of the bracket
};

/// First grid point where the order parameter exceeds `threshold`, bracketed
/// by its predecessor. Failed points are skipped.
Onset locate_onset(const std::vector<ScanPoint>& scan, double threshold = 1e-6);

}  // namespace nemlab
