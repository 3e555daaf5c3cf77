#include "nemlab/fixed_point.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nemlab {
namespace {

constexpr double kPolishBracket = 1e-6;
constexpr double kDistinctRoots = 1e-6;

double refine(const OrderMap& map, double lo, double hi, double glo, double ghi) {
  auto g = [&](double m) { return map(m) - m; };
  boost::uintmax_t max_iter = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(52);
  auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tol, max_iter);
  const double ga = std::abs(g(a));
  const double gb = std::abs(g(b));
  return ga <= gb ? a : b;
}

std::vector<double> sample_points(double lower, double upper) {
  std::vector<double> pts;
  constexpr int kLinear = 256;
  for (int i = 0; i <= kLinear; ++i) {
    pts.push_back(lower + (upper - lower) * i / static_cast<double>(kLinear));
  }
  // Geometric points resolve roots emerging from m = 0 near a critical coupling.
  if (lower <= 0.0 && upper >= 0.0) {
    for (int k = -10; k <= -2; ++k) {
      for (double mantissa : {1.0, 3.0}) {
        const double v = mantissa * std::pow(10.0, k);
        if (v < upper) pts.push_back(v);
        if (-v > lower) pts.push_back(-v);
      }
    }
    pts.push_back(0.0);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw std::domain_error("solver damping must lie in (0, 1]");
  }
  if (!(tolerance > 0.0)) {
    throw std::domain_error("solver tolerance must be > 0");
  }
  if (max_iterations < 1) {
    throw std::domain_error("solver max_iterations must be >= 1");
  }
}

std::vector<double> enumerate_roots(const OrderMap& map, double lower, double upper) {
  const std::vector<double> pts = sample_points(lower, upper);
  std::vector<double> g(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) g[i] = map(pts[i]) - pts[i];

  std::vector<double> roots;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (g[i] == 0.0) {
      roots.push_back(pts[i]);
    } else if (i + 1 < pts.size() && g[i + 1] != 0.0 && (g[i] < 0.0) != (g[i + 1] < 0.0)) {
      roots.push_back(refine(map, pts[i], pts[i + 1], g[i], g[i + 1]));
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              roots.end());
  return roots;
}

double largest_nonnegative_root(const OrderMap& map) {
  auto upper = enumerate_roots(map, 0.0, 1.0);
  if (!upper.empty()) return upper.back();
  auto lower = enumerate_roots(map, -1.0, 0.0);
  if (!lower.empty()) return lower.back();
  return std::numeric_limits<double>::quiet_NaN();
}

FixedPointResult solve_fixed_point(const OrderMap& map, double m0, const SolverOptions& options) {
  options.validate();
  if (!(std::abs(m0) <= 1.0)) {
    throw std::domain_error("initial guess m0 must satisfy |m0| <= 1");
  }
  FixedPointResult result;
  double m = m0;
  for (int k = 1; k <= options.max_iterations; ++k) {
    const double next = (1.0 - options.damping) * m + options.damping * map(m);
    result.iterations = k;
    if (!std::isfinite(next)) {
      throw std::domain_error("order-parameter map returned a non-finite value");
    }
    const bool done = std::abs(next - m) < options.tolerance;
    m = next;
    if (done) {
      result.converged = true;
      break;
    }
  }

  if (result.converged) {
    const double lo = std::max(-1.0, m - kPolishBracket);
    const double hi = std::min(1.0, m + kPolishBracket);
    const double glo = map(lo) - lo;
    const double ghi = map(hi) - hi;
    if (glo != 0.0 && ghi != 0.0 && (glo < 0.0) != (ghi < 0.0)) {
      const double polished = refine(map, lo, hi, glo, ghi);
      if (std::abs(map(polished) - polished) <= std::abs(map(m) - m)) m = polished;
    }
  } else {
    std::vector<double> candidates = enumerate_roots(map, 0.0, 1.0);
    for (double r : enumerate_roots(map, -1.0, 0.0)) candidates.push_back(r);
    if (!candidates.empty()) {
      double best = candidates.front();
      for (double r : candidates) {
        if (std::abs(r - m) < std::abs(best - m)) best = r;
      }
      m = best;
      result.converged = true;
      result.used_fallback = true;
    }
  }
  result.root = m;
  result.residual = std::abs(map(m) - m);
  return result;
}

std::vector<double> distinct_roots(const OrderMap& map, const SolverOptions& options) {
  std::vector<double> roots;
  for (double start : {-0.99, 0.0, 0.99}) {
    const FixedPointResult r = solve_fixed_point(map, start, options);
    if (!r.converged) continue;
    const bool seen = std::any_of(roots.begin(), roots.end(), [&](double x) {
      return std::abs(x - r.root) <= kDistinctRoots;
    });
    if (!seen) roots.push_back(r.root);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

Onset locate_onset(const std::vector<ScanPoint>& scan, double threshold) {
  Onset onset;
  const ScanPoint* previous = nullptr;
  for (const ScanPoint& point : scan) {
    if (!point.ok) continue;
    if (std::abs(point.m_plus) > threshold) {
      if (!previous) return onset;  // ordered already at the first grid point
      onset.found = true;
      onset.lower = previous->coupling;
      onset.upper = point.coupling;
      onset.estimate = 0.5 * (onset.lower + onset.upper);
      return onset;
    }
    previous = &point;
  }
  return onset;
}

}  // namespace nemlab
