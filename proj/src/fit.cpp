#include "nemlab/fit.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nemlab/qmath.hpp"

namespace nemlab {
namespace {

void require_qgaussian_params(double q, double beta) {
  if (!(q >= 1.0 && q < 3.0)) {
    throw std::domain_error("q-Gaussian needs 1 <= q < 3");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::domain_error("q-Gaussian needs beta > 0");
  }
}

double median_of_sorted(std::span<const double> sorted) {
  const std::size_t n = sorted.size();
  return n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

struct Simplex {
  std::array<std::array<double, 3>, 4> x;
  std::array<double, 4> f;
};

// Nelder-Mead minimization of a 3-parameter objective. Returns the number of
// evaluations used; `converged` reports whether the spread of objective values
// fell below tol before the cap.
int nelder_mead(const std::function<double(const std::array<double, 3>&)>& objective,
                std::array<double, 3>& best, const std::array<double, 3>& steps, double tol,
                int max_evals, bool& converged) {
  Simplex s;
  int evals = 0;
  auto eval = [&](const std::array<double, 3>& p) {
    ++evals;
    return objective(p);
  };
  s.x[0] = best;
  s.f[0] = eval(best);
  for (int i = 0; i < 3; ++i) {
    s.x[i + 1] = best;
    s.x[i + 1][i] += steps[i];
    s.f[i + 1] = eval(s.x[i + 1]);
  }
  converged = false;
  while (evals < max_evals) {
    std::array<int, 4> order = {0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return s.f[a] < s.f[b]; });
    Simplex sorted;
    for (int i = 0; i < 4; ++i) {
      sorted.x[i] = s.x[order[i]];
      sorted.f[i] = s.f[order[i]];
    }
    s = sorted;
    if (std::abs(s.f[3] - s.f[0]) <= tol) {
      converged = true;
      break;
    }
    std::array<double, 3> centroid{};
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) centroid[k] += s.x[i][k] / 3.0;
    }
    auto along = [&](double t) {
      std::array<double, 3> p;
      for (int k = 0; k < 3; ++k) p[k] = centroid[k] + t * (s.x[3][k] - centroid[k]);
      return p;
    };
    const auto reflected = along(-1.0);
    const double fr = eval(reflected);
    if (fr < s.f[0]) {
      const auto expanded = along(-2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        s.x[3] = expanded;
        s.f[3] = fe;
      } else {
        s.x[3] = reflected;
        s.f[3] = fr;
      }
    } else if (fr < s.f[2]) {
      s.x[3] = reflected;
      s.f[3] = fr;
    } else {
      const bool outside = fr < s.f[3];
      const auto contracted = along(outside ? -0.5 : 0.5);
      const double fc = eval(contracted);
      if (fc < (outside ? fr : s.f[3])) {
        s.x[3] = contracted;
        s.f[3] = fc;
      } else {
        for (int i = 1; i < 4; ++i) {
          for (int k = 0; k < 3; ++k) s.x[i][k] = s.x[0][k] + 0.5 * (s.x[i][k] - s.x[0][k]);
          s.f[i] = eval(s.x[i]);
        }
      }
    }
  }
  int arg = 0;
  for (int i = 1; i < 4; ++i) {
    if (s.f[i] < s.f[arg]) arg = i;
  }
  best = s.x[arg];
  return evals;
}

}  // namespace

double qgaussian_log_norm(double q, double beta) {
  require_qgaussian_params(q, beta);
  if (is_classical(q)) return 0.5 * std::log(std::numbers::pi / beta);
  const double a = 1.0 / (q - 1.0);
  // Gamma(a - 1/2) / Gamma(a) without cancellation as a grows.
  const double ratio = boost::math::tgamma_delta_ratio(a - 0.5, 0.5);
  return 0.5 * std::log(std::numbers::pi / (beta * (q - 1.0))) + std::log(ratio);
}

double qgaussian_pdf(double x, double q, double beta, double loc) {
  require_qgaussian_params(q, beta);
  if (std::isnan(x)) throw std::domain_error("q-Gaussian density at NaN");
  if (std::isinf(x)) return 0.0;
  const double r2 = (x - loc) * (x - loc);
  const double log_kernel =
      is_classical(q) ? -beta * r2 : -std::log1p((q - 1.0) * beta * r2) / (q - 1.0);
  return std::exp(log_kernel - qgaussian_log_norm(q, beta));
}

double qgaussian_cdf(double x, double q, double beta, double loc) {
  require_qgaussian_params(q, beta);
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  if (is_classical(q)) return 0.5 * std::erfc(-(x - loc) * std::sqrt(beta));
  const double nu = (3.0 - q) / (q - 1.0);
  const double t = (x - loc) * std::sqrt(beta * (3.0 - q));
  return boost::math::cdf(boost::math::students_t_distribution<double>(nu), t);
}

double qgaussian_loglik(std::span<const double> samples, double q, double beta, double loc) {
  require_qgaussian_params(q, beta);
  long double kernel = 0.0L;
  if (is_classical(q)) {
    for (double x : samples) kernel += beta * (x - loc) * (x - loc);
  } else {
    const double scale = (q - 1.0) * beta;
    for (double x : samples) kernel += std::log1p(scale * (x - loc) * (x - loc));
    kernel /= (q - 1.0);
  }
  return static_cast<double>(-static_cast<long double>(samples.size()) *
                                 qgaussian_log_norm(q, beta) -
                             kernel);
}

FitResult fit_qgaussian(std::span<const double> samples, const FitOptions& options) {
  if (samples.size() < 100) {
    throw std::domain_error("fit requires n >= 100 samples, got " + std::to_string(samples.size()));
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double x : sorted) {
    if (!std::isfinite(x)) throw std::domain_error("fit samples must be finite");
  }
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    throw std::domain_error("fit input is degenerate (zero variance)");
  }

  const double center = median_of_sorted(sorted);
  std::vector<double> dev(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) dev[i] = std::abs(sorted[i] - center);
  std::sort(dev.begin(), dev.end());
  double spread = 1.4826 * median_of_sorted(dev);
  if (!(spread > 0.0)) {
    long double m = 0.0L;
    long double m2 = 0.0L;
    for (double x : sorted) m += x;
    m /= sorted.size();
    for (double x : sorted) m2 += (x - m) * (x - m);
    spread = std::sqrt(static_cast<double>(m2 / sorted.size()));
  }
  const double beta0 = 1.0 / (2.0 * spread * spread);

  auto clamp_q = [&](double q) { return std::clamp(q, options.q_min, options.q_max); };
  auto neg_loglik = [&](const std::array<double, 3>& p) {
    const double ll = qgaussian_loglik(sorted, clamp_q(p[0]), std::exp(p[1]), p[2]);
    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
  };

  std::array<double, 3> best = {options.q_min, std::log(beta0), center};
  double best_f = neg_loglik(best);
  for (int i = 0; i < options.q_grid; ++i) {
    const double q = options.q_min + (options.q_max - options.q_min) * i /
                                         std::max(1, options.q_grid - 1);
    for (int j = 0; j < options.beta_grid; ++j) {
      const double log_beta =
          std::log(beta0) + std::log(10.0) * (-2.0 + 4.0 * j / std::max(1, options.beta_grid - 1));
      const std::array<double, 3> p = {q, log_beta, center};
      const double f = neg_loglik(p);
      if (f < best_f) {
        best_f = f;
        best = p;
      }
    }
  }

  FitResult result;
  result.n = sorted.size();
  int budget = options.max_evaluations;
  bool converged = false;
  // A restart from the first optimum guards against a collapsed simplex.
  for (int pass = 0; pass < 2 && budget > 0; ++pass) {
    const std::array<double, 3> steps = {0.05, 0.2, 0.1 * spread};
    budget -= nelder_mead(neg_loglik, best, steps, options.tolerance, budget, converged);
  }
  result.converged = converged;
  result.q_hat = clamp_q(best[0]);
  result.beta_hat = std::exp(best[1]);
  result.loc = best[2];
  if (result.q_hat <= options.q_min + 1e-9 && options.q_min <= 1.0) {
    result.q_hat = 1.0;
    result.clamped = true;
  }
  result.loglik = qgaussian_loglik(sorted, result.q_hat, result.beta_hat, result.loc);
  result.ks_stat = ks_statistic(sorted, [&](double x) {
    return qgaussian_cdf(x, result.q_hat, result.beta_hat, result.loc);
  });
  return result;
}

std::vector<double> sample_qgaussian(std::size_t n, double q, double beta, double loc, Rng& rng) {
  require_qgaussian_params(q, beta);
  std::vector<double> out(n);
  if (is_classical(q)) {
    const double sd = std::sqrt(1.0 / (2.0 * beta));
    for (double& x : out) x = loc + sd * rng.normal();
    return out;
  }
  const double nu = (3.0 - q) / (q - 1.0);
  const double scale = 1.0 / std::sqrt(beta * (3.0 - q));
  for (double& x : out) x = loc + scale * rng.student_t(nu);
  return out;
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::domain_error("KS statistic of an empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  if (!std::is_sorted(sorted.begin(), sorted.end())) std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

Histogram histogram(std::span<const double> samples, std::size_t bins) {
  if (samples.empty()) throw std::domain_error("histogram of an empty sample");
  if (bins < 2) throw std::domain_error("histogram needs at least 2 bins");
  auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) edges[i] = lo + (hi - lo) * i / static_cast<double>(bins);
  edges.back() = hi;
  return histogram(samples, edges);
}

Histogram histogram(std::span<const double> samples, std::span<const double> edges) {
  if (samples.empty()) throw std::domain_error("histogram of an empty sample");
  if (edges.size() < 3) throw std::domain_error("histogram needs at least 2 bins");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw std::domain_error("histogram edges must increase");
  }
  const std::size_t bins = edges.size() - 1;
  std::vector<double> counts(bins, 0.0);
  double inside = 0.0;
  for (double x : samples) {
    if (!(x >= edges.front() && x <= edges.back())) continue;
    auto it = std::upper_bound(edges.begin(), edges.end(), x);
    std::size_t bin = static_cast<std::size_t>(it - edges.begin()) - 1;
    if (bin >= bins) bin = bins - 1;
    counts[bin] += 1.0;
    inside += 1.0;
  }
  if (inside == 0.0) throw std::domain_error("no samples fall inside the histogram edges");
  Histogram h;
  h.edges.assign(edges.begin(), edges.end());
  h.densities.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    h.densities[i] = counts[i] / (inside * (edges[i + 1] - edges[i]));
  }
  return h;
}

double excess_kurtosis(std::span<const double> samples) {
  if (samples.size() < 2) throw std::domain_error("kurtosis needs at least 2 samples");
  long double mean = 0.0L;
  for (double x : samples) mean += x;
  mean /= samples.size();
  long double m2 = 0.0L;
  long double m4 = 0.0L;
  for (double x : samples) {
    const long double d = x - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= samples.size();
  m4 /= samples.size();
  if (m2 == 0.0L) throw std::domain_error("kurtosis of a constant sample");
  return static_cast<double>(m4 / (m2 * m2) - 3.0L);
}

}  // namespace nemlab
