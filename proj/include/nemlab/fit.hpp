#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nemlab/rng.hpp"

namespace nemlab {

/// Maximum-likelihood q-Gaussian fit.
struct FitResult {
  double q_hat = 1.0;
  double beta_hat = 0.0;
  double loc = 0.0;
  double loglik = 0.0;
  double ks_stat = 0.0;
  std::size_t n = 0;
  bool clamped = false;    // q_hat pinned at the Gaussian boundary q = 1
  bool converged = false;  // simplex met its tolerance within the evaluation cap
};

struct FitOptions {
  double q_min = 1.0;
  double q_max = 2.9;
  int q_grid = 20;
  int beta_grid = 17;
  double tolerance = 1e-8;  // on the log-likelihood
  int max_evaluations = 4000;
};

/// Normalization C of exp_q(-beta x^2): sqrt(pi/beta) at q = 1, otherwise
/// sqrt(pi / (beta (q-1))) Gamma((3-q)/(2(q-1))) / Gamma(1/(q-1)).
double qgaussian_log_norm(double q, double beta);

/// exp_q(-beta (x - loc)^2) / C for 1 <= q < 3.
double qgaussian_pdf(double x, double q, double beta, double loc);

/// CDF through the Student-t identity: nu = (3-q)/(q-1) and
/// t = (x - loc) sqrt(beta (3 - q)).
double qgaussian_cdf(double x, double q, double beta, double loc);

double qgaussian_loglik(std::span<const double> samples, double q, double beta, double loc);

/// Grid over (q, beta) followed by Nelder-Mead in (q, log beta, loc).
/// Samples are sorted first, so the result does not depend on their order.
FitResult fit_qgaussian(std::span<const double> samples, const FitOptions& options = {});

/// Student-t draws rescaled to a q-Gaussian; Gaussian draws at q = 1.
std::vector<double> sample_qgaussian(std::size_t n, double q, double beta, double loc, Rng& rng);

/// Kolmogorov-Smirnov distance between the empirical CDF and `cdf`.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

struct Histogram {
  std::vector<double> edges;
  std::vector<double> densities;
};

/// Equal-width bins over [min, max]; the last bin is closed on the right.
Histogram histogram(std::span<const double> samples, std::size_t bins);

/// Explicit ascending edges; samples outside them are ignored.
Histogram histogram(std::span<const double> samples, std::span<const double> edges);

double excess_kurtosis(std::span<const double> samples);

}  // namespace nemlab
