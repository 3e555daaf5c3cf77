#include "nemlab/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nemlab {

void QParams::validate() const {
  if (!std::isfinite(q) || q <= 0.0) {
    std::ostringstream msg;
    msg << "entropic index q must be > 0, got " << q;
    throw std::domain_error(msg.str());
  }
  if (!std::isfinite(beta) || beta <= 0.0) {
    std::ostringstream msg;
    msg << "inverse temperature beta must be > 0, got " << beta;
    throw std::domain_error(msg.str());
  }
}

double q_exp(double q, double u) {
  if (!std::isfinite(q) || !std::isfinite(u)) {
    throw std::domain_error("q_exp: non-finite argument");
  }
  if (q <= 0.0) {
    throw std::domain_error("q_exp: q must be > 0");
  }
  if (is_classical(q)) {
    return std::exp(u);
  }
  const double one_minus_q = 1.0 - q;
  const double shift = one_minus_q * u;
  if (1.0 + shift <= 0.0) {
    return q < 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  // log1p keeps the q -> 1 limit accurate; pow(base, 1/(1-q)) would amplify
  // the rounding of base by 1/(1-q).
  return std::exp(std::log1p(shift) / one_minus_q);
}

double q_log(double q, double v) {
  if (!std::isfinite(q) || !std::isfinite(v)) {
    throw std::domain_error("q_log: non-finite argument");
  }
  if (v <= 0.0) {
    throw std::domain_error("q_log: argument must be > 0");
  }
  if (is_classical(q)) {
    return std::log(v);
  }
  const double one_minus_q = 1.0 - q;
  return std::expm1(one_minus_q * std::log(v)) / one_minus_q;
}

void require_probability_vector(std::span<const double> p, double tolerance) {
  if (p.empty()) {
    throw std::domain_error("probability vector is empty");
  }
  double total = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) {
      throw std::domain_error("probability vector has a negative or non-finite entry");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > tolerance) {
    std::ostringstream msg;
    msg << "probability vector sums to " << total << ", not 1";
    throw std::domain_error(msg.str());
  }
}

double tsallis_entropy(std::span<const double> p, double q) {
  if (!std::isfinite(q) || q <= 0.0) {
    throw std::domain_error("tsallis_entropy: q must be > 0");
  }
  require_probability_vector(p);
  if (is_classical(q)) {
    double s = 0.0;
    for (double x : p) {
      if (x > 0.0) s -= x * std::log(x);
    }
    return std::max(0.0, s);
  }
  double sum_pq = 0.0;
  for (double x : p) {
    if (x > 0.0) sum_pq += std::pow(x, q);
  }
  return std::max(0.0, (1.0 - sum_pq) / (q - 1.0));
}

std::vector<double> escort(std::span<const double> p, double q) {
  if (!std::isfinite(q) || q <= 0.0) {
    throw std::domain_error("escort: q must be > 0");
  }
  if (!p.empty() && std::all_of(p.begin(), p.end(), [](double x) { return x == 0.0; })) {
    throw std::domain_error("escort: all-zero input");
  }
  require_probability_vector(p);
  std::vector<double> out(p.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = p[i] > 0.0 ? std::pow(p[i], q) : 0.0;
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

double q_expectation(std::span<const double> values, std::span<const double> p, double q,
                     Averaging mode) {
  if (values.size() != p.size()) {
    throw std::domain_error("q_expectation: values and probabilities differ in length");
  }
  if (!std::isfinite(q) || q <= 0.0) {
    throw std::domain_error("q_expectation: q must be > 0");
  }
  require_probability_vector(p);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    const double w = std::pow(p[i], q);
    num += values[i] * w;
    den += w;
  }
  if (mode == Averaging::unnormalized) {
    return num;
  }
  if (den == 0.0) {
    throw std::domain_error("q_expectation: all-zero probability vector");
  }
  return num / den;
}

}  // namespace nemlab
