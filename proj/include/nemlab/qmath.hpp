#pragma once

#include <span>
#include <vector>

namespace nemlab {

/// Below this distance from 1 the entropic index is treated as exactly 1.
inline constexpr double kClassicalThreshold = 1e-12;

/// Entropic index and inverse temperature shared by every model.
struct QParams {
  double q = 1.0;
  double beta = 1.0;

  /// Throws std::domain_error unless q > 0 and beta > 0 (both finite).
  void validate() const;
};

inline bool is_classical(double q) {
  return q - 1.0 < kClassicalThreshold && 1.0 - q < kClassicalThreshold;
}

/// How q-averages are normalized.
enum class Averaging {
  escort,        // sum A p^q / sum p^q
  unnormalized,  // sum A p^q
};

/// q-exponential [1 + (1-q) u]_+^{1/(1-q)}; e^u when q is classical.
///
/// For q < 1 the Tsallis cutoff returns exactly 0 once 1 + (1-q) u <= 0.
/// For q > 1 the same condition is the pole side of the function and the
/// result is +infinity; callers treat that as an infeasible state.
double q_exp(double q, double u);

/// q-logarithm (v^{1-q} - 1)/(1-q), the inverse of q_exp away from the cutoff.
double q_log(double q, double v);

/// S_q = (1 - sum p^q)/(q - 1), Shannon entropy at q = 1.
double tsallis_entropy(std::span<const double> p, double q);

/// Escort distribution p^q / sum p^q.
std::vector<double> escort(std::span<const double> p, double q);

/// q-average of `values` under p. Escort averages stay inside
/// [min(values), max(values)].
double q_expectation(std::span<const double> values, std::span<const double> p, double q,
                     Averaging mode = Averaging::escort);

/// Throws std::domain_error unless p is nonnegative, finite and sums to 1
/// within `tolerance`.
void require_probability_vector(std::span<const double> p, double tolerance = 1e-9);

}  // namespace nemlab
