#include "nemlab/rng.hpp"

#include <cmath>

namespace nemlab {

double Rng::symmetric_uniform() {
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    if (u != -1.0) return u;
  }
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = symmetric_uniform();
    v = symmetric_uniform();
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

double Rng::student_t(double nu) {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  do {
    u = symmetric_uniform();
    v = symmetric_uniform();
    w = u * u + v * v;
  } while (w >= 1.0 || w == 0.0);
  return u * std::sqrt(nu * (std::pow(w, -2.0 / nu) - 1.0) / w);
}

}  // namespace nemlab
