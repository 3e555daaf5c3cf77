#pragma once

#include <cstdint>
#include <random>

namespace nemlab {

/// Seedable 64-bit generator with portable variate conversions.
///
/// The engine is std::mt19937_64, whose output stream the C++ standard fixes
/// bit for bit. The standard distributions are implementation-defined, so the
/// conversions below are written out: 53-bit uniforms, Marsaglia's polar
/// normal and Bailey's polar Student-t.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (-1, 1).
  double symmetric_uniform();

  double normal();

  /// Student-t with nu > 0 degrees of freedom.
  double student_t(double nu);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace nemlab
