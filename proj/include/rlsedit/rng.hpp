#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "rlsedit/matrix.hpp"

namespace rlsedit {

/// splitmix64; the project-wide seed expander and uniform source.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t state_;
};

/// Seeded normal sampler: splitmix64 uniforms through the Box-Muller
/// transform. Draw order is part of the generator contract: each pair of
/// uniforms yields (cos, sin) variates, the cosine one first.
class NormalRng {
public:
  explicit NormalRng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in (0, 1]; never zero, so the log below is always finite.
  double uniform01() {
    return (static_cast<double>(gen_.next() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double stddev) { return stddev * normal(); }

  /// Fills row-major, one draw per entry.
  void fill_normal(Matrix& m, double stddev = 1.0) {
    for (double& v : m.data()) v = normal(stddev);
  }

  /// Uniform index in [0, n). Fixed-point multiply; bias is < n / 2^64.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(gen_.next()) * n) >> 64);
  }

private:
  SplitMix64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

} // namespace rlsedit
