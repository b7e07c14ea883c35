#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "extcalc/expression.hpp"

namespace extcalc {

/// SplitMix64. Every sampled point and random instance in the project is
/// drawn from this generator so runs replay bit-for-bit from a seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next() % span);
  }

 private:
  std::uint64_t state_;
};

/// Axis-aligned sampling box, one [lo, hi] interval per coordinate.
using Box = std::vector<std::pair<double, double>>;

Box unit_box(int dim);
Point draw_point(const Box& box, SplitMix64& rng);

struct RandomExpressionOptions {
  int dim = 3;
  int max_depth = 3;
  /// Admit log and division. They are partial functions, so the default
  /// corpus leaves them out.
  bool partial_functions = false;
};

/// Random polynomial/trigonometric expression in z1..z<dim>.
Expression random_expression(const RandomExpressionOptions& opts, SplitMix64& rng);

}  // namespace extcalc
