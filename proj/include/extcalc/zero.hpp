#pragma once

// Zero recognition: is a signed sum of expressions identically zero?
//
// Accepted when the simplified sum is the 0 literal, or when at every one of
// `samples` seeded points |Σ sign·v| ≤ tolerance·(1 + max |v|), where the v
// are the unsimplified operands.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "extcalc/expression.hpp"
#include "extcalc/random.hpp"

namespace extcalc {

struct SignedSum {
  std::vector<std::pair<double, Expression>> operands;

  SignedSum() = default;
  /// One operand per top-level summand of `e`.
  explicit SignedSum(const Expression& e);
  /// a - b
  SignedSum(const Expression& a, const Expression& b);
};

struct ZeroOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
  /// Sampling box; defaults to [-1, 1]^dim when empty.
  Box box;
  /// Candidate points drawn per accepted point before giving up.
  std::size_t attempts_per_sample = 20;
};

struct ZeroVerdict {
  bool zero = false;
  bool structural = false;  // decided by simplification alone
  double max_scaled_residual = 0.0;
  std::vector<double> per_sum;  // max scaled residual of each sum
  std::size_t points = 0;
};

/// Tests every sum on one shared sample set. Throws SamplingError when fewer
/// than `samples` points lie in the domain of all operands.
ZeroVerdict recognize_zero(std::span<const SignedSum> sums, int dim, const ZeroOptions& opts = {});
ZeroVerdict recognize_zero(const Expression& e, int dim, const ZeroOptions& opts = {});

/// Draws `count` points from `box` at which every root of `tape` evaluates,
/// continuing the stream of `rng`. Throws SamplingError after
/// count·attempts_per_sample candidates.
class Tape;
std::vector<Point> draw_valid_points(const Tape& tape, const Box& box, std::size_t count,
                                     SplitMix64& rng, std::size_t attempts_per_sample = 20);

}  // namespace extcalc
