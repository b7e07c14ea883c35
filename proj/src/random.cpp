#include "extcalc/random.hpp"

namespace extcalc {

Box unit_box(int dim) { return Box(static_cast<std::size_t>(dim), {-1.0, 1.0}); }

Point draw_point(const Box& box, SplitMix64& rng) {
  Point p;
  p.reserve(box.size());
  for (const auto& [lo, hi] : box) p.push_back(rng.uniform(lo, hi));
  return p;
}

namespace {

Expression leaf(const RandomExpressionOptions& opts, SplitMix64& rng) {
  if (rng.unit() < 0.75) return Expression::variable(rng.uniform_int(1, opts.dim));
  int c = rng.uniform_int(1, 5);
  if (rng.unit() < 0.3) c = -c;
  return Expression::number(static_cast<double>(c));
}

Expression node(const RandomExpressionOptions& opts, int depth, SplitMix64& rng) {
  if (depth <= 0 || rng.unit() < 0.25) return leaf(opts, rng);
  const int choices = opts.partial_functions ? 10 : 8;
  switch (rng.uniform_int(0, choices - 1)) {
    case 0:
    case 1:
      return node(opts, depth - 1, rng) + node(opts, depth - 1, rng);
    case 2:
      return node(opts, depth - 1, rng) - node(opts, depth - 1, rng);
    case 3:
    case 4:
      return node(opts, depth - 1, rng) * node(opts, depth - 1, rng);
    case 5:
      return pow(node(opts, depth - 1, rng), rng.uniform_int(2, 3));
    case 6:
      return rng.unit() < 0.5 ? sin(node(opts, depth - 1, rng)) : cos(node(opts, depth - 1, rng));
    case 7:
      return exp(node(opts, depth - 1, rng));
    case 8:
      return node(opts, depth - 1, rng) / node(opts, depth - 1, rng);
    default:
      return log(node(opts, depth - 1, rng));
  }
}

}  // namespace

Expression random_expression(const RandomExpressionOptions& opts, SplitMix64& rng) {
  return node(opts, opts.max_depth, rng);
}

}  // namespace extcalc
