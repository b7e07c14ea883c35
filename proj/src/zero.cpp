#include "extcalc/zero.hpp"

#include <algorithm>

#include "extcalc/errors.hpp"
#include "extcalc/kernels.hpp"

namespace extcalc {

SignedSum::SignedSum(const Expression& e) {
  if (e.op() == Op::Sum) {
    for (const auto& t : e.children()) operands.emplace_back(1.0, t);
  } else {
    operands.emplace_back(1.0, e);
  }
}

SignedSum::SignedSum(const Expression& a, const Expression& b) {
  operands.emplace_back(1.0, a);
  operands.emplace_back(-1.0, b);
}

std::vector<Point> draw_valid_points(const Tape& tape, const Box& box, std::size_t count,
                                     SplitMix64& rng, std::size_t attempts_per_sample) {
  std::vector<Point> accepted;
  accepted.reserve(count);
  const std::size_t budget = std::max<std::size_t>(count, 1) * attempts_per_sample;
  std::size_t drawn = 0;
  while (accepted.size() < count) {
    const std::size_t need = count - accepted.size();
    if (drawn + need > budget) {
      throw SamplingError("found only " + std::to_string(accepted.size()) + " of " +
                          std::to_string(count) + " valid sample points");
    }
    std::vector<Point> batch;
    batch.reserve(need);
    for (std::size_t i = 0; i < need; ++i) batch.push_back(draw_point(box, rng));
    drawn += need;
    BatchValues vals = evaluate_batch(tape, batch);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (vals.valid[i]) accepted.push_back(std::move(batch[i]));
    }
  }
  return accepted;
}

ZeroVerdict recognize_zero(std::span<const SignedSum> sums, int dim, const ZeroOptions& opts) {
  ZeroVerdict verdict;
  verdict.per_sum.assign(sums.size(), 0.0);

  std::vector<std::size_t> open;
  for (std::size_t k = 0; k < sums.size(); ++k) {
    std::vector<Expression> terms;
    for (const auto& [sign, e] : sums[k].operands) {
      terms.push_back(sign == 1.0 ? e : Expression::product({Expression::number(sign), e}));
    }
    if (!simplify(Expression::sum(std::move(terms))).is_zero()) open.push_back(k);
  }
  if (open.empty()) {
    verdict.zero = true;
    verdict.structural = true;
    return verdict;
  }

  std::vector<Expression> roots;
  std::vector<ResidualGroup> groups;
  for (std::size_t k : open) {
    ResidualGroup g;
    for (const auto& [sign, e] : sums[k].operands) {
      g.roots.push_back(roots.size());
      g.signs.push_back(sign);
      roots.push_back(e);
    }
    groups.push_back(std::move(g));
  }
  Tape tape(roots);
  const int needed = std::max(dim, tape.dimension());
  Box box = opts.box.empty() ? unit_box(needed) : opts.box;
  if (box.size() < static_cast<std::size_t>(tape.dimension())) {
    throw DimensionError("sampling box smaller than the variables referenced");
  }
  SplitMix64 rng(opts.seed);
  auto points = draw_valid_points(tape, box, opts.samples, rng, opts.attempts_per_sample);
  ResidualScan scan = scan_residuals(tape, groups, points);

  verdict.points = scan.valid_points;
  for (std::size_t j = 0; j < open.size(); ++j) {
    verdict.per_sum[open[j]] = scan.max_scaled[j];
    verdict.max_scaled_residual = std::max(verdict.max_scaled_residual, scan.max_scaled[j]);
  }
  verdict.zero = verdict.max_scaled_residual <= opts.tolerance;
  return verdict;
}

ZeroVerdict recognize_zero(const Expression& e, int dim, const ZeroOptions& opts) {
  SignedSum s(e);
  return recognize_zero(std::span<const SignedSum>(&s, 1), dim, opts);
}

}  // namespace extcalc
