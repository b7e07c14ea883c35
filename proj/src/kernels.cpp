#include "extcalc/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <omp.h>

namespace extcalc {

struct Tape::Builder {
  struct Key {
    Op op;
    Func func;
    int arg;
    std::uint64_t bits;
    std::vector<std::uint32_t> kids;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = static_cast<std::size_t>(k.op) * 31 + static_cast<std::size_t>(k.func);
      h = h * 1000003 ^ static_cast<std::size_t>(k.arg);
      h = h * 1000003 ^ k.bits;
      for (auto c : k.kids) h = h * 1000003 ^ c;
      return h;
    }
  };

  Tape& tape;
  std::unordered_map<const void*, std::uint32_t> by_node;
  std::unordered_map<Key, std::uint32_t, KeyHash> by_key;

  std::uint32_t intern(const Expression& e) {
    if (auto it = by_node.find(e.id()); it != by_node.end()) return it->second;
    Key key{e.op(), Func::Sin, 0, 0, {}};
    switch (e.op()) {
      case Op::Number:
        key.bits = std::bit_cast<std::uint64_t>(e.value());
        break;
      case Op::Variable:
        key.arg = e.index();
        tape.dim_ = std::max(tape.dim_, e.index());
        break;
      case Op::Power:
        key.arg = e.exponent();
        break;
      case Op::Function:
        key.func = e.func();
        break;
      default:
        break;
    }
    key.kids.reserve(e.children().size());
    for (const auto& k : e.children()) key.kids.push_back(intern(k));

    std::uint32_t idx;
    if (auto it = by_key.find(key); it != by_key.end()) {
      idx = it->second;
    } else {
      idx = static_cast<std::uint32_t>(tape.ops_.size());
      Instr in{key.op, key.func, key.arg, e.op() == Op::Number ? e.value() : 0.0,
               static_cast<std::uint32_t>(tape.operands_.size()),
               static_cast<std::uint32_t>(key.kids.size())};
      tape.operands_.insert(tape.operands_.end(), key.kids.begin(), key.kids.end());
      tape.ops_.push_back(in);
      by_key.emplace(std::move(key), idx);
    }
    by_node.emplace(e.id(), idx);
    return idx;
  }
};

Tape::Tape(std::span<const Expression> roots) {
  Builder b{*this, {}, {}};
  roots_.reserve(roots.size());
  for (const auto& r : roots) roots_.push_back(b.intern(r));
}

bool Tape::evaluate(std::span<const double> p, std::span<double> v, std::span<double> out) const {
  if (p.size() < static_cast<std::size_t>(dim_)) return false;
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const Instr& in = ops_[i];
    const std::uint32_t* kid = operands_.data() + in.first;
    double r = 0.0;
    switch (in.op) {
      case Op::Number:
        r = in.value;
        break;
      case Op::Variable:
        r = p[static_cast<std::size_t>(in.arg - 1)];
        break;
      case Op::Power: {
        const double b = v[kid[0]];
        if (in.arg < 0 && b == 0.0) return false;
        r = ipow(b, in.arg);
        break;
      }
      case Op::Negate:
        r = -v[kid[0]];
        break;
      case Op::Function: {
        const double a = v[kid[0]];
        switch (in.func) {
          case Func::Sin: r = std::sin(a); break;
          case Func::Cos: r = std::cos(a); break;
          case Func::Exp: r = std::exp(a); break;
          case Func::Log:
            if (!(a > 0.0)) return false;
            r = std::log(a);
            break;
        }
        break;
      }
      case Op::Sum:
        for (std::uint32_t j = 0; j < in.count; ++j) r += v[kid[j]];
        break;
      case Op::Product:
        r = 1.0;
        for (std::uint32_t j = 0; j < in.count; ++j) r *= v[kid[j]];
        break;
    }
    v[i] = r;
  }
  for (std::size_t j = 0; j < roots_.size(); ++j) {
    out[j] = v[roots_[j]];
    if (!std::isfinite(out[j])) return false;
  }
  return true;
}

namespace {

void eval_row(const Tape& tape, const Point& p, std::span<double> scratch, BatchValues& out,
              std::size_t i) {
  auto row = std::span<double>(out.values).subspan(i * out.roots, out.roots);
  const bool ok = tape.evaluate(p, scratch, row);
  out.valid[i] = ok ? 1 : 0;
  if (!ok) std::fill(row.begin(), row.end(), std::numeric_limits<double>::quiet_NaN());
}

BatchValues make_batch(const Tape& tape, std::size_t points) {
  BatchValues out;
  out.roots = tape.root_count();
  out.values.assign(points * out.roots, 0.0);
  out.valid.assign(points, 0);
  return out;
}

}  // namespace

BatchValues evaluate_batch_serial(const Tape& tape, std::span<const Point> points) {
  BatchValues out = make_batch(tape, points.size());
  std::vector<double> scratch(tape.size());
  for (std::size_t i = 0; i < points.size(); ++i) eval_row(tape, points[i], scratch, out, i);
  return out;
}

BatchValues evaluate_batch(const Tape& tape, std::span<const Point> points) {
  BatchValues out = make_batch(tape, points.size());
  const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel
  {
    std::vector<double> scratch(tape.size());
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < n; ++i) {
      eval_row(tape, points[static_cast<std::size_t>(i)], scratch, out, static_cast<std::size_t>(i));
    }
  }
  return out;
}

double scaled_residual(const ResidualGroup& g, std::span<const double> row, double* absolute) {
  double sum = 0.0;
  double scale = 0.0;
  for (std::size_t j = 0; j < g.roots.size(); ++j) {
    const double v = row[g.roots[j]];
    sum += g.signs[j] * v;
    scale = std::max(scale, std::abs(v));
  }
  if (absolute) *absolute = std::abs(sum);
  return std::abs(sum) / (1.0 + scale);
}

namespace {

void fold_row(std::span<const ResidualGroup> groups, std::span<const double> row,
              std::vector<double>& scaled, std::vector<double>& absolute) {
  for (std::size_t k = 0; k < groups.size(); ++k) {
    double abs_r = 0.0;
    scaled[k] = std::max(scaled[k], scaled_residual(groups[k], row, &abs_r));
    absolute[k] = std::max(absolute[k], abs_r);
  }
}

}  // namespace

ResidualScan scan_residuals_serial(const Tape& tape, std::span<const ResidualGroup> groups,
                                   std::span<const Point> points) {
  ResidualScan scan;
  scan.max_scaled.assign(groups.size(), 0.0);
  scan.max_absolute.assign(groups.size(), 0.0);
  std::vector<double> scratch(tape.size());
  std::vector<double> row(tape.root_count());
  for (const auto& p : points) {
    if (!tape.evaluate(p, scratch, row)) continue;
    ++scan.valid_points;
    fold_row(groups, row, scan.max_scaled, scan.max_absolute);
  }
  return scan;
}

ResidualScan scan_residuals(const Tape& tape, std::span<const ResidualGroup> groups,
                            std::span<const Point> points) {
  ResidualScan scan;
  scan.max_scaled.assign(groups.size(), 0.0);
  scan.max_absolute.assign(groups.size(), 0.0);
  const auto n = static_cast<std::int64_t>(points.size());
  std::size_t valid = 0;
#pragma omp parallel reduction(+ : valid)
  {
    std::vector<double> scratch(tape.size());
    std::vector<double> row(tape.root_count());
    std::vector<double> scaled(groups.size(), 0.0);
    std::vector<double> absolute(groups.size(), 0.0);
#pragma omp for schedule(dynamic, 4) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      if (!tape.evaluate(points[static_cast<std::size_t>(i)], scratch, row)) continue;
      ++valid;
      fold_row(groups, row, scaled, absolute);
    }
#pragma omp critical(extcalc_residual_merge)
    for (std::size_t k = 0; k < groups.size(); ++k) {
      scan.max_scaled[k] = std::max(scan.max_scaled[k], scaled[k]);
      scan.max_absolute[k] = std::max(scan.max_absolute[k], absolute[k]);
    }
  }
  scan.valid_points = valid;
  return scan;
}

}  // namespace extcalc
