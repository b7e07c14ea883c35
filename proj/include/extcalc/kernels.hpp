#pragma once

// Batch evaluation over sample points. Each kernel has an OpenMP version and
// a serial reference with identical results; tests compare the two and the
// benchmark target times them.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "extcalc/expression.hpp"

namespace extcalc {

/// A set of expressions flattened into one instruction list. Structurally
/// equal subtrees are evaluated once per point.
class Tape {
 public:
  explicit Tape(std::span<const Expression> roots);

  std::size_t root_count() const { return roots_.size(); }
  std::size_t size() const { return ops_.size(); }
  int dimension() const { return dim_; }

  /// Evaluates every root at `p` into `out`. `scratch` must hold size()
  /// doubles. Returns false if any instruction leaves its domain.
  bool evaluate(std::span<const double> p, std::span<double> scratch, std::span<double> out) const;

 private:
  struct Instr {
    Op op;
    Func func;
    int arg;            // variable index or exponent
    double value;
    std::uint32_t first;  // into operands_
    std::uint32_t count;
  };

  std::vector<Instr> ops_;
  std::vector<std::uint32_t> operands_;
  std::vector<std::uint32_t> roots_;
  int dim_ = 0;

  struct Builder;
  friend struct Builder;
};

/// Row-major points × roots; rows for points outside the domain are NaN.
struct BatchValues {
  std::size_t roots = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * roots, roots);
  }
};

BatchValues evaluate_batch(const Tape& tape, std::span<const Point> points);
BatchValues evaluate_batch_serial(const Tape& tape, std::span<const Point> points);

/// Signed sum of tape roots whose vanishing is being checked.
struct ResidualGroup {
  std::vector<std::size_t> roots;
  std::vector<double> signs;
};

/// Per group, the largest |Σ sign·v| / (1 + max |v|) over the valid points.
struct ResidualScan {
  std::vector<double> max_scaled;
  std::vector<double> max_absolute;
  std::size_t valid_points = 0;
};

ResidualScan scan_residuals(const Tape& tape, std::span<const ResidualGroup> groups,
                            std::span<const Point> points);
ResidualScan scan_residuals_serial(const Tape& tape, std::span<const ResidualGroup> groups,
                                   std::span<const Point> points);

/// Scaled residual of one group given the root values at a point.
double scaled_residual(const ResidualGroup& g, std::span<const double> row, double* absolute = nullptr);

}  // namespace extcalc
