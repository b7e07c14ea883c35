#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "extcalc/expression.hpp"
#include "extcalc/form.hpp"
#include "extcalc/index_set.hpp"

namespace extcalc {

/// x = F(y): n component expressions in the source variables z1..zm.
class SmoothMap {
 public:
  /// Throws DimensionError if a component references a variable beyond m.
  SmoothMap(int source_dim, std::vector<Expression> components);

  static SmoothMap identity(int dim);

  int source_dim() const { return m_; }
  int target_dim() const { return static_cast<int>(components_.size()); }
  const std::vector<Expression>& components() const { return components_; }
  const Expression& component(int i) const { return components_[static_cast<std::size_t>(i - 1)]; }

  /// Evaluates every component at p.
  Point operator()(std::span<const double> p) const;

 private:
  int m_;
  std::vector<Expression> components_;
};

/// n × m matrix of expressions, row-major; entry (i, j) at [(i-1)·m + (j-1)].
class ExpressionMatrix {
 public:
  ExpressionMatrix(int rows, int cols);
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  /// One-based.
  const Expression& operator()(int i, int j) const;
  Expression& operator()(int i, int j);

 private:
  int rows_;
  int cols_;
  std::vector<Expression> entries_;
};

/// Largest minor order accepted by determinant and jacobian_minor.
inline constexpr int kMaxMinorOrder = 5;

/// Leibniz permutation sum over k! terms, each signed by sort_with_sign.
/// Throws std::invalid_argument for non-square input or order above
/// kMaxMinorOrder. The result is left unsimplified so shared entries stay
/// shared.
Expression determinant_expansion(const ExpressionMatrix& m);

/// J(i, j) = ∂F_i/∂z_j, simplified.
ExpressionMatrix jacobian_matrix(const SmoothMap& F);

/// ∂(x_rows)/∂(y_cols): determinant of the selected k×k Jacobian submatrix,
/// simplified. Throws std::invalid_argument if sizes differ or k > 5, and
/// DimensionError for indices outside the map.
Expression jacobian_minor(const SmoothMap& F, const IndexSet& rows, const IndexSet& cols);
Expression jacobian_minor(const ExpressionMatrix& jacobian, const IndexSet& rows, const IndexSet& cols);

/// F*w: source coefficient on J is Σ_I (a_I ∘ F)·∂(x_I)/∂(y_J).
/// Throws DimensionError if w does not live on the target of F.
DifferentialForm pullback(const SmoothMap& F, const DifferentialForm& w);

/// F ∘ G (G applied first). Throws DimensionError unless F.m == G.n.
SmoothMap compose(const SmoothMap& F, const SmoothMap& G);

/// "x1 = <expr>; x2 = <expr>"
std::string to_string(const SmoothMap& F);

/// Components separated by ';', each optionally prefixed "x<i> =".
SmoothMap parse_map(std::string_view text, int source_dim);

}  // namespace extcalc
