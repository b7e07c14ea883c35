#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "extcalc/expression.hpp"
#include "extcalc/index_set.hpp"

namespace extcalc {

/// A degree-k form over z1..zn stored as a sparse map from standard k-tuples
/// to coefficients. Coefficients are kept simplified and zero coefficients
/// are dropped, so the zero form of every (n, k) is the empty map.
/// Degrees above n are legal and always zero.
class DifferentialForm {
 public:
  using Coefficients = std::map<IndexSet, Expression>;

  DifferentialForm(int dim, int degree);
  /// Throws DimensionError for keys of the wrong length or beyond dim, or for
  /// coefficients referencing variables beyond dim.
  DifferentialForm(int dim, int degree, Coefficients coeffs);

  static DifferentialForm function(int dim, Expression f);
  static DifferentialForm monomial(int dim, IndexSet key, Expression coeff = Expression::number(1.0));

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const Coefficients& coefficients() const { return coeffs_; }
  Expression coefficient(const IndexSet& key) const;
  bool is_zero() const { return coeffs_.empty(); }

  bool operator==(const DifferentialForm&) const = default;

 private:
  int dim_;
  int degree_;
  Coefficients coeffs_;
};

/// c1·f1 + c2·f2. Throws DimensionError on mismatched (n, k).
DifferentialForm linear_combine(double c1, const DifferentialForm& f1, double c2,
                                const DifferentialForm& f2);

/// a ∧ b. Throws DimensionError on mismatched n.
DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);

/// dω = Σ_I Σ_{s∉I} ∂a_I/∂z_s dz_s ∧ dz_I, each monomial brought to standard
/// order with the insertion sign.
DifferentialForm exterior_derivative(const DifferentialForm& w);

/// Every stored coefficient evaluated at p; omitted keys are zero.
std::map<IndexSet, double> evaluate_form(const DifferentialForm& w, std::span<const double> p);

/// "(z2) dz1^dz3 + (z1) dz2^dz3"; a 0-form prints as "(f)" and the zero form as "0".
std::string to_string(const DifferentialForm& w);

/// Reads the printer's format and the manifest shorthand "<expr> d z1^z3".
/// A term without a coefficient ("dz1^dz2") has coefficient 1; differentials
/// may be out of order and are sorted with sign. The degree is taken from the
/// first term unless given. Throws ParseError.
DifferentialForm parse_form(std::string_view text, int dim, std::optional<int> degree = std::nullopt);

}  // namespace extcalc
