#include "extcalc/smooth_map.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <stdexcept>

#include "extcalc/errors.hpp"

namespace extcalc {

SmoothMap::SmoothMap(int source_dim, std::vector<Expression> components)
    : m_(source_dim), components_(std::move(components)) {
  if (m_ < 0) throw DimensionError("negative source dimension");
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (components_[i].max_variable() > m_) {
      throw DimensionError("component x" + std::to_string(i + 1) + " references z" +
                           std::to_string(components_[i].max_variable()) + " beyond source dimension " +
                           std::to_string(m_));
    }
  }
}

SmoothMap SmoothMap::identity(int dim) {
  std::vector<Expression> cs;
  for (int i = 1; i <= dim; ++i) cs.push_back(Expression::variable(i));
  return SmoothMap(dim, std::move(cs));
}

Point SmoothMap::operator()(std::span<const double> p) const {
  Point out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(evaluate(c, p));
  return out;
}

ExpressionMatrix::ExpressionMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows * cols)) {}

const Expression& ExpressionMatrix::operator()(int i, int j) const {
  return entries_[static_cast<std::size_t>((i - 1) * cols_ + (j - 1))];
}

Expression& ExpressionMatrix::operator()(int i, int j) {
  return entries_[static_cast<std::size_t>((i - 1) * cols_ + (j - 1))];
}

Expression determinant_expansion(const ExpressionMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  const int k = m.rows();
  if (k > kMaxMinorOrder) {
    throw std::invalid_argument("minor of order " + std::to_string(k) + " exceeds the cap of " +
                                std::to_string(kMaxMinorOrder));
  }
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<Expression> terms;
  do {
    std::vector<Expression> factors;
    factors.reserve(static_cast<std::size_t>(k) + 1);
    bool vanishes = false;
    for (int r = 1; r <= k; ++r) {
      const Expression& e = m(r, perm[static_cast<std::size_t>(r - 1)]);
      if (e.is_zero()) {
        vanishes = true;
        break;
      }
      factors.push_back(e);
    }
    if (vanishes) continue;
    if (sort_with_sign(perm)->sign < 0) factors.insert(factors.begin(), Expression::number(-1.0));
    terms.push_back(Expression::product(std::move(factors)));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return Expression::sum(std::move(terms));
}

ExpressionMatrix jacobian_matrix(const SmoothMap& F) {
  ExpressionMatrix J(F.target_dim(), F.source_dim());
  for (int i = 1; i <= F.target_dim(); ++i) {
    for (int j = 1; j <= F.source_dim(); ++j) J(i, j) = partial(F.component(i), j);
  }
  return J;
}

Expression jacobian_minor(const ExpressionMatrix& jacobian, const IndexSet& rows, const IndexSet& cols) {
  if (rows.size() != cols.size()) throw std::invalid_argument("minor with unequal row and column counts");
  if (rows.max() > jacobian.rows() || cols.max() > jacobian.cols()) {
    throw DimensionError("minor " + to_string(rows) + "x" + to_string(cols) + " outside a " +
                         std::to_string(jacobian.rows()) + "x" + std::to_string(jacobian.cols()) + " Jacobian");
  }
  const int k = static_cast<int>(rows.size());
  ExpressionMatrix sub(k, k);
  for (int a = 1; a <= k; ++a) {
    for (int b = 1; b <= k; ++b) {
      sub(a, b) = jacobian(rows[static_cast<std::size_t>(a - 1)], cols[static_cast<std::size_t>(b - 1)]);
    }
  }
  return simplify(determinant_expansion(sub));
}

Expression jacobian_minor(const SmoothMap& F, const IndexSet& rows, const IndexSet& cols) {
  return jacobian_minor(jacobian_matrix(F), rows, cols);
}

DifferentialForm pullback(const SmoothMap& F, const DifferentialForm& w) {
  if (w.dim() != F.target_dim()) {
    throw DimensionError("pullback of a form in dimension " + std::to_string(w.dim()) +
                         " along a map into dimension " + std::to_string(F.target_dim()));
  }
  const int m = F.source_dim();
  const int k = w.degree();
  if (k > m || w.is_zero()) return DifferentialForm(m, k);

  const ExpressionMatrix jac = jacobian_matrix(F);
  std::vector<std::pair<IndexSet, Expression>> composed;
  for (const auto& [I, a] : w.coefficients()) composed.emplace_back(I, substitute(a, F.components()));

  DifferentialForm::Coefficients out;
  for (const auto& J : standard_tuples(m, k)) {
    std::vector<Expression> terms;
    for (const auto& [I, a] : composed) {
      Expression minor = jacobian_minor(jac, I, J);
      if (minor.is_zero()) continue;
      terms.push_back(Expression::product({a, std::move(minor)}));
    }
    if (!terms.empty()) out.emplace(J, Expression::sum(std::move(terms)));
  }
  return DifferentialForm(m, k, std::move(out));
}

SmoothMap compose(const SmoothMap& F, const SmoothMap& G) {
  if (F.source_dim() != G.target_dim()) {
    throw DimensionError("cannot compose: inner map lands in dimension " + std::to_string(G.target_dim()) +
                         ", outer map starts in " + std::to_string(F.source_dim()));
  }
  std::vector<Expression> cs;
  cs.reserve(F.components().size());
  for (const auto& c : F.components()) cs.push_back(substitute(c, G.components()));
  return SmoothMap(G.source_dim(), std::move(cs));
}

std::string to_string(const SmoothMap& F) {
  std::string out;
  for (int i = 1; i <= F.target_dim(); ++i) {
    if (i > 1) out += "; ";
    out += "x" + std::to_string(i) + " = " + to_string(F.component(i));
  }
  return out;
}

SmoothMap parse_map(std::string_view text, int source_dim) {
  std::vector<Expression> cs;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view piece = text.substr(start, end - start);
    std::size_t pos = 0;
    while (pos < piece.size() && std::isspace(static_cast<unsigned char>(piece[pos]))) ++pos;
    // optional "x<i> =" label
    if (pos < piece.size() && piece[pos] == 'x') {
      std::size_t q = pos + 1;
      while (q < piece.size() && std::isdigit(static_cast<unsigned char>(piece[q]))) ++q;
      std::size_t r = q;
      while (r < piece.size() && std::isspace(static_cast<unsigned char>(piece[r]))) ++r;
      if (q > pos + 1 && r < piece.size() && piece[r] == '=') pos = r + 1;
    }
    try {
      cs.push_back(parse(piece.substr(pos)));
    } catch (const ParseError& e) {
      throw ParseError(std::string("component ") + std::to_string(cs.size() + 1) + ": " + e.detail(),
                       start + pos + e.offset());
    }
    start = end + 1;
  }
  return SmoothMap(source_dim, std::move(cs));
}

}  // namespace extcalc
