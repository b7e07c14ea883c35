#include "extcalc/form.hpp"

#include <cctype>
#include <vector>

#include "extcalc/errors.hpp"

namespace extcalc {

namespace {

using Accumulator = std::map<IndexSet, std::vector<Expression>>;

DifferentialForm::Coefficients collapse(Accumulator acc) {
  DifferentialForm::Coefficients out;
  for (auto& [key, terms] : acc) out.emplace(key, Expression::sum(std::move(terms)));
  return out;
}

Expression signed_term(int sign, Expression e) {
  if (sign > 0) return e;
  return Expression::product({Expression::number(-1.0), std::move(e)});
}

}  // namespace

DifferentialForm::DifferentialForm(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 0 || degree < 0) throw DimensionError("negative dimension or degree");
}

DifferentialForm::DifferentialForm(int dim, int degree, Coefficients coeffs)
    : DifferentialForm(dim, degree) {
  for (auto& [key, c] : coeffs) {
    if (key.size() != static_cast<std::size_t>(degree)) {
      throw DimensionError("key " + to_string(key) + " does not have length " + std::to_string(degree));
    }
    if (key.max() > dim) throw DimensionError("key " + to_string(key) + " exceeds dimension " + std::to_string(dim));
    if (c.max_variable() > dim) {
      throw DimensionError("coefficient references z" + std::to_string(c.max_variable()) +
                           " in dimension " + std::to_string(dim));
    }
    Expression s = simplify(c);
    if (!s.is_zero()) coeffs_.emplace(key, std::move(s));
  }
}

DifferentialForm DifferentialForm::function(int dim, Expression f) {
  return DifferentialForm(dim, 0, {{IndexSet{}, std::move(f)}});
}

DifferentialForm DifferentialForm::monomial(int dim, IndexSet key, Expression coeff) {
  const int k = static_cast<int>(key.size());
  return DifferentialForm(dim, k, {{std::move(key), std::move(coeff)}});
}

Expression DifferentialForm::coefficient(const IndexSet& key) const {
  auto it = coeffs_.find(key);
  return it == coeffs_.end() ? Expression::number(0.0) : it->second;
}

DifferentialForm linear_combine(double c1, const DifferentialForm& f1, double c2,
                                const DifferentialForm& f2) {
  if (f1.dim() != f2.dim() || f1.degree() != f2.degree()) {
    throw DimensionError("linear combination of forms with different dimension or degree");
  }
  Accumulator acc;
  for (const auto& [key, c] : f1.coefficients()) {
    acc[key].push_back(Expression::product({Expression::number(c1), c}));
  }
  for (const auto& [key, c] : f2.coefficients()) {
    acc[key].push_back(Expression::product({Expression::number(c2), c}));
  }
  return DifferentialForm(f1.dim(), f1.degree(), collapse(std::move(acc)));
}

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.dim() != b.dim()) throw DimensionError("wedge of forms in different dimensions");
  const int degree = a.degree() + b.degree();
  if (degree > a.dim()) return DifferentialForm(a.dim(), degree);
  Accumulator acc;
  std::vector<int> joined;
  for (const auto& [I, ca] : a.coefficients()) {
    for (const auto& [J, cb] : b.coefficients()) {
      joined.assign(I.begin(), I.end());
      joined.insert(joined.end(), J.begin(), J.end());
      auto sorted = sort_with_sign(joined);
      if (!sorted) continue;
      acc[sorted->set].push_back(signed_term(sorted->sign, Expression::product({ca, cb})));
    }
  }
  return DifferentialForm(a.dim(), degree, collapse(std::move(acc)));
}

DifferentialForm exterior_derivative(const DifferentialForm& w) {
  const int n = w.dim();
  const int degree = w.degree() + 1;
  if (degree > n) return DifferentialForm(n, degree);
  Accumulator acc;
  for (const auto& [I, a] : w.coefficients()) {
    for (int s = 1; s <= n; ++s) {
      if (I.contains(s) || !a.depends_on(s)) continue;
      const Insertion ins = insertion_sign(s, I);
      acc[I.with(s)].push_back(signed_term(ins.sign, partial(a, s)));
    }
  }
  return DifferentialForm(n, degree, collapse(std::move(acc)));
}

std::map<IndexSet, double> evaluate_form(const DifferentialForm& w, std::span<const double> p) {
  if (p.size() != static_cast<std::size_t>(w.dim())) {
    throw DimensionError("point of length " + std::to_string(p.size()) + " for a form in dimension " +
                         std::to_string(w.dim()));
  }
  std::map<IndexSet, double> out;
  for (const auto& [key, c] : w.coefficients()) out.emplace(key, evaluate(c, p));
  return out;
}

std::string to_string(const DifferentialForm& w) {
  if (w.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [key, c] : w.coefficients()) {
    if (!first) out += " + ";
    first = false;
    out += '(';
    out += to_string(c);
    out += ')';
    for (std::size_t i = 0; i < key.size(); ++i) {
      out += i == 0 ? " dz" : "^dz";
      out += std::to_string(key[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

class FormReader {
 public:
  FormReader(std::string_view text, int dim) : text_(text), dim_(dim) {}

  DifferentialForm read(std::optional<int> degree) {
    skip_ws();
    if (text_.substr(pos_) == "0") {
      if (!degree) throw ParseError("the zero form needs an explicit degree", pos_);
      return DifferentialForm(dim_, *degree);
    }
    Accumulator acc;
    int sign = 1;
    while (true) {
      skip_ws();
      const std::size_t term_start = pos_;
      Expression coeff = Expression::number(1.0);
      if (differential_ahead()) {
        // bare differential
      } else if ((peek() == '-' || peek() == '+') && differential_after_sign()) {
        if (peek() == '-') sign = -sign;
        ++pos_;
        skip_ws();
      } else {
        coeff = parse_prefix(text_, pos_);
      }
      std::vector<int> indices;
      if (differential_ahead()) indices = differential();
      const int k = static_cast<int>(indices.size());
      if (!degree) degree = k;
      if (k != *degree) {
        throw ParseError("term of degree " + std::to_string(k) + " in a form of degree " +
                             std::to_string(*degree),
                         term_start);
      }
      for (int i : indices) {
        if (i > dim_) throw ParseError("differential dz" + std::to_string(i) + " beyond dimension", term_start);
      }
      if (coeff.max_variable() > dim_) {
        throw ParseError("coefficient references a variable beyond dimension " + std::to_string(dim_),
                         term_start);
      }
      if (auto sorted = sort_with_sign(indices)) {
        acc[sorted->set].push_back(signed_term(sign * sorted->sign, coeff));
      }
      skip_ws();
      if (pos_ >= text_.size()) break;
      if (peek() == '+') {
        sign = 1;
      } else if (peek() == '-') {
        sign = -1;
      } else {
        throw ParseError(std::string("unexpected '") + peek() + "' in form", pos_);
      }
      ++pos_;
    }
    return DifferentialForm(dim_, *degree, collapse(std::move(acc)));
  }

 private:
  bool differential_at(std::size_t i) const {
    if (i >= text_.size() || text_[i] != 'd') return false;
    ++i;
    while (i < text_.size() && std::isspace(static_cast<unsigned char>(text_[i]))) ++i;
    return i < text_.size() && text_[i] == 'z';
  }

  bool differential_ahead() const { return differential_at(pos_); }

  bool differential_after_sign() const {
    std::size_t i = pos_ + 1;
    while (i < text_.size() && std::isspace(static_cast<unsigned char>(text_[i]))) ++i;
    return differential_at(i);
  }

  // "dz1^dz3" or "d z1^z3"
  std::vector<int> differential() {
    std::vector<int> out;
    ++pos_;  // 'd'
    out.push_back(variable());
    while (true) {
      skip_ws();
      if (peek() != '^') break;
      ++pos_;
      skip_ws();
      if (peek() == 'd') ++pos_;
      out.push_back(variable());
    }
    return out;
  }

  int variable() {
    skip_ws();
    const std::size_t start = pos_;
    if (peek() != 'z') throw ParseError("expected differential variable", pos_);
    ++pos_;
    int v = 0;
    bool any = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 1000000) throw ParseError("differential index out of range", start);
      ++pos_;
      any = true;
    }
    if (!any || v == 0) throw ParseError("bad differential index", start);
    return v;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

DifferentialForm parse_form(std::string_view text, int dim, std::optional<int> degree) {
  return FormReader(text, dim).read(degree);
}

}  // namespace extcalc
