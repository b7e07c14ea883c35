#include <algorithm>
#include <cmath>
#include <map>

#include "extcalc/expression.hpp"

namespace extcalc {

namespace {

// Builders below take canonical operands and return a canonical result.
// Canonical trees contain no Negate nodes, no nested sums or products, at
// most one numeric coefficient (leading, never 1) per product, and sorted,
// collected summands and factors.

Expression make_sum(std::vector<Expression> terms);
Expression make_product(std::vector<Expression> factors);
Expression make_power(const Expression& base, int exponent);

Expression number_or_zero(double v) { return Expression::number(v); }

// Splits a summand into numeric coefficient and monomial. A pure number has
// no monomial.
std::pair<double, std::optional<Expression>> split_coefficient(const Expression& t) {
  if (t.is_number()) return {t.value(), std::nullopt};
  if (t.op() == Op::Product && t.children()[0].is_number()) {
    auto fs = t.children();
    std::vector<Expression> rest(fs.begin() + 1, fs.end());
    return {fs[0].value(), Expression::product(std::move(rest))};
  }
  return {1.0, t};
}

Expression scale(const Expression& e, double c) {
  if (c == 0.0) return number_or_zero(0.0);
  if (c == 1.0) return e;
  if (e.is_number()) return number_or_zero(c * e.value());
  if (e.op() == Op::Sum) {
    std::vector<Expression> terms;
    terms.reserve(e.children().size());
    for (const auto& t : e.children()) terms.push_back(scale(t, c));
    return make_sum(std::move(terms));
  }
  auto [coef, mono] = split_coefficient(e);
  const double k = coef * c;
  if (k == 0.0) return number_or_zero(0.0);
  if (k == 1.0) return *mono;
  std::vector<Expression> fs{Expression::number(k)};
  if (mono->op() == Op::Product) {
    fs.insert(fs.end(), mono->children().begin(), mono->children().end());
  } else {
    fs.push_back(*mono);
  }
  return Expression::product(std::move(fs));
}

Expression make_sum(std::vector<Expression> terms) {
  std::map<Expression, double> collected;
  double constant = 0.0;
  auto add = [&](const Expression& t) {
    auto [c, mono] = split_coefficient(t);
    if (!mono) {
      constant += c;
      return;
    }
    collected[*mono] += c;
  };
  for (const auto& t : terms) {
    if (t.op() == Op::Sum) {
      for (const auto& k : t.children()) add(k);
    } else {
      add(t);
    }
  }
  std::vector<Expression> out;
  out.reserve(collected.size() + 1);
  for (const auto& [mono, c] : collected) {
    if (c != 0.0) out.push_back(scale(mono, c));
  }
  if (constant != 0.0) out.push_back(Expression::number(constant));
  return Expression::sum(std::move(out));
}

Expression make_product(std::vector<Expression> factors) {
  double coef = 1.0;
  std::map<Expression, long long> bases;
  auto add = [&](const Expression& f) {
    if (f.is_number()) {
      coef *= f.value();
    } else if (f.op() == Op::Power) {
      bases[f.children()[0]] += f.exponent();
    } else {
      bases[f] += 1;
    }
  };
  for (const auto& f : factors) {
    if (f.op() == Op::Product) {
      for (const auto& k : f.children()) add(k);
    } else {
      add(f);
    }
  }
  if (coef == 0.0) return number_or_zero(0.0);

  std::vector<Expression> out;
  for (const auto& [b, e] : bases) {
    if (e == 0) continue;
    Expression p = make_power(b, static_cast<int>(e));
    if (p.is_number()) {
      coef *= p.value();
    } else if (p.op() == Op::Product) {
      // Power of a number that would not fold, e.g. 0^-1 carried as a factor.
      for (const auto& k : p.children()) out.push_back(k);
    } else {
      out.push_back(std::move(p));
    }
  }
  if (coef == 0.0) return number_or_zero(0.0);
  if (out.empty()) return number_or_zero(coef);
  if (out.size() == 1 && out[0].op() == Op::Sum) return scale(out[0], coef);
  std::sort(out.begin(), out.end());
  if (coef != 1.0) out.insert(out.begin(), Expression::number(coef));
  return Expression::product(std::move(out));
}

Expression make_power(const Expression& base, int exponent) {
  if (exponent == 0) return Expression::number(1.0);
  if (exponent == 1) return base;
  switch (base.op()) {
    case Op::Number: {
      const double b = base.value();
      if (b == 0.0 && exponent < 0) return Expression::power(base, exponent);
      double v = ipow(b, exponent);
      if (std::isfinite(v)) return Expression::number(v);
      return Expression::power(base, exponent);
    }
    case Op::Power: {
      const long long e = static_cast<long long>(base.exponent()) * exponent;
      return make_power(base.children()[0], static_cast<int>(e));
    }
    case Op::Product: {
      std::vector<Expression> fs;
      fs.reserve(base.children().size());
      for (const auto& f : base.children()) fs.push_back(make_power(f, exponent));
      return make_product(std::move(fs));
    }
    default:
      return Expression::power(base, exponent);
  }
}

Expression make_function(Func f, const Expression& arg) {
  if (arg.is_number()) {
    const double a = arg.value();
    double v = 0.0;
    bool ok = true;
    switch (f) {
      case Func::Sin: v = std::sin(a); break;
      case Func::Cos: v = std::cos(a); break;
      case Func::Exp: v = std::exp(a); break;
      case Func::Log:
        ok = a > 0.0;
        if (ok) v = std::log(a);
        break;
    }
    if (ok && std::isfinite(v)) return Expression::number(v);
  }
  return Expression::apply(f, arg);
}

Expression simplify_rec(const Expression& e) {
  switch (e.op()) {
    case Op::Number:
    case Op::Variable:
      return e;
    case Op::Negate:
      return scale(simplify_rec(e.children()[0]), -1.0);
    case Op::Power:
      return make_power(simplify_rec(e.children()[0]), e.exponent());
    case Op::Function:
      return make_function(e.func(), simplify_rec(e.children()[0]));
    case Op::Sum:
    case Op::Product: {
      std::vector<Expression> kids;
      kids.reserve(e.children().size());
      for (const auto& k : e.children()) kids.push_back(simplify_rec(k));
      return e.op() == Op::Sum ? make_sum(std::move(kids)) : make_product(std::move(kids));
    }
  }
  return e;
}

// --- expansion -------------------------------------------------------------

struct TooLarge {};

std::vector<Expression> summands(const Expression& e) {
  if (e.op() == Op::Sum) return {e.children().begin(), e.children().end()};
  return {e};
}

Expression expand_rec(const Expression& e, std::size_t cap);

Expression multiply_out(const std::vector<Expression>& factors, std::size_t cap) {
  std::vector<Expression> acc{Expression::number(1.0)};
  for (const auto& f : factors) {
    auto fs = summands(f);
    if (acc.size() * fs.size() > cap) throw TooLarge{};
    std::vector<Expression> next;
    next.reserve(acc.size() * fs.size());
    for (const auto& a : acc) {
      for (const auto& b : fs) next.push_back(make_product({a, b}));
    }
    acc = summands(make_sum(std::move(next)));
  }
  return make_sum(std::move(acc));
}

Expression expand_rec(const Expression& e, std::size_t cap) {
  switch (e.op()) {
    case Op::Number:
    case Op::Variable:
      return e;
    case Op::Function:
      return make_function(e.func(), expand_rec(e.children()[0], cap));
    case Op::Negate:
      return scale(expand_rec(e.children()[0], cap), -1.0);
    case Op::Power: {
      Expression b = expand_rec(e.children()[0], cap);
      if (b.op() == Op::Sum && e.exponent() > 1) {
        std::vector<Expression> reps(static_cast<std::size_t>(e.exponent()), b);
        return multiply_out(reps, cap);
      }
      Expression r = make_power(b, e.exponent());
      if (r.op() == Op::Product) return expand_rec(r, cap);
      return r;
    }
    case Op::Sum: {
      std::vector<Expression> kids;
      for (const auto& k : e.children()) kids.push_back(expand_rec(k, cap));
      Expression s = make_sum(std::move(kids));
      if (s.op() == Op::Sum && s.children().size() > cap) throw TooLarge{};
      return s;
    }
    case Op::Product: {
      std::vector<Expression> kids;
      for (const auto& k : e.children()) kids.push_back(expand_rec(k, cap));
      // Powers of sums that survive make_product (negative exponents) stay atoms.
      Expression p = make_product(kids);
      if (p.op() == Op::Sum) return expand_rec(p, cap);
      if (p.op() != Op::Product) {
        if (p.op() == Op::Power) return expand_rec(p, cap);
        return p;
      }
      std::vector<Expression> factors;
      bool has_sum = false;
      for (const auto& f : p.children()) {
        if (f.op() == Op::Sum) {
          has_sum = true;
          factors.push_back(f);
        } else if (f.op() == Op::Power && f.children()[0].op() == Op::Sum && f.exponent() > 1) {
          has_sum = true;
          factors.insert(factors.end(), static_cast<std::size_t>(f.exponent()), f.children()[0]);
        } else {
          factors.push_back(f);
        }
      }
      if (!has_sum) return p;
      return multiply_out(factors, cap);
    }
  }
  return e;
}

}  // namespace

Expression simplify(const Expression& e) { return simplify_rec(e); }

std::optional<Expression> expand(const Expression& e, std::size_t max_terms) {
  try {
    return expand_rec(simplify_rec(e), max_terms);
  } catch (const TooLarge&) {
    return std::nullopt;
  }
}

}  // namespace extcalc
