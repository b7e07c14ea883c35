#include "extcalc/expression.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <functional>

#include "extcalc/errors.hpp"

namespace extcalc {

struct Expression::Node {
  Op op = Op::Number;
  double value = 0.0;
  int index = 0;
  int exponent = 0;
  Func func = Func::Sin;
  std::vector<Expression> kids;

  int max_var = 0;
  std::uint64_t var_mask = 0;  // bit min(i, 63); bit 63 also stands for every index above 63
  std::size_t count = 1;
  std::size_t hash = 0;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::uint64_t var_bit(int i) { return std::uint64_t{1} << std::min(i, 63); }

const std::string_view kFuncNames[] = {"sin", "cos", "exp", "log"};

}  // namespace

std::string_view func_name(Func f) { return kFuncNames[static_cast<int>(f)]; }

Expression Expression::make(Node n) {
  std::size_t h = static_cast<std::size_t>(n.op) * 0x100000001b3ULL;
  switch (n.op) {
    case Op::Number: {
      double v = n.value == 0.0 ? 0.0 : n.value;
      h = mix(h, std::bit_cast<std::uint64_t>(v));
      break;
    }
    case Op::Variable:
      n.max_var = n.index;
      n.var_mask = var_bit(n.index);
      h = mix(h, static_cast<std::size_t>(n.index));
      break;
    case Op::Power:
      h = mix(h, static_cast<std::size_t>(static_cast<std::int64_t>(n.exponent)));
      break;
    case Op::Function:
      h = mix(h, static_cast<std::size_t>(n.func));
      break;
    default:
      break;
  }
  for (const auto& k : n.kids) {
    n.max_var = std::max(n.max_var, k.node_->max_var);
    n.var_mask |= k.node_->var_mask;
    n.count += k.node_->count;
    h = mix(h, k.node_->hash);
  }
  n.hash = h;
  return Expression(std::make_shared<const Node>(std::move(n)));
}

Expression::Expression() : Expression(number(0.0)) {}

Expression Expression::number(double v) {
  Node n;
  n.op = Op::Number;
  n.value = v == 0.0 ? 0.0 : v;
  return make(std::move(n));
}

Expression Expression::variable(int index) {
  if (index < 1) throw std::invalid_argument("variable index must be positive");
  Node n;
  n.op = Op::Variable;
  n.index = index;
  return make(std::move(n));
}

Expression Expression::sum(std::vector<Expression> terms) {
  if (terms.empty()) return number(0.0);
  if (terms.size() == 1) return terms.front();
  Node n;
  n.op = Op::Sum;
  n.kids = std::move(terms);
  return make(std::move(n));
}

Expression Expression::product(std::vector<Expression> factors) {
  if (factors.empty()) return number(1.0);
  if (factors.size() == 1) return factors.front();
  Node n;
  n.op = Op::Product;
  n.kids = std::move(factors);
  return make(std::move(n));
}

Expression Expression::power(Expression base, int exponent) {
  Node n;
  n.op = Op::Power;
  n.exponent = exponent;
  n.kids.push_back(std::move(base));
  return make(std::move(n));
}

Expression Expression::negate(Expression e) {
  Node n;
  n.op = Op::Negate;
  n.kids.push_back(std::move(e));
  return make(std::move(n));
}

Expression Expression::apply(Func f, Expression arg) {
  Node n;
  n.op = Op::Function;
  n.func = f;
  n.kids.push_back(std::move(arg));
  return make(std::move(n));
}

Op Expression::op() const { return node_->op; }
double Expression::value() const { return node_->value; }
int Expression::index() const { return node_->index; }
int Expression::exponent() const { return node_->exponent; }
Func Expression::func() const { return node_->func; }
std::span<const Expression> Expression::children() const { return node_->kids; }
int Expression::max_variable() const { return node_->max_var; }
std::size_t Expression::node_count() const { return node_->count; }
std::size_t Expression::hash() const { return node_->hash; }

bool Expression::depends_on(int index) const {
  if (index < 1 || index > node_->max_var) return false;
  return (node_->var_mask & var_bit(index)) != 0;
}

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash) return false;
  return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.op != y.op) return x.op <=> y.op;
  switch (x.op) {
    case Op::Number:
      if (x.value < y.value) return std::strong_ordering::less;
      if (x.value > y.value) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    case Op::Variable:
      return x.index <=> y.index;
    case Op::Power:
      if (auto c = x.kids[0] <=> y.kids[0]; c != 0) return c;
      return x.exponent <=> y.exponent;
    case Op::Function:
      if (x.func != y.func) return x.func <=> y.func;
      return x.kids[0] <=> y.kids[0];
    default:
      break;
  }
  const std::size_t n = std::min(x.kids.size(), y.kids.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = x.kids[i] <=> y.kids[i]; c != 0) return c;
  }
  return x.kids.size() <=> y.kids.size();
}

Expression operator+(const Expression& a, const Expression& b) { return Expression::sum({a, b}); }
Expression operator-(const Expression& a, const Expression& b) {
  return Expression::sum({a, Expression::negate(b)});
}
Expression operator*(const Expression& a, const Expression& b) { return Expression::product({a, b}); }
Expression operator/(const Expression& a, const Expression& b) {
  return Expression::product({a, Expression::power(b, -1)});
}
Expression operator-(const Expression& a) { return Expression::negate(a); }
Expression pow(const Expression& base, int exponent) { return Expression::power(base, exponent); }
Expression sin(const Expression& e) { return Expression::apply(Func::Sin, e); }
Expression cos(const Expression& e) { return Expression::apply(Func::Cos, e); }
Expression exp(const Expression& e) { return Expression::apply(Func::Exp, e); }
Expression log(const Expression& e) { return Expression::apply(Func::Log, e); }

// ---------------------------------------------------------------------------
// Printing

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void print_expr(const Expression& e, std::string& out);

bool is_negative_number(const Expression& e) { return e.is_number() && e.value() < 0.0; }

bool has_negative_lead(const Expression& e) {
  return e.op() == Op::Product && is_negative_number(e.children()[0]);
}

// Operand of '^' or unary '-'.
void print_base(const Expression& e, std::string& out) {
  switch (e.op()) {
    case Op::Variable:
    case Op::Function:
      print_expr(e, out);
      return;
    case Op::Number:
      if (e.value() >= 0.0) {
        out += format_number(e.value());
        return;
      }
      break;
    default:
      break;
  }
  out += '(';
  print_expr(e, out);
  out += ')';
}

// Operand of '*' or '/'.
void print_factor(const Expression& e, std::string& out) {
  switch (e.op()) {
    case Op::Sum:
    case Op::Product:
      out += '(';
      print_expr(e, out);
      out += ')';
      return;
    case Op::Negate:
      out += '-';
      print_base(e.children()[0], out);
      return;
    default:
      print_expr(e, out);
  }
}

void print_product(std::span<const Expression> factors, std::string& out) {
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& f = factors[i];
    if (i > 0 && f.op() == Op::Power && f.exponent() == -1) {
      out += '/';
      print_factor(f.children()[0], out);
      continue;
    }
    if (i > 0) out += '*';
    print_factor(f, out);
  }
}

// A summand after the first: chooses "+ t" or "- t" so that the parser's
// folding of a subtracted literal or leading coefficient reproduces the node.
void print_summand(const Expression& t, std::string& out) {
  if (is_negative_number(t)) {
    out += " - ";
    out += format_number(-t.value());
    return;
  }
  if (has_negative_lead(t)) {
    out += " - ";
    std::vector<Expression> fs(t.children().begin(), t.children().end());
    fs[0] = Expression::number(-fs[0].value());
    print_product(fs, out);
    return;
  }
  if (t.op() == Op::Negate) {
    const auto& inner = t.children()[0];
    if (!inner.is_number() && !has_negative_lead(inner)) {
      out += " - ";
      if (inner.op() == Op::Sum) {
        out += '(';
        print_expr(inner, out);
        out += ')';
      } else {
        print_expr(inner, out);
      }
      return;
    }
  }
  out += " + ";
  if (t.op() == Op::Sum) {
    out += '(';
    print_expr(t, out);
    out += ')';
  } else {
    print_expr(t, out);
  }
}

void print_expr(const Expression& e, std::string& out) {
  switch (e.op()) {
    case Op::Number:
      out += format_number(e.value());
      return;
    case Op::Variable:
      out += 'z';
      out += std::to_string(e.index());
      return;
    case Op::Power:
      print_base(e.children()[0], out);
      out += '^';
      out += std::to_string(e.exponent());
      return;
    case Op::Function:
      out += func_name(e.func());
      out += '(';
      print_expr(e.children()[0], out);
      out += ')';
      return;
    case Op::Negate:
      out += '-';
      print_base(e.children()[0], out);
      return;
    case Op::Product:
      print_product(e.children(), out);
      return;
    case Op::Sum: {
      auto kids = e.children();
      if (kids[0].op() == Op::Sum) {
        out += '(';
        print_expr(kids[0], out);
        out += ')';
      } else {
        print_expr(kids[0], out);
      }
      for (std::size_t i = 1; i < kids.size(); ++i) print_summand(kids[i], out);
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expression& e) {
  std::string out;
  print_expr(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

double ipow(double base, int exponent) {
  if (exponent < 0) {
    if (base == 0.0) throw DomainError("division by zero");
    return 1.0 / ipow(base, -exponent);
  }
  double result = 1.0;
  unsigned e = static_cast<unsigned>(exponent);
  while (e != 0) {
    if (e & 1u) result *= base;
    e >>= 1;
    if (e != 0) base *= base;
  }
  return result;
}

namespace {

double eval_rec(const Expression& e, std::span<const double> p) {
  switch (e.op()) {
    case Op::Number:
      return e.value();
    case Op::Variable:
      return p[static_cast<std::size_t>(e.index() - 1)];
    case Op::Power:
      return ipow(eval_rec(e.children()[0], p), e.exponent());
    case Op::Negate:
      return -eval_rec(e.children()[0], p);
    case Op::Function: {
      double a = eval_rec(e.children()[0], p);
      switch (e.func()) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Exp: return std::exp(a);
        case Func::Log:
          if (!(a > 0.0)) throw DomainError("log of nonpositive value");
          return std::log(a);
      }
      return 0.0;
    }
    case Op::Sum: {
      double acc = 0.0;
      for (const auto& k : e.children()) acc += eval_rec(k, p);
      return acc;
    }
    case Op::Product: {
      double acc = 1.0;
      for (const auto& k : e.children()) acc *= eval_rec(k, p);
      return acc;
    }
  }
  return 0.0;
}

}  // namespace

double evaluate(const Expression& e, std::span<const double> p) {
  if (static_cast<std::size_t>(e.max_variable()) > p.size()) {
    throw DimensionError("point of length " + std::to_string(p.size()) +
                         " does not cover z" + std::to_string(e.max_variable()));
  }
  return eval_rec(e, p);
}

double fd_partial(const Expression& e, int index, std::span<const double> p, double h) {
  if (index < 1 || static_cast<std::size_t>(index) > p.size()) {
    throw DimensionError("coordinate z" + std::to_string(index) + " outside the point");
  }
  Point fwd(p.begin(), p.end());
  Point bwd(p.begin(), p.end());
  fwd[static_cast<std::size_t>(index - 1)] += h;
  bwd[static_cast<std::size_t>(index - 1)] -= h;
  return (evaluate(e, fwd) - evaluate(e, bwd)) / (2.0 * h);
}

// ---------------------------------------------------------------------------
// Differentiation and substitution

namespace {

Expression derive(const Expression& e, int i) {
  if (!e.depends_on(i)) return Expression::number(0.0);
  switch (e.op()) {
    case Op::Number:
      return Expression::number(0.0);
    case Op::Variable:
      return Expression::number(1.0);
    case Op::Negate:
      return Expression::negate(derive(e.children()[0], i));
    case Op::Sum: {
      std::vector<Expression> terms;
      for (const auto& k : e.children()) {
        if (k.depends_on(i)) terms.push_back(derive(k, i));
      }
      return Expression::sum(std::move(terms));
    }
    case Op::Product: {
      auto fs = e.children();
      std::vector<Expression> terms;
      for (std::size_t j = 0; j < fs.size(); ++j) {
        if (!fs[j].depends_on(i)) continue;
        std::vector<Expression> factors(fs.begin(), fs.end());
        factors[j] = derive(fs[j], i);
        terms.push_back(Expression::product(std::move(factors)));
      }
      return Expression::sum(std::move(terms));
    }
    case Op::Power: {
      const auto& b = e.children()[0];
      const int n = e.exponent();
      return Expression::product({Expression::number(n), Expression::power(b, n - 1), derive(b, i)});
    }
    case Op::Function: {
      const auto& a = e.children()[0];
      Expression da = derive(a, i);
      switch (e.func()) {
        case Func::Sin:
          return Expression::product({cos(a), da});
        case Func::Cos:
          return Expression::product({Expression::number(-1.0), sin(a), da});
        case Func::Exp:
          return Expression::product({e, da});
        case Func::Log:
          return Expression::product({da, Expression::power(a, -1)});
      }
    }
  }
  return Expression::number(0.0);
}

Expression subst_rec(const Expression& e, std::span<const Expression> values) {
  switch (e.op()) {
    case Op::Number:
      return e;
    case Op::Variable:
      return values[static_cast<std::size_t>(e.index() - 1)];
    case Op::Power:
      return Expression::power(subst_rec(e.children()[0], values), e.exponent());
    case Op::Negate:
      return Expression::negate(subst_rec(e.children()[0], values));
    case Op::Function:
      return Expression::apply(e.func(), subst_rec(e.children()[0], values));
    case Op::Sum:
    case Op::Product: {
      std::vector<Expression> kids;
      kids.reserve(e.children().size());
      for (const auto& k : e.children()) kids.push_back(subst_rec(k, values));
      return e.op() == Op::Sum ? Expression::sum(std::move(kids))
                               : Expression::product(std::move(kids));
    }
  }
  return e;
}

}  // namespace

Expression partial(const Expression& e, int index) {
  if (index < 1) throw std::invalid_argument("variable index must be positive");
  return simplify(derive(e, index));
}

Expression substitute(const Expression& e, std::span<const Expression> values) {
  if (static_cast<std::size_t>(e.max_variable()) > values.size()) {
    throw DimensionError("substitution does not cover z" + std::to_string(e.max_variable()));
  }
  return simplify(subst_rec(e, values));
}

}  // namespace extcalc
