#pragma once

// Scalar expressions in the variables z1..zn: parsing, printing, exact
// symbolic differentiation, simplification and point evaluation.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace extcalc {

enum class Op : std::uint8_t { Number, Variable, Power, Function, Product, Sum, Negate };
enum class Func : std::uint8_t { Sin, Cos, Exp, Log };

std::string_view func_name(Func f);

/// Coordinates of an evaluation site; entry i-1 is the value of z<i>.
using Point = std::vector<double>;

/// Immutable expression tree. Copies share nodes; equality is structural.
///
/// Sums and products are n-ary. Subtraction is represented as a negated
/// summand and division as a factor raised to the power -1, so the printer
/// and the parser agree on one shape for every canonical tree.
class Expression {
 public:
  /// The zero literal.
  Expression();

  static Expression number(double v);
  static Expression variable(int index);
  static Expression sum(std::vector<Expression> terms);
  static Expression product(std::vector<Expression> factors);
  static Expression power(Expression base, int exponent);
  static Expression negate(Expression e);
  static Expression apply(Func f, Expression arg);

  Op op() const;
  double value() const;    // Number
  int index() const;       // Variable
  int exponent() const;    // Power
  Func func() const;       // Function
  std::span<const Expression> children() const;

  /// Largest variable index referenced, 0 for constants.
  int max_variable() const;
  bool depends_on(int index) const;
  std::size_t node_count() const;
  std::size_t hash() const;

  bool is_number() const { return op() == Op::Number; }
  bool is_number(double v) const { return is_number() && value() == v; }
  bool is_zero() const { return is_number(0.0); }

  /// Identity of the shared node, used to deduplicate evaluation work.
  const void* id() const { return node_.get(); }

  friend bool operator==(const Expression& a, const Expression& b);
  friend std::strong_ordering operator<=>(const Expression& a, const Expression& b);

 private:
  struct Node;
  explicit Expression(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expression make(Node n);

  std::shared_ptr<const Node> node_;
};

// Raw constructors for building trees in code. They do not simplify.
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression pow(const Expression& base, int exponent);
Expression sin(const Expression& e);
Expression cos(const Expression& e);
Expression exp(const Expression& e);
Expression log(const Expression& e);
inline Expression z(int index) { return Expression::variable(index); }
inline Expression lit(double v) { return Expression::number(v); }

/// Parses a complete expression. Throws ParseError.
Expression parse(std::string_view text);

/// Parses the longest expression starting at `pos` and advances `pos` past it
/// (and past trailing whitespace). Used by the form and manifest readers.
Expression parse_prefix(std::string_view text, std::size_t& pos);

/// Canonical printer; parse(to_string(e)) == e for simplified trees.
std::string to_string(const Expression& e);

/// Shortest round-tripping decimal representation.
std::string format_number(double v);

/// Recursive evaluation. Throws DimensionError if `p` does not cover the
/// variables of `e` and DomainError on ÷0 or log of a nonpositive value.
double evaluate(const Expression& e, std::span<const double> p);

/// Exact partial derivative with respect to z<index>, simplified.
Expression partial(const Expression& e, int index);

/// Semantics-preserving normalization: flattening, constant folding, like-term
/// and like-base collection, numeric coefficients distributed over a lone sum.
/// Idempotent.
Expression simplify(const Expression& e);

/// simplify plus full distribution of products over sums and of positive
/// integer powers of sums. Returns nullopt when the expansion would exceed
/// `max_terms` summands.
std::optional<Expression> expand(const Expression& e, std::size_t max_terms = 20000);

/// Replaces z<i> by values[i-1] and simplifies. Variables beyond values.size()
/// are a DimensionError.
Expression substitute(const Expression& e, std::span<const Expression> values);

/// Central difference (e(p + h e_i) - e(p - h e_i)) / 2h.
double fd_partial(const Expression& e, int index, std::span<const double> p, double h);

/// Integer power by repeated squaring; shared by every evaluation path.
double ipow(double base, int exponent);

}  // namespace extcalc
