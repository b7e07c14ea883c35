#include <cctype>
#include <charconv>

#include "extcalc/errors.hpp"
#include "extcalc/expression.hpp"

namespace extcalc {

namespace {

// Subtracted literals and leading coefficients fold into the literal so the
// printer's " - 2*z1" reads back as the product with coefficient -2.
Expression negate_folding(const Expression& e) {
  if (e.is_number()) return Expression::number(-e.value());
  if (e.op() == Op::Product && e.children()[0].is_number()) {
    std::vector<Expression> fs(e.children().begin(), e.children().end());
    fs[0] = Expression::number(-fs[0].value());
    return Expression::product(std::move(fs));
  }
  return Expression::negate(e);
}

class Parser {
 public:
  Parser(std::string_view text, std::size_t pos) : text_(text), pos_(pos) {}

  std::size_t pos() const { return pos_; }

  Expression expr() {
    std::vector<Expression> terms;
    terms.push_back(term());
    while (true) {
      skip_ws();
      if (peek() == '+') {
        ++pos_;
        terms.push_back(term());
      } else if (peek() == '-') {
        ++pos_;
        terms.push_back(negate_folding(term()));
      } else {
        break;
      }
    }
    return Expression::sum(std::move(terms));
  }

 private:
  Expression term() {
    std::vector<Expression> factors;
    factors.push_back(factor());
    while (true) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        factors.push_back(factor());
      } else if (peek() == '/') {
        ++pos_;
        factors.push_back(Expression::power(factor(), -1));
      } else {
        break;
      }
    }
    return Expression::product(std::move(factors));
  }

  Expression factor() {
    Expression b = base();
    skip_ws();
    if (peek() != '^') return b;
    ++pos_;
    skip_ws();
    const std::size_t start = pos_;
    bool negative = false;
    if (peek() == '-' || peek() == '+') {
      negative = peek() == '-';
      ++pos_;
    }
    if (!std::isdigit(static_cast<unsigned char>(peek()))) {
      throw ParseError("expected integer exponent", start);
    }
    long long v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 1000000) throw ParseError("exponent out of range", start);
      ++pos_;
    }
    return Expression::power(std::move(b), static_cast<int>(negative ? -v : v));
  }

  Expression base() {
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return negate_folding(base());
    }
    if (c == '(') {
      ++pos_;
      Expression inner = expr();
      skip_ws();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) ++end;
      std::string_view word = text_.substr(pos_, end - pos_);
      if (word == "z" && end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) {
        pos_ = end;
        long long idx = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
          idx = idx * 10 + (text_[pos_] - '0');
          if (idx > 1000000) throw ParseError("variable index out of range", start);
          ++pos_;
        }
        if (idx == 0) throw ParseError("variable index 0", start);
        return Expression::variable(static_cast<int>(idx));
      }
      static constexpr Func funcs[] = {Func::Sin, Func::Cos, Func::Exp, Func::Log};
      for (Func f : funcs) {
        if (word == func_name(f)) {
          pos_ = end;
          skip_ws();
          expect('(');
          Expression arg = expr();
          skip_ws();
          expect(')');
          return Expression::apply(f, std::move(arg));
        }
      }
      throw ParseError("unknown function name '" + std::string(word) + "'", start);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }

  Expression number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    auto digit = [&](std::size_t i) {
      return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
    };
    while (digit(end)) ++end;
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      while (digit(end)) ++end;
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
      if (digit(e)) {
        end = e;
        while (digit(end)) ++end;
      }
    }
    double v = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + end, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + end) {
      throw ParseError("malformed number", start);
    }
    pos_ = end;
    return Expression::number(v);
  }

  void expect(char c) {
    if (pos_ >= text_.size()) {
      throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
    }
    if (text_[pos_] != c) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_;
};

}  // namespace

Expression parse_prefix(std::string_view text, std::size_t& pos) {
  Parser p(text, pos);
  Expression e = p.expr();
  pos = p.pos();
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  return e;
}

Expression parse(std::string_view text) {
  std::size_t pos = 0;
  Expression e = parse_prefix(text, pos);
  if (pos != text.size()) throw ParseError("unexpected input", pos);
  return e;
}

}  // namespace extcalc
