#include "extcalc/manifest.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "extcalc/errors.hpp"

namespace extcalc {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

// Cursor over one line.
class Cursor {
 public:
  Cursor(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const { throw ManifestError(line_, what); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool done() {
    skip();
    return pos_ >= s_.size();
  }
  bool accept(std::string_view tok) {
    skip();
    if (s_.substr(pos_, tok.size()) != tok) return false;
    // keywords must not run into a following identifier
    if (std::isalpha(static_cast<unsigned char>(tok.back())) && pos_ + tok.size() < s_.size()) {
      char next = s_[pos_ + tok.size()];
      if (std::isalnum(static_cast<unsigned char>(next)) || next == '_') return false;
    }
    pos_ += tok.size();
    return true;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }
  std::string name() {
    skip();
    std::size_t b = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    std::string out(s_.substr(b, pos_ - b));
    if (!is_name(out)) fail("expected a name");
    return out;
  }
  int integer() {
    skip();
    int v = 0;
    auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("expected an integer");
    pos_ = static_cast<std::size_t>(p - s_.data());
    return v;
  }
  double number() {
    skip();
    double v = 0;
    auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(p - s_.data());
    return v;
  }
  Expression expression() {
    skip();
    std::string_view rest = s_.substr(pos_);
    std::size_t used = 0;
    try {
      Expression e = parse_prefix(rest, used);
      pos_ += used;
      return e;
    } catch (const ParseError& e) {
      fail("expression: " + e.detail());
    }
  }
  std::string rest() {
    skip();
    std::string out(s_.substr(pos_));
    pos_ = s_.size();
    return out;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

template <class T>
const T& lookup(const std::map<std::string, T>& m, const std::string& name, const char* what) {
  auto it = m.find(name);
  if (it == m.end()) throw ReferenceError(std::string("unknown ") + what + " '" + name + "'");
  return it->second;
}

class Reader {
 public:
  Manifest run(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++line_no;
      std::string_view raw = text.substr(start, end - start);
      if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      std::string line = trim(raw);
      if (!line.empty()) handle(line, line_no);
      start = end + 1;
    }
    return std::move(m_);
  }

 private:
  void handle(const std::string& line, std::size_t no) {
    if (line.front() == '[') {
      if (line.back() != ']') throw ManifestError(no, "unterminated section header");
      section_ = trim(std::string_view(line).substr(1, line.size() - 2));
      static const char* known[] = {"dim", "scalar", "form", "map", "chart", "transition", "atlasform"};
      for (const char* k : known) {
        if (section_ == k) return;
      }
      throw ManifestError(no, "unknown section [" + section_ + "]");
    }
    Cursor c(line, no);
    try {
      if (section_.empty()) c.fail("entry outside any section");
      if (section_ == "dim") return dim(c);
      if (section_ == "scalar") return scalar(c);
      if (section_ == "form") return form(c);
      if (section_ == "map") return map(c);
      if (section_ == "chart") return chart(c);
      if (section_ == "transition") return transition(c);
      return atlas_form(c);
    } catch (const ManifestError&) {
      throw;
    } catch (const ParseError& e) {
      throw ManifestError(no, e.what());
    } catch (const std::exception& e) {
      throw ManifestError(no, e.what());
    }
  }

  void fresh(Cursor& c, const std::string& name, bool taken) {
    if (taken) c.fail("duplicate name '" + name + "'");
  }

  int require_dim(Cursor& c) {
    if (m_.dim < 1) c.fail("no [dim] given");
    return m_.dim;
  }

  void dim(Cursor& c) {
    c.expect("n");
    c.expect("=");
    int n = c.integer();
    if (!c.done()) c.fail("trailing text after dimension");
    if (n < 1) c.fail("dimension must be >= 1");
    m_.dim = n;
  }

  void scalar(Cursor& c) {
    std::string name = c.name();
    fresh(c, name, m_.scalars.count(name) || m_.forms.count(name));
    c.expect("=");
    Expression e = c.expression();
    if (!c.done()) c.fail("trailing text after expression");
    int n = require_dim(c);
    if (e.max_variable() > n) c.fail("scalar '" + name + "' uses a coordinate beyond z" + std::to_string(n));
    m_.scalars.emplace(name, simplify(e));
  }

  void form(Cursor& c) {
    std::string name = c.name();
    fresh(c, name, m_.scalars.count(name) || m_.forms.count(name));
    std::optional<int> degree;
    int n = 0;
    if (c.accept("(")) {
      n = c.integer();
      c.expect(",");
      degree = c.integer();
      c.expect(")");
    } else {
      n = require_dim(c);
    }
    c.expect("=");
    std::string body = c.rest();
    if (body.empty()) c.fail("missing form after '='");
    m_.forms.emplace(name, parse_form(body, n, degree));
  }

  void map(Cursor& c) {
    std::string name = c.name();
    fresh(c, name, m_.maps.count(name) > 0);
    c.expect("(");
    int m = c.integer();
    std::optional<int> target;
    if (c.accept("->")) target = c.integer();
    c.expect(")");
    c.expect("=");
    SmoothMap F = parse_map(c.rest(), m);
    if (target && F.target_dim() != *target) {
      c.fail("map '" + name + "' has " + std::to_string(F.target_dim()) + " components, declared " +
             std::to_string(*target));
    }
    m_.maps.emplace(name, std::move(F));
  }

  void chart(Cursor& c) {
    Chart ch;
    ch.name = c.name();
    fresh(c, ch.name, m_.charts.count(ch.name) > 0);
    c.expect("(");
    ch.dim = c.integer();
    c.expect(")");
    c.expect("box");
    do {
      c.expect("[");
      double lo = c.number();
      c.expect(",");
      double hi = c.number();
      c.expect("]");
      ch.box.emplace_back(lo, hi);
    } while (c.accept("x"));
    while (c.accept("guard")) {
      Guard g;
      g.expr = simplify(c.expression());
      c.expect(">=");
      g.min_abs = c.number();
      ch.guards.push_back(std::move(g));
    }
    if (!c.done()) c.fail("trailing text in chart '" + ch.name + "'");
    ch.validate();
    m_.charts.emplace(ch.name, std::move(ch));
  }

  void transition(Cursor& c) {
    std::string name = c.name();
    fresh(c, name, m_.transitions.count(name) > 0);
    c.expect(":");
    std::string from_name = c.name();
    c.expect("->");
    std::string to_name = c.name();
    c.expect("by");
    std::string fwd = c.name();
    const Chart& from = lookup(m_.charts, from_name, "chart");
    const Chart& to = lookup(m_.charts, to_name, "chart");
    Transition t{name, from_name, to_name, lookup(m_.maps, fwd, "map"), std::nullopt};
    if (t.forward.source_dim() != from.dim || t.forward.target_dim() != to.dim) {
      c.fail("map '" + fwd + "' does not go from chart " + t.from + " to chart " + t.to);
    }
    if (c.accept("inverse")) {
      std::string inv = c.name();
      t.inverse = lookup(m_.maps, inv, "map");
      if (t.inverse->source_dim() != to.dim || t.inverse->target_dim() != from.dim) {
        c.fail("map '" + inv + "' does not go from chart " + t.to + " to chart " + t.from);
      }
    }
    if (!c.done()) c.fail("trailing text in transition '" + t.name + "'");
    m_.transitions.emplace(t.name, std::move(t));
  }

  void atlas_form(Cursor& c) {
    AtlasForm af;
    af.name = c.name();
    fresh(c, af.name, m_.atlas_forms.count(af.name) > 0);
    c.expect("=");
    bool first = true;
    do {
      std::string chart_name = c.name();
      const Chart& ch = lookup(m_.charts, chart_name, "chart");
      c.expect(":");
      DifferentialForm w = m_.form(c.name());
      if (c.accept("via")) {
        const Transition& t = lookup(m_.transitions, c.name(), "transition");
        if (t.from != chart_name) c.fail("transition " + t.name + " does not start on chart " + chart_name);
        w = transform_coefficients(w, t);
      }
      if (w.dim() != ch.dim) c.fail("form on chart " + chart_name + " has the wrong dimension");
      if (first) af.degree = w.degree();
      if (w.degree() != af.degree) c.fail("atlas form '" + af.name + "' mixes degrees");
      if (!af.charts.emplace(chart_name, std::move(w)).second) c.fail("chart " + chart_name + " given twice");
      first = false;
    } while (c.accept(","));
    if (!c.done()) c.fail("trailing text in atlas form '" + af.name + "'");
    m_.atlas_forms.emplace(af.name, std::move(af));
  }

  Manifest m_;
  std::string section_;
};

}  // namespace

DifferentialForm Manifest::form(const std::string& name) const {
  if (auto it = forms.find(name); it != forms.end()) return it->second;
  if (auto it = scalars.find(name); it != scalars.end()) return DifferentialForm::function(dim, it->second);
  throw ReferenceError("unknown form '" + name + "'");
}

const SmoothMap& Manifest::map(const std::string& name) const { return lookup(maps, name, "map"); }
const Chart& Manifest::chart(const std::string& name) const { return lookup(charts, name, "chart"); }
const Transition& Manifest::transition(const std::string& name) const {
  return lookup(transitions, name, "transition");
}
const AtlasForm& Manifest::atlas_form(const std::string& name) const {
  return lookup(atlas_forms, name, "atlas form");
}

Manifest parse_manifest(std::string_view text) { return Reader().run(text); }

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError(0, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

}  // namespace extcalc
