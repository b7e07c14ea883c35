#pragma once

// Shared generators and numeric comparisons for the test binaries. The
// comparisons evaluate expressions one point at a time with evaluate(), not
// through the batch kernels, so they stay independent of the code under test.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "extcalc/errors.hpp"
#include "extcalc/expression.hpp"
#include "extcalc/form.hpp"
#include "extcalc/random.hpp"
#include "extcalc/smooth_map.hpp"

namespace testing {

using namespace extcalc;

inline Expression random_expr(int dim, SplitMix64& rng, int depth = 3) {
  RandomExpressionOptions o;
  o.dim = dim;
  o.max_depth = depth;
  return random_expression(o, rng);
}

/// A random expression that is not constant after simplification.
inline Expression random_nonconstant(int dim, SplitMix64& rng, int depth = 3) {
  while (true) {
    Expression e = simplify(random_expr(dim, rng, depth));
    if (e.max_variable() > 0) return e;
  }
}

/// Random form with non-constant coefficients on a random subset of the
/// standard tuples; never the zero form when k <= n.
inline DifferentialForm random_form(int n, int k, SplitMix64& rng, int depth = 2) {
  const auto keys = standard_tuples(n, k);
  DifferentialForm::Coefficients c;
  const std::size_t forced = keys.empty() ? 0 : rng.next() % keys.size();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i != forced && rng.unit() < 0.3) continue;
    c.emplace(keys[i], random_nonconstant(n, rng, depth));
  }
  return DifferentialForm(n, k, std::move(c));
}

/// Random polynomial map, so compositions and pullbacks stay cheap.
inline SmoothMap random_polynomial_map(int m, int n, SplitMix64& rng) {
  std::vector<Expression> comps;
  for (int i = 0; i < n; ++i) {
    Expression e = lit(rng.uniform_int(-2, 2));
    for (int t = 0; t < 3; ++t) {
      Expression mono = lit(rng.uniform_int(1, 3));
      const int factors = rng.uniform_int(1, 2);
      for (int f = 0; f < factors; ++f) mono = mono * z(rng.uniform_int(1, m));
      e = e + mono;
    }
    comps.push_back(simplify(e));
  }
  return SmoothMap(m, std::move(comps));
}

inline std::vector<Point> points(int dim, std::size_t count, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  SplitMix64 rng(seed);
  Box box(static_cast<std::size_t>(dim), {lo, hi});
  std::vector<Point> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(draw_point(box, rng));
  return out;
}

inline double scaled(double a, double b) { return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b))); }

/// Largest scaled coefficient difference of two forms over `pts`; points where
/// either side leaves its domain are skipped.
inline double form_residual(const DifferentialForm& a, const DifferentialForm& b, const std::vector<Point>& pts) {
  double worst = 0.0;
  for (const auto& p : pts) {
    std::map<IndexSet, double> va, vb;
    try {
      va = evaluate_form(a, p);
      vb = evaluate_form(b, p);
    } catch (const DomainError&) {
      continue;
    }
    std::set<IndexSet> keys;
    for (const auto& [k, v] : va) keys.insert(k);
    for (const auto& [k, v] : vb) keys.insert(k);
    for (const auto& k : keys) {
      const double x = va.count(k) ? va[k] : 0.0;
      const double y = vb.count(k) ? vb[k] : 0.0;
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      worst = std::max(worst, scaled(x, y));
    }
  }
  return worst;
}

/// True when the central difference with step h is trustworthy at p: the
/// roundoff bound eps·|f|/h plus the truncation bound h²·|∂³f|/6 stays below
/// a tenth of the comparison tolerance.
inline bool fd_well_conditioned(const Expression& e, int i, const Point& p, double h, double tol) {
  try {
    const double f = evaluate(e, p);
    const double d1 = evaluate(partial(e, i), p);
    const double d3 = evaluate(partial(partial(partial(e, i), i), i), p);
    if (!std::isfinite(f) || !std::isfinite(d1) || !std::isfinite(d3)) return false;
    const double bound = 2.3e-16 * std::abs(f) / h + h * h * std::abs(d3) / 6.0;
    return bound <= 0.1 * tol * (1.0 + std::abs(d1));
  } catch (const DomainError&) {
    return false;
  }
}

/// Cofactor expansion along the first row; independent of the Leibniz sum
/// in the library.
inline Expression cofactor_det(const std::vector<std::vector<Expression>>& m) {
  const std::size_t k = m.size();
  if (k == 0) return lit(1);
  if (k == 1) return m[0][0];
  std::vector<Expression> terms;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::vector<Expression>> sub;
    for (std::size_t r = 1; r < k; ++r) {
      std::vector<Expression> row;
      for (std::size_t cc = 0; cc < k; ++cc) {
        if (cc != c) row.push_back(m[r][cc]);
      }
      sub.push_back(std::move(row));
    }
    Expression t = m[0][c] * cofactor_det(sub);
    terms.push_back(c % 2 == 0 ? t : -t);
  }
  return Expression::sum(std::move(terms));
}

}  // namespace testing
