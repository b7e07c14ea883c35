#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "extcalc/errors.hpp"
#include "extcalc/smooth_map.hpp"
#include "extcalc/zero.hpp"
#include "support.hpp"

using namespace extcalc;
using testing::form_residual;

namespace {

SmoothMap M(const char* text, int m) { return parse_map(text, m); }
DifferentialForm F(const char* text, int n) { return parse_form(text, n); }

const SmoothMap& polar() {
  static const SmoothMap p = M("z1*cos(z2); z1*sin(z2)", 2);
  return p;
}

// Random map whose components mix polynomials with sin/exp, kept small
// enough for symbolic determinants.
SmoothMap random_map(int m, int n, SplitMix64& rng) {
  std::vector<Expression> c;
  for (int i = 0; i < n; ++i) c.push_back(testing::random_nonconstant(m, rng, 2));
  return SmoothMap(m, std::move(c));
}

}  // namespace

TEST_CASE("construction and printing") {
  CHECK_THROWS_AS(SmoothMap(1, {z(2)}), DimensionError);
  CHECK(to_string(polar()) == "x1 = z1*cos(z2); x2 = z1*sin(z2)");
  CHECK(parse_map(to_string(polar()), 2).components() == polar().components());
  CHECK(M("x1 = z1 + 1", 1).component(1) == simplify(parse("z1 + 1")));
  CHECK_THROWS_AS(M("z1; z3", 2), std::exception);
}

TEST_CASE("jacobian_matrix examples") {
  auto id = jacobian_matrix(SmoothMap::identity(2));
  CHECK(id(1, 1) == lit(1));
  CHECK(id(1, 2).is_zero());
  CHECK(id(2, 1).is_zero());
  CHECK(id(2, 2) == lit(1));

  auto j = jacobian_matrix(polar());
  CHECK(j(1, 1) == parse("cos(z2)"));
  CHECK(j(1, 2) == simplify(parse("-z1*sin(z2)")));
  CHECK(j(2, 1) == parse("sin(z2)"));
  CHECK(j(2, 2) == simplify(parse("z1*cos(z2)")));

  auto c = jacobian_matrix(M("3; 5", 2));
  for (int a = 1; a <= 2; ++a) {
    for (int b = 1; b <= 2; ++b) CHECK(c(a, b).is_zero());
  }
}

TEST_CASE("jacobian_minor examples") {
  CHECK(jacobian_minor(SmoothMap::identity(2), IndexSet{1, 2}, IndexSet{1, 2}) == lit(1));
  const Expression r = jacobian_minor(polar(), IndexSet{1, 2}, IndexSet{1, 2});
  CHECK(recognize_zero(std::vector<SignedSum>{SignedSum(r, z(1))}, 2).zero);
  CHECK(jacobian_minor(M("z1*z2; z2", 3), IndexSet{1, 2}, IndexSet{1, 3}).is_zero());
  CHECK_THROWS_AS(jacobian_minor(polar(), IndexSet{1}, IndexSet{1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(jacobian_minor(SmoothMap::identity(6), IndexSet{1, 2, 3, 4, 5, 6}, IndexSet{1, 2, 3, 4, 5, 6}),
                  std::invalid_argument);
  CHECK(jacobian_minor(SmoothMap::identity(5), IndexSet{1, 2, 3, 4, 5}, IndexSet{1, 2, 3, 4, 5}) == lit(1));
}

TEST_CASE("jacobian_minor matches cofactor expansion") {
  SplitMix64 rng(41);
  for (int t = 0; t < 40; ++t) {
    const int k = 1 + t % 4;
    const int m = rng.uniform_int(k, 5), n = rng.uniform_int(k, 5);
    const SmoothMap G = random_map(m, n, rng);
    const auto rows = standard_tuples(n, k)[rng.next() % standard_tuples(n, k).size()];
    const auto cols = standard_tuples(m, k)[rng.next() % standard_tuples(m, k).size()];
    std::vector<std::vector<Expression>> sub;
    for (int r : rows) {
      std::vector<Expression> row;
      for (int c : cols) row.push_back(partial(G.component(r), c));
      sub.push_back(std::move(row));
    }
    const Expression oracle = testing::cofactor_det(sub);
    const Expression got = jacobian_minor(G, rows, cols);
    double worst = 0;
    for (const auto& p : testing::points(m, 30, rng.next())) {
      worst = std::max(worst, testing::scaled(evaluate(got, p), evaluate(oracle, p)));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("pullback examples") {
  CHECK(pullback(M("z1^2; z2", 2), F("dz1", 2)) == F("2*z1 dz1", 2));
  const auto area = pullback(polar(), F("dz1^dz2", 2));
  REQUIRE(area.coefficients().size() == 1);
  CHECK(recognize_zero(std::vector<SignedSum>{SignedSum(area.coefficient(IndexSet{1, 2}), z(1))}, 2).zero);
  SplitMix64 rng(43);
  for (int t = 0; t < 20; ++t) {
    const int n = rng.uniform_int(1, 4);
    const auto w = testing::random_form(n, rng.uniform_int(0, n), rng);
    CHECK(pullback(SmoothMap::identity(n), w) == w);
  }
  CHECK_THROWS_AS(pullback(polar(), F("dz3", 3)), DimensionError);
  CHECK(pullback(M("z1; z1", 1), F("dz1^dz2", 2)).is_zero());
}

TEST_CASE("compose") {
  const SmoothMap G = M("z1*z2; z1 + z3", 3);
  CHECK(compose(SmoothMap::identity(2), G).components() == G.components());
  CHECK(compose(M("z1 + z2", 2), M("z1; z1", 1)).components() == std::vector<Expression>{simplify(parse("2*z1"))});
  CHECK_THROWS_AS(compose(G, G), DimensionError);

  // An expressible diffeomorphism pair on x1 > 0.
  const SmoothMap f = M("exp(z1); z2 + z1^3", 2);
  const SmoothMap finv = M("log(z1); z2 - log(z1)^3", 2);
  const SmoothMap round = compose(f, finv);
  for (const auto& p : testing::points(2, 50, 3, 0.2, 3.0)) {
    const Point q = round(p);
    CHECK(std::abs(q[0] - p[0]) <= 1e-12 * (1 + std::abs(p[0])));
    CHECK(std::abs(q[1] - p[1]) <= 1e-12 * (1 + std::abs(p[1])));
  }
}

TEST_CASE("pullback is functorial") {
  SplitMix64 rng(47);
  for (int t = 0; t < 30; ++t) {
    const int a = rng.uniform_int(1, 3), b = rng.uniform_int(1, 3), c = rng.uniform_int(1, 3);
    const SmoothMap Fm = testing::random_polynomial_map(b, c, rng);  // b -> c
    const SmoothMap Gm = random_map(a, b, rng);                      // a -> b
    const auto w = testing::random_form(c, rng.uniform_int(0, std::min(a, c)), rng);
    const auto lhs = pullback(Gm, pullback(Fm, w));
    const auto rhs = pullback(compose(Fm, Gm), w);
    CHECK(form_residual(lhs, rhs, testing::points(a, 30, rng.next())) <= 1e-8);
  }
}

TEST_CASE("pullback is linear and wedge-multiplicative") {
  SplitMix64 rng(53);
  for (int t = 0; t < 30; ++t) {
    const int m = rng.uniform_int(1, 4), n = rng.uniform_int(1, 4);
    const SmoothMap G = random_map(m, n, rng);
    const auto a = testing::random_form(n, rng.uniform_int(0, 2), rng);
    const auto b = testing::random_form(n, rng.uniform_int(0, 2), rng);
    const auto pts = testing::points(m, 30, rng.next());
    CHECK(form_residual(pullback(G, wedge(a, b)), wedge(pullback(G, a), pullback(G, b)), pts) <= 1e-8);
    const auto c = testing::random_form(n, a.degree(), rng);
    CHECK(form_residual(pullback(G, linear_combine(2, a, -3, c)),
                        linear_combine(2, pullback(G, a), -3, pullback(G, c)), pts) <= 1e-8);
  }
}

TEST_CASE("pullback commutes with d") {
  SplitMix64 rng(59);
  int nonzero = 0;
  for (int t = 0; t < 50; ++t) {
    const int m = rng.uniform_int(2, 4), n = rng.uniform_int(2, 4);
    const SmoothMap G = random_map(m, n, rng);
    const auto w = testing::random_form(n, rng.uniform_int(0, std::min(m, n) - 1), rng);
    const auto lhs = pullback(G, exterior_derivative(w));
    const auto rhs = exterior_derivative(pullback(G, w));
    nonzero += !lhs.is_zero();
    CHECK(form_residual(lhs, rhs, testing::points(m, 40, rng.next())) <= 1e-8);
  }
  CHECK(nonzero >= 40);
}
