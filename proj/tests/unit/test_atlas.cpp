#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "extcalc/atlas.hpp"
#include "extcalc/errors.hpp"
#include "extcalc/zero.hpp"
#include "support.hpp"

using namespace extcalc;

namespace {

DifferentialForm F(const char* text, int n) { return parse_form(text, n); }

Chart cartesian() { return Chart{"cart", 2, {{-2, 2}, {-2, 2}}, {}}; }
Chart polar_chart() { return Chart{"pol", 2, {{0.1, 1.4}, {-3, 3}}, {Guard{z(1), 0.1}}}; }
Transition polar() { return Transition{"pc", "pol", "cart", parse_map("z1*cos(z2); z1*sin(z2)", 2), std::nullopt}; }

AtlasForm atlas(const DifferentialForm& u, const DifferentialForm& v) {
  return AtlasForm{"omega", u.degree(), {{"cart", u}, {"pol", v}}};
}

bool zero_form(const DifferentialForm& w) {
  for (const auto& [key, c] : w.coefficients()) {
    if (!recognize_zero(c, w.dim()).zero) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("charts") {
  CHECK(polar_chart().admits(std::vector<double>{0.5, 1.0}));
  CHECK_FALSE(polar_chart().admits(std::vector<double>{0.05, 1.0}));
  CHECK_FALSE(polar_chart().admits(std::vector<double>{0.5, 4.0}));
  CHECK_FALSE(polar_chart().admits(std::vector<double>{0.5}));
  Chart guarded{"g", 1, {{-1, 1}}, {Guard{z(1), 0.5}}};
  CHECK_FALSE(guarded.admits(std::vector<double>{0.2}));
  CHECK(guarded.admits(std::vector<double>{-0.7}));
  CHECK_THROWS_AS((Chart{"bad", 2, {{0, 1}}, {}}.validate()), DimensionError);
  CHECK_THROWS_AS((Chart{"bad", 1, {{1, 0}}, {}}.validate()), DimensionError);
  CHECK_THROWS_AS((Chart{"bad", 0, {}, {}}.validate()), DimensionError);
}

TEST_CASE("transform_coefficients examples") {
  const auto w = transform_coefficients(F("dz1", 2), polar());
  CHECK(w == F("cos(z2) dz1 - z1*sin(z2) dz2", 2));
  const Transition id{"id", "a", "b", SmoothMap::identity(3), std::nullopt};
  const auto u = F("z1*z2 dz1^dz3 + exp(z3) dz2^dz3", 3);
  CHECK(transform_coefficients(u, id) == u);
  CHECK(transform_coefficients(DifferentialForm(2, 1), polar()).is_zero());
  CHECK_THROWS_AS(transform_coefficients(F("dz1", 3), polar()), DimensionError);
}

TEST_CASE("decomposition examples") {
  // constant coefficients: I vanishes, II vanishes by the identity
  const auto c = decompose_I_II(F("3 dz1 + 2 dz2", 2), polar());
  CHECK(c.I.is_zero());
  CHECK(zero_form(c.II));

  // x1 dx2: II vanishes, I is the pullback of dx1 ^ dx2
  const auto d = decompose_I_II(F("z1 dz2", 2), polar());
  CHECK(zero_form(d.II));
  const auto area = pullback(polar().forward, F("dz1^dz2", 2));
  CHECK(testing::form_residual(d.I, area, testing::points(2, 50, 9, 0.1, 1.4)) <= 1e-12);
  CHECK(testing::form_residual(d.I, F("z1 dz1^dz2", 2), testing::points(2, 50, 9, 0.1, 1.4)) <= 1e-12);

  // identity: minors are constants so II is structurally zero
  const Transition id{"id", "a", "b", SmoothMap::identity(3), std::nullopt};
  const auto e = decompose_I_II(F("z1*z2 dz3 + sin(z1) dz2", 3), id);
  CHECK(e.II.is_zero());
  CHECK(e.II_terms.empty());
}

TEST_CASE("I + II is d of the pullback, exactly") {
  SplitMix64 rng(79);
  for (int t = 0; t < 20; ++t) {
    const int m = rng.uniform_int(2, 4), n = rng.uniform_int(2, 4);
    const Transition tr{"t", "v", "u", testing::random_polynomial_map(m, n, rng), std::nullopt};
    const auto w = testing::random_form(n, rng.uniform_int(0, std::min(m, n) - 1), rng);
    const SplitCheck s = check_split_exact(w, tr);
    CHECK(s.expanded);
    CHECK(s.exact);
    CHECK(zero_form(decompose_I_II(w, tr).II));
  }
  // transcendental transitions expand with function atoms kept whole
  const auto s = check_split_exact(F("z1*z2 dz1 + z2^2 dz2", 2), polar());
  CHECK(s.exact);
}

TEST_CASE("check_well_defined on the polar atlas") {
  const auto u = F("z1 dz2", 2);
  const auto v = F("z1*cos(z2)*sin(z2) dz1 + z1^2*cos(z2)^2 dz2", 2);
  ConsistencyOptions o;
  o.samples = 200;
  const auto good = check_well_defined(atlas(u, v), polar(), polar_chart(), cartesian(), o);
  CHECK(good.pass);
  CHECK(good.samples == 200);
  CHECK(good.max_residual <= 1e-8);
  CHECK(good.ii_residual <= 1e-8);

  const auto bad_v = F("z1*cos(z2)*sin(z2) dz1 + (z1^2*cos(z2)^2 + z1) dz2", 2);
  const auto bad = check_well_defined(atlas(u, bad_v), polar(), polar_chart(), cartesian(), o);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_residual >= 0.09);

  // same report for the same seed
  const auto again = check_well_defined(atlas(u, bad_v), polar(), polar_chart(), cartesian(), o);
  CHECK(again.max_residual == bad.max_residual);
  CHECK(to_text(again) == to_text(bad));
}

TEST_CASE("0-forms related by substitution") {
  const auto u = DifferentialForm::function(2, parse("z1^2 + z2"));
  const auto v = DifferentialForm::function(2, parse("z1^2*cos(z2)^2 + z1*sin(z2)"));
  const auto r = check_well_defined(atlas(u, v), polar(), polar_chart(), cartesian());
  CHECK(r.pass);
  CHECK(r.degree == 1);
}

TEST_CASE("forms generated by transport are consistent") {
  SplitMix64 rng(83);
  const Chart box3{"u", 3, {{-2, 2}, {-2, 2}, {-2, 2}}, {}};
  const Chart cube{"v", 3, {{-1, 1}, {-1, 1}, {-1, 1}}, {}};
  for (int t = 0; t < 10; ++t) {
    std::vector<Expression> comps;
    for (int i = 1; i <= 3; ++i) comps.push_back(simplify(z(i) + lit(0.3) * sin(testing::random_nonconstant(3, rng, 2))));
    const Transition tr{"t", "v", "u", SmoothMap(3, comps), std::nullopt};
    const auto w = testing::random_form(3, rng.uniform_int(0, 2), rng);
    const AtlasForm af{"w", w.degree(), {{"u", w}, {"v", transform_coefficients(w, tr)}}};
    ConsistencyOptions o;
    o.seed = rng.next();
    o.samples = 50;
    const auto r = check_well_defined(af, tr, cube, box3, o);
    CHECK(r.pass);
  }
}

TEST_CASE("error paths") {
  const auto u = F("z1 dz2", 2);
  const AtlasForm only_u{"omega", 1, {{"cart", u}}};
  CHECK_THROWS_AS(check_well_defined(only_u, polar(), polar_chart(), cartesian()), ReferenceError);
  ConsistencyOptions zero;
  zero.samples = 0;
  CHECK_THROWS_AS(check_well_defined(atlas(u, u), polar(), polar_chart(), cartesian(), zero), std::invalid_argument);
  // the polar image of this chart misses the target box entirely
  const Chart far{"far", 2, {{100, 101}, {100, 101}}, {}};
  CHECK_THROWS_AS(check_well_defined(atlas(u, u), polar(), polar_chart(), far), SamplingError);
}

TEST_CASE("round trip through an inverse") {
  const Transition t{"el", "v", "u", parse_map("exp(z1); z2 + z1^3", 2), parse_map("log(z1); z2 - log(z1)^3", 2)};
  const Chart v{"v", 2, {{-1, 1}, {-2, 2}}, {}};
  const Chart u{"u", 2, {{0.3, 2.5}, {-3, 3}}, {}};
  CHECK(round_trip_residual(t, v, u, 100, 5) <= 1e-8);

  SplitMix64 rng(89);
  for (int i = 0; i < 10; ++i) {
    const auto w_u = testing::random_form(2, rng.uniform_int(0, 2), rng);
    const auto w_v = transform_coefficients(w_u, t);
    const auto back = pullback(*t.inverse, w_v);
    std::vector<Point> pts;
    for (const auto& p : testing::points(2, 60, rng.next(), 0.4, 2.5)) {
      if (v.admits((*t.inverse)(p))) pts.push_back(p);
    }
    CHECK(pts.size() > 10);
    CHECK(testing::form_residual(back, w_u, pts) <= 1e-8);
  }
}

TEST_CASE("report formats") {
  const auto u = F("z1 dz2", 2);
  const auto r = check_well_defined(atlas(u, transform_coefficients(u, polar())), polar(), polar_chart(), cartesian());
  const auto j = to_json(r);
  CHECK(j["seed"] == 1);
  CHECK(j["verdict"] == "pass");
  CHECK(j["residuals"].size() == 1);
  CHECK(j["residuals"][0]["key"] == "(1,2)");
  CHECK(to_text(r).find("verdict: pass") != std::string::npos);
}
