#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "extcalc/lemma.hpp"
#include "extcalc/zero.hpp"
#include "support.hpp"

using namespace extcalc;

namespace {

std::vector<Expression> phis(std::initializer_list<const char*> texts) {
  std::vector<Expression> out;
  for (const char* t : texts) out.push_back(simplify(parse(t)));
  return out;
}

std::vector<Expression> random_phis(int n, int k, SplitMix64& rng) {
  std::vector<Expression> out;
  for (int i = 0; i < k; ++i) out.push_back(testing::random_nonconstant(n, rng, 3));
  return out;
}

bool zero_form(const DifferentialForm& w) {
  for (const auto& [key, c] : w.coefficients()) {
    if (!recognize_zero(c, w.dim()).zero) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("term counts") {
  CHECK(expand_lemma_terms(phis({"z1*z2*z3"}), 3).size() == 6);
  CHECK(expand_lemma_terms(phis({"z1", "z2", "z3"}), 3).empty());
  CHECK(expand_lemma_terms(phis({"z1*z3", "z2*z4"}), 4).size() == 24);
  CHECK_THROWS_AS(expand_lemma_terms(phis({"z1", "z2", "z1"}), 2), std::invalid_argument);
  CHECK_THROWS_AS(expand_lemma_terms(phis({"z1", "z2", "z3", "z4", "z5"}), 6), std::invalid_argument);
  CHECK_THROWS_AS(expand_lemma_terms({}, 3), std::invalid_argument);
  SplitMix64 rng(61);
  for (int n = 1; n <= 6; ++n) {
    for (int k = 1; k <= std::min(n, 4); ++k) {
      const auto terms = expand_lemma_terms(random_phis(n, k, rng), n);
      CHECK(terms.size() == static_cast<std::size_t>(k * (n - k)) * binomial(n, k));
    }
  }
}

TEST_CASE("terms carry the bookkeeping of the expansion") {
  SplitMix64 rng(67);
  for (int n = 2; n <= 5; ++n) {
    for (int k = 1; k <= std::min(n - 1, 3); ++k) {
      const auto ph = random_phis(n, k, rng);
      const auto terms = expand_lemma_terms(ph, n);
      for (const auto& t : terms) {
        // sign = (-1)^(p+q-2) with q the position of s in the sorted union
        const int q = t.key.position_of(t.pair.s);
        CHECK(q == t.q);
        CHECK(t.sign == ((t.p + t.q) % 2 == 0 ? 1 : -1));
        CHECK(t.key == t.pair.J.with(t.pair.s));
        // value against a cofactor expansion of the explicit matrix
        std::vector<std::vector<Expression>> m;
        const int jp = t.pair.J[static_cast<std::size_t>(t.p - 1)];
        for (int i = 0; i < k; ++i) {
          std::vector<Expression> row{partial(partial(ph[static_cast<std::size_t>(i)], jp), t.pair.s)};
          for (int r = 1; r <= k; ++r) {
            if (r != t.p) row.push_back(partial(ph[static_cast<std::size_t>(i)], t.pair.J[static_cast<std::size_t>(r - 1)]));
          }
          m.push_back(std::move(row));
        }
        const Expression oracle = testing::cofactor_det(m);
        for (const auto& p : testing::points(n, 5, rng.next())) {
          CHECK(testing::scaled(evaluate(t.value, p), evaluate(oracle, p)) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("pairing in the smallest cases") {
  auto ts = expand_lemma_terms(phis({"z1*z2*z3"}), 3);
  auto m = pair_terms(ts, 3);
  REQUIRE(m.size() == 3);
  // (s=1, J=(2)) pairs with (s=2, J=(1)) on (1,2)
  CHECK(ts[m[0].first].pair == PairSJ{1, IndexSet{2}});
  CHECK(ts[m[0].second].pair == PairSJ{2, IndexSet{1}});
  CHECK(ts[m[0].first].key == IndexSet{1, 2});
  CHECK(ts[m[0].first].sign == -ts[m[0].second].sign);

  auto two = expand_lemma_terms(phis({"z1*z2"}), 2);
  REQUIRE(two.size() == 2);
  CHECK(simplify(two[0].value) == lit(1));
  CHECK(simplify(two[1].value) == lit(1));
  CHECK(two[0].sign == -two[1].sign);
  CHECK(two[0].key == IndexSet{1, 2});
}

TEST_CASE("pair_terms yields a perfect matching") {
  SplitMix64 rng(71);
  for (int n = 2; n <= 6; ++n) {
    for (int k = 1; k <= std::min(n - 1, 4); ++k) {
      const auto terms = expand_lemma_terms(random_phis(n, k, rng), n);
      LemmaCheckOptions o;
      o.seed = rng.next();
      const auto m = pair_terms(terms, n, o);
      CHECK(m.size() * 2 == terms.size());
      std::vector<int> used(terms.size(), 0);
      for (const auto& c : m) {
        ++used[c.first];
        ++used[c.second];
        CHECK(c.ok());
      }
      CHECK(std::all_of(used.begin(), used.end(), [](int u) { return u == 1; }));
    }
  }
}

TEST_CASE("a tampered term breaks its pair") {
  auto ts = expand_lemma_terms(phis({"z1^2*z2 + sin(z3)", "z2*z3"}), 3);
  ts[0].value = ts[0].value + z(1);
  const auto m = pair_terms(ts, 3);
  int bad = 0;
  for (const auto& c : m) bad += !c.values_equal;
  CHECK(bad == 1);
  ts[1].sign = -ts[1].sign;
  int sign_bad = 0;
  for (const auto& c : pair_terms(ts, 3)) sign_bad += !c.opposite_sign;
  CHECK(sign_bad == 1);
}

TEST_CASE("lemma sum vanishes") {
  const auto a = lemma_sum(phis({"z1^2*z2 + sin(z3)"}), 3);
  CHECK(a.degree() == 2);
  CHECK(zero_form(a));
  CHECK(zero_form(lemma_sum(phis({"z1*z3", "z2*z4"}), 4)));
  CHECK(lemma_sum(phis({"exp(z1)", "z1*z2"}), 2).is_zero());
}

TEST_CASE("assembled and direct sums agree on random instances") {
  SplitMix64 rng(73);
  int passed = 0;
  for (int t = 0; t < 60; ++t) {
    const int n = rng.uniform_int(2, 5);
    const int k = rng.uniform_int(1, std::min(n, 4));
    const auto ph = random_phis(n, k, rng);
    LemmaCheckOptions o;
    o.seed = rng.next();
    const LemmaReport r = verify_lemma(ph, n, o);
    CHECK(r.term_count == static_cast<std::size_t>(k) * r.pairs_sj);
    CHECK(r.path_residual <= 1e-9);
    passed += r.pass;
    const auto assembled = lemma_sum(ph, n);
    const auto direct = lemma_sum_direct(ph, n);
    CHECK(testing::form_residual(assembled, direct, testing::points(n, 20, rng.next())) <= 1e-9);
  }
  CHECK(passed == 60);
}

TEST_CASE("reports") {
  std::vector<LemmaTerm> terms;
  const auto r = verify_lemma(phis({"z1*z2*z3"}), 3, {}, &terms);
  CHECK(r.pass);
  CHECK(r.term_count == 6);
  CHECK(r.matching.size() == 3);
  const std::string text = to_text(r, terms);
  CHECK(text.find("verdict: pass") != std::string::npos);
  CHECK(text.find("[0] (s=1, J=(2)) p=1 q=1 sign=+ key=(1,2) value=z3") != std::string::npos);
  const auto j = to_json(r);
  CHECK(j["verdict"] == "pass");
  CHECK(j["seed"] == 1);
  CHECK(j["matching"].size() == 3);

  const auto empty = verify_lemma(phis({"z1", "z2"}), 2);
  CHECK(empty.pass);
  CHECK(empty.term_count == 0);
}
