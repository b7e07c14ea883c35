#include "extcalc/lemma.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <tuple>

#include "extcalc/smooth_map.hpp"
#include "extcalc/zero.hpp"

namespace extcalc {

namespace {

void check_shape(std::size_t k, int n) {
  if (k < 1 || static_cast<int>(k) > n) {
    throw std::invalid_argument("need 1 <= k <= n, got k=" + std::to_string(k) + ", n=" + std::to_string(n));
  }
  if (static_cast<int>(k) > kMaxLemmaDegree) {
    throw std::invalid_argument("k=" + std::to_string(k) + " exceeds the cap of " +
                                std::to_string(kMaxLemmaDegree));
  }
}

// First and second partials of the φ_i, computed once and shared between terms.
class DerivativeCache {
 public:
  DerivativeCache(std::span<const Expression> phis, int n) : phis_(phis), n_(n) {
    first_.resize(phis.size() * static_cast<std::size_t>(n));
    second_.resize(first_.size() * static_cast<std::size_t>(n));
    have_second_.assign(second_.size(), 0);
    for (std::size_t i = 0; i < phis.size(); ++i) {
      for (int j = 1; j <= n; ++j) first_[slot(i, j)] = partial(phis[i], j);
    }
  }

  const Expression& first(std::size_t i, int j) const { return first_[slot(i, j)]; }

  /// ∂/∂z_s (∂φ_i/∂z_j)
  const Expression& second(std::size_t i, int j, int s) {
    const std::size_t at = slot(i, j) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(s - 1);
    if (!have_second_[at]) {
      second_[at] = partial(first(i, j), s);
      have_second_[at] = 1;
    }
    return second_[at];
  }

 private:
  std::size_t slot(std::size_t i, int j) const {
    return i * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j - 1);
  }

  std::span<const Expression> phis_;
  int n_;
  std::vector<Expression> first_;
  std::vector<Expression> second_;
  std::vector<std::uint8_t> have_second_;
};

Expression signed_value(int sign, const Expression& e) {
  return sign > 0 ? e : Expression::product({Expression::number(-1.0), e});
}

char sign_char(int s) { return s > 0 ? '+' : '-'; }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

std::vector<LemmaTerm> expand_lemma_terms(std::span<const Expression> phis, int n) {
  check_shape(phis.size(), n);
  const int k = static_cast<int>(phis.size());
  DerivativeCache d(phis, n);
  std::vector<LemmaTerm> terms;
  for (const PairSJ& pr : enumerate_pairs(n, k)) {
    const Insertion ins = insertion_sign(pr.s, pr.J);
    for (int p = 1; p <= k; ++p) {
      const int jp = pr.J[static_cast<std::size_t>(p - 1)];
      ExpressionMatrix m(k, k);
      for (int i = 1; i <= k; ++i) {
        const auto row = static_cast<std::size_t>(i - 1);
        m(i, 1) = d.second(row, jp, pr.s);
        int col = 2;
        for (int r = 1; r <= k; ++r) {
          if (r == p) continue;
          m(i, col++) = d.first(row, pr.J[static_cast<std::size_t>(r - 1)]);
        }
      }
      LemmaTerm t;
      t.pair = pr;
      t.p = p;
      t.q = ins.q;
      t.sign = ((p - 1) % 2 == 0 ? 1 : -1) * ins.sign;
      t.key = pr.J.with(pr.s);
      t.value = determinant_expansion(m);
      terms.push_back(std::move(t));
    }
  }
  return terms;
}

std::vector<PairCheck> pair_terms(std::span<const LemmaTerm> terms, int n, const LemmaCheckOptions& opts) {
  std::map<std::tuple<int, IndexSet, int>, std::size_t> index;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    index.emplace(std::make_tuple(terms[i].pair.s, terms[i].pair.J, terms[i].p), i);
  }
  std::vector<PairCheck> out;
  std::vector<SignedSum> diffs;
  std::vector<char> seen(terms.size(), 0);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (seen[i]) continue;
    const LemmaTerm& t = terms[i];
    const PairSJ partner = complementary_pair(t.pair, t.p);
    const int partner_p = partner.J.position_of(t.pair.s);
    auto it = index.find(std::make_tuple(partner.s, partner.J, partner_p));
    if (it == index.end() || seen[it->second] || it->second == i) {
      throw std::logic_error("term " + std::to_string(i) + " " + to_string(t.pair) + " p=" +
                             std::to_string(t.p) + " has no complementary partner");
    }
    const std::size_t j = it->second;
    seen[i] = seen[j] = 1;
    PairCheck c;
    c.first = i;
    c.second = j;
    c.same_key = t.key == terms[j].key;
    c.opposite_sign = t.sign + terms[j].sign == 0;
    out.push_back(c);
    diffs.emplace_back(t.value, terms[j].value);
  }
  if (!diffs.empty()) {
    ZeroOptions zo;
    zo.samples = opts.samples;
    zo.seed = opts.seed;
    zo.tolerance = opts.tolerance;
    ZeroVerdict v = recognize_zero(diffs, n, zo);
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k].residual = v.per_sum[k];
      out[k].values_equal = v.per_sum[k] <= opts.tolerance;
    }
  }
  return out;
}

DifferentialForm lemma_sum(std::span<const Expression> phis, int n) {
  const auto terms = expand_lemma_terms(phis, n);
  std::map<IndexSet, std::vector<Expression>> acc;
  for (const auto& t : terms) acc[t.key].push_back(signed_value(t.sign, t.value));
  DifferentialForm::Coefficients coeffs;
  for (auto& [key, vs] : acc) coeffs.emplace(key, Expression::sum(std::move(vs)));
  return DifferentialForm(n, static_cast<int>(phis.size()) + 1, std::move(coeffs));
}

DifferentialForm lemma_sum_direct(std::span<const Expression> phis, int n) {
  check_shape(phis.size(), n);
  const int k = static_cast<int>(phis.size());
  const SmoothMap phi(n, {phis.begin(), phis.end()});
  const ExpressionMatrix jac = jacobian_matrix(phi);
  std::vector<int> all_rows(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) all_rows[static_cast<std::size_t>(i)] = i + 1;
  const IndexSet rows(all_rows);

  std::map<IndexSet, Expression> minors;
  std::map<IndexSet, std::vector<Expression>> acc;
  for (const PairSJ& pr : enumerate_pairs(n, k)) {
    auto it = minors.find(pr.J);
    if (it == minors.end()) it = minors.emplace(pr.J, jacobian_minor(jac, rows, pr.J)).first;
    const Insertion ins = insertion_sign(pr.s, pr.J);
    acc[pr.J.with(pr.s)].push_back(signed_value(ins.sign, partial(it->second, pr.s)));
  }
  DifferentialForm::Coefficients coeffs;
  for (auto& [key, vs] : acc) coeffs.emplace(key, Expression::sum(std::move(vs)));
  return DifferentialForm(n, k + 1, std::move(coeffs));
}

LemmaReport verify_lemma(std::span<const Expression> phis, int n, const LemmaCheckOptions& opts,
                         std::vector<LemmaTerm>* terms_out) {
  LemmaReport r;
  r.n = n;
  r.k = static_cast<int>(phis.size());
  r.seed = opts.seed;
  r.tolerance = opts.tolerance;
  auto terms = expand_lemma_terms(phis, n);
  r.pairs_sj = static_cast<std::size_t>(n - r.k) * binomial(n, r.k);
  r.term_count = terms.size();

  bool matching_ok = true;
  if (!terms.empty()) {
    r.matching = pair_terms(terms, n, opts);
    for (const auto& c : r.matching) {
      r.max_pair_residual = std::max(r.max_pair_residual, c.residual);
      matching_ok = matching_ok && c.ok();
    }
    matching_ok = matching_ok && 2 * r.matching.size() == terms.size();
  }

  ZeroOptions zo;
  zo.samples = opts.samples;
  zo.seed = opts.seed;
  zo.tolerance = opts.tolerance;

  // The assembled sum, one signed sum per key of the (k+1)-form.
  std::map<IndexSet, SignedSum> by_key;
  for (const auto& t : terms) by_key[t.key].operands.emplace_back(static_cast<double>(t.sign), t.value);
  std::vector<SignedSum> sums;
  for (auto& [key, s] : by_key) sums.push_back(s);
  bool sum_ok = true;
  if (!sums.empty()) {
    ZeroVerdict v = recognize_zero(sums, n, zo);
    r.sum_residual = v.max_scaled_residual;
    r.sum_structural = v.structural;
    sum_ok = v.zero;
  } else {
    r.sum_structural = true;
  }

  // Statement route against proof route.
  bool path_ok = true;
  if (!terms.empty()) {
    const DifferentialForm direct = lemma_sum_direct(phis, n);
    std::vector<SignedSum> agree;
    for (auto& [key, s] : by_key) {
      SignedSum d = s;
      d.operands.emplace_back(-1.0, direct.coefficient(key));
      agree.push_back(std::move(d));
    }
    for (const auto& [key, c] : direct.coefficients()) {
      if (!by_key.count(key)) agree.push_back(SignedSum(c));
    }
    ZeroVerdict v = recognize_zero(agree, n, zo);
    r.path_residual = v.max_scaled_residual;
    path_ok = v.zero;
  }

  r.pass = matching_ok && sum_ok && path_ok;
  if (terms_out) *terms_out = std::move(terms);
  return r;
}

nlohmann::json to_json(const LemmaReport& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& c : r.matching) {
    pairs.push_back({{"terms", {c.first, c.second}},
                     {"same_key", c.same_key},
                     {"opposite_sign", c.opposite_sign},
                     {"residual", c.residual}});
  }
  return {{"n", r.n},
          {"k", r.k},
          {"N", r.pairs_sj},
          {"terms", r.term_count},
          {"matched_pairs", r.matching.size()},
          {"matching", pairs},
          {"max_pair_residual", r.max_pair_residual},
          {"sum_residual", r.sum_residual},
          {"sum_structural", r.sum_structural},
          {"path_residual", r.path_residual},
          {"seed", r.seed},
          {"tolerance", r.tolerance},
          {"verdict", r.pass ? "pass" : "fail"}};
}

std::string to_text(const LemmaTerm& t) {
  std::string out = to_string(t.pair) + " p=" + std::to_string(t.p) + " q=" + std::to_string(t.q) +
                    " sign=" + sign_char(t.sign) + " key=" + to_string(t.key);
  out += " value=" + to_string(simplify(t.value));
  return out;
}

std::string to_text(const LemmaReport& r, std::span<const LemmaTerm> terms) {
  std::string out;
  out += "lemma n=" + std::to_string(r.n) + " k=" + std::to_string(r.k) + "\n";
  out += "pairs (s,J): " + std::to_string(r.pairs_sj) + "\n";
  out += "terms: " + std::to_string(r.term_count) + "\n";
  out += "matched pairs: " + std::to_string(r.matching.size()) + "\n";
  if (!terms.empty()) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      out += "  [" + std::to_string(i) + "] " + to_text(terms[i]) + "\n";
    }
    for (const auto& c : r.matching) {
      const auto& a = terms[c.first];
      const auto& b = terms[c.second];
      out += "  pair [" + std::to_string(c.first) + "] " + sign_char(a.sign) + " <-> [" +
             std::to_string(c.second) + "] " + sign_char(b.sign) + " on " + to_string(a.key) +
             " residual " + sci(c.residual) + (c.ok() ? " cancels" : " MISMATCH") + "\n";
    }
  }
  out += "max pair residual: " + sci(r.max_pair_residual) + "\n";
  out += "sum residual: " + sci(r.sum_residual) + (r.sum_structural ? " (structural zero)" : "") + "\n";
  out += "path residual: " + sci(r.path_residual) + "\n";
  out += "seed: " + std::to_string(r.seed) + "\n";
  out += std::string("verdict: ") + (r.pass ? "pass" : "fail") + "\n";
  return out;
}

}  // namespace extcalc
