#pragma once

// The determinant-cancellation identity
//
//   Σ_{(s,J)} ∂/∂z_s [∂(φ1..φk)/∂(z_j1..z_jk)] dz_s ∧ dz_J = 0
//
// expanded into its k·N signed monomials, matched in cancelling pairs, and
// checked numerically.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "extcalc/expression.hpp"
#include "extcalc/form.hpp"
#include "extcalc/index_set.hpp"

namespace extcalc {

/// Largest k the expansion accepts.
inline constexpr int kMaxLemmaDegree = 4;

/// One monomial of the expanded sum: the term of ∂_s det(∂φ/∂z_J) in which
/// column p was differentiated, with that column moved to the front.
struct LemmaTerm {
  PairSJ pair;
  int p = 1;     // differentiated column, 1..k
  int q = 1;     // position of s in the sorted s ∪ J
  int sign = 1;  // (-1)^(p-1) · (-1)^(q-1)
  IndexSet key;  // sorted s ∪ J
  /// det[ ∂²φ_i/∂z_s∂z_jp | ∂φ_i/∂z_jr for r ≠ p ], unsimplified.
  Expression value;
};

/// Throws std::invalid_argument unless 1 ≤ k ≤ min(n, 4), k = phis.size().
/// Terms come out ordered by (s, J, p).
std::vector<LemmaTerm> expand_lemma_terms(std::span<const Expression> phis, int n);

struct PairCheck {
  std::size_t first = 0;
  std::size_t second = 0;
  bool same_key = false;
  bool opposite_sign = false;
  double residual = 0.0;  // scaled residual of value(first) - value(second)
  bool values_equal = false;

  bool ok() const { return same_key && opposite_sign && values_equal; }
};

struct LemmaCheckOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
};

/// Matches every term (s, J, p) with the term of the complementary pair
/// (j_p, J′) whose differentiated column is the position of s in J′.
/// Throws std::logic_error if a term has no partner.
std::vector<PairCheck> pair_terms(std::span<const LemmaTerm> terms, int n,
                                  const LemmaCheckOptions& opts = {});

/// The (k+1)-form Σ sign·value assembled from the expansion.
DifferentialForm lemma_sum(std::span<const Expression> phis, int n);

/// The same sum from the statement: Σ_{(s,J)} ±∂_s ∂(φ)/∂(z_J) on sort(s ∪ J),
/// built from jacobian_minor without the column bookkeeping.
DifferentialForm lemma_sum_direct(std::span<const Expression> phis, int n);

struct LemmaReport {
  int n = 0;
  int k = 0;
  std::size_t pairs_sj = 0;  // N
  std::size_t term_count = 0;
  std::vector<PairCheck> matching;
  double max_pair_residual = 0.0;
  double sum_residual = 0.0;   // zero recognition of the assembled sum
  double path_residual = 0.0;  // assembled sum against lemma_sum_direct
  bool sum_structural = false;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Expands, pairs and zero-tests one instance.
LemmaReport verify_lemma(std::span<const Expression> phis, int n, const LemmaCheckOptions& opts = {},
                         std::vector<LemmaTerm>* terms_out = nullptr);

nlohmann::json to_json(const LemmaReport& r);
/// Summary lines; with `terms`, also one line per term and its partner.
std::string to_text(const LemmaReport& r, std::span<const LemmaTerm> terms = {});
std::string to_text(const LemmaTerm& t);

}  // namespace extcalc
