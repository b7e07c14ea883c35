#pragma once

// Standard k-tuples and the sign bookkeeping of wedge monomials.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace extcalc {

/// Strictly increasing tuple (j1 < j2 < ... < jk) of indices ≥ 1. The empty
/// tuple labels 0-forms. Ordered lexicographically.
class IndexSet {
 public:
  IndexSet() = default;
  /// Throws std::invalid_argument unless strictly increasing and positive.
  explicit IndexSet(std::vector<int> indices);
  IndexSet(std::initializer_list<int> indices) : IndexSet(std::vector<int>(indices)) {}

  std::size_t size() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  /// Zero-based element access.
  int operator[](std::size_t i) const { return idx_[i]; }
  std::span<const int> indices() const { return idx_; }
  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }

  bool contains(int i) const;
  /// One-based position of `i`, or 0 when absent.
  int position_of(int i) const;
  /// Largest entry, 0 when empty.
  int max() const { return idx_.empty() ? 0 : idx_.back(); }

  IndexSet without(int i) const;
  IndexSet with(int i) const;

  auto operator<=>(const IndexSet&) const = default;

 private:
  std::vector<int> idx_;
};

/// "(j1,j2,...,jk)"
std::string to_string(const IndexSet& s);

struct SignedIndexSet {
  int sign = 1;
  IndexSet set;
  bool operator==(const SignedIndexSet&) const = default;
};

/// Sorts `indices` and returns the parity of the sorting permutation, or
/// nullopt (the zero marker) when an index repeats.
std::optional<SignedIndexSet> sort_with_sign(std::span<const int> indices);

/// "0" for the zero marker, otherwise "+(...)" or "-(...)".
std::string to_string(const std::optional<SignedIndexSet>& s);

struct Insertion {
  int q = 1;     // position of s in the sorted union, 1..k+1
  int sign = 1;  // (-1)^(q-1)
};

/// Position of `s` among the sorted s ∪ J and the sign of moving dz_s there
/// from the front. Throws std::invalid_argument if s ∈ J.
Insertion insertion_sign(int s, const IndexSet& J);

/// A pair (s, J) with s ∉ J.
struct PairSJ {
  int s = 1;
  IndexSet J;
  auto operator<=>(const PairSJ&) const = default;
};

std::string to_string(const PairSJ& p);

/// (j_pos, J with j_pos replaced by s, re-sorted). `pos` is one-based.
/// Throws std::out_of_range for a bad position.
PairSJ complementary_pair(const PairSJ& p, int pos);

/// All standard k-tuples over 1..n in lexicographic order.
std::vector<IndexSet> standard_tuples(int n, int k);

/// All (s, J), J a standard k-tuple over 1..n and s ∉ J, ordered by (s, J).
/// There are (n-k)·C(n,k) of them. Throws std::invalid_argument unless 0 ≤ k ≤ n.
std::vector<PairSJ> enumerate_pairs(int n, int k);

std::uint64_t binomial(int n, int k);

}  // namespace extcalc
