#include "extcalc/index_set.hpp"

#include <algorithm>
#include <stdexcept>

namespace extcalc {

IndexSet::IndexSet(std::vector<int> indices) : idx_(std::move(indices)) {
  for (std::size_t i = 0; i < idx_.size(); ++i) {
    if (idx_[i] < 1) throw std::invalid_argument("index set entries must be positive");
    if (i > 0 && idx_[i - 1] >= idx_[i]) {
      throw std::invalid_argument("index set must be strictly increasing");
    }
  }
}

bool IndexSet::contains(int i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }

int IndexSet::position_of(int i) const {
  auto it = std::lower_bound(idx_.begin(), idx_.end(), i);
  if (it == idx_.end() || *it != i) return 0;
  return static_cast<int>(it - idx_.begin()) + 1;
}

IndexSet IndexSet::without(int i) const {
  std::vector<int> out;
  out.reserve(idx_.size());
  for (int j : idx_) {
    if (j != i) out.push_back(j);
  }
  return IndexSet(std::move(out));
}

IndexSet IndexSet::with(int i) const {
  std::vector<int> out = idx_;
  out.insert(std::lower_bound(out.begin(), out.end(), i), i);
  return IndexSet(std::move(out));
}

std::string to_string(const IndexSet& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  out += ')';
  return out;
}

std::optional<SignedIndexSet> sort_with_sign(std::span<const int> indices) {
  std::vector<int> v(indices.begin(), indices.end());
  int sign = 1;
  // Insertion sort; every adjacent swap is one transposition.
  for (std::size_t i = 1; i < v.size(); ++i) {
    for (std::size_t j = i; j > 0 && v[j - 1] >= v[j]; --j) {
      if (v[j - 1] == v[j]) return std::nullopt;
      std::swap(v[j - 1], v[j]);
      sign = -sign;
    }
  }
  return SignedIndexSet{sign, IndexSet(std::move(v))};
}

std::string to_string(const std::optional<SignedIndexSet>& s) {
  if (!s) return "0";
  return (s->sign > 0 ? "+" : "-") + to_string(s->set);
}

Insertion insertion_sign(int s, const IndexSet& J) {
  if (J.contains(s)) {
    throw std::invalid_argument("repeated index " + std::to_string(s) + " in " + to_string(J));
  }
  const auto below = std::lower_bound(J.begin(), J.end(), s) - J.begin();
  const int q = static_cast<int>(below) + 1;
  return {q, (q - 1) % 2 == 0 ? 1 : -1};
}

std::string to_string(const PairSJ& p) {
  return "(s=" + std::to_string(p.s) + ", J=" + to_string(p.J) + ")";
}

PairSJ complementary_pair(const PairSJ& p, int pos) {
  if (pos < 1 || static_cast<std::size_t>(pos) > p.J.size()) {
    throw std::out_of_range("position " + std::to_string(pos) + " outside " + to_string(p.J));
  }
  const int jp = p.J[static_cast<std::size_t>(pos - 1)];
  return {jp, p.J.without(jp).with(p.s)};
}

std::vector<IndexSet> standard_tuples(int n, int k) {
  std::vector<IndexSet> out;
  if (k < 0 || k > n) return out;
  std::vector<int> cur(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i + 1;
  while (true) {
    out.emplace_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - k + i + 1) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

std::vector<PairSJ> enumerate_pairs(int n, int k) {
  if (k < 0 || k > n) {
    throw std::invalid_argument("degree " + std::to_string(k) + " outside 0.." + std::to_string(n));
  }
  const auto tuples = standard_tuples(n, k);
  std::vector<PairSJ> out;
  out.reserve(static_cast<std::size_t>(n - k) * tuples.size());
  for (int s = 1; s <= n; ++s) {
    for (const auto& J : tuples) {
      if (!J.contains(s)) out.push_back({s, J});
    }
  }
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t v = 1;
  for (int i = 0; i < k; ++i) v = v * static_cast<std::uint64_t>(n - i) / static_cast<std::uint64_t>(i + 1);
  return v;
}

}  // namespace extcalc
