#include "cubesparse/feasibility.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace cubesparse {

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const {
    std::size_t h = 1469598103934665603ULL;
    for (std::int64_t x : v) {
      h ^= static_cast<std::size_t>(x);
      h *= 1099511628211ULL;
    }
    return h;
  }
};

void check_query(const FeasibilityQuery& query) {
  if (static_cast<int>(query.target.size()) != query.m)
    throw std::invalid_argument("feasibility: target has wrong length");
  for (const auto& col : query.columns)
    if (static_cast<int>(col.size()) != query.m)
      throw std::invalid_argument("feasibility: column has wrong length");
  if (!query.bounds.empty()) {
    if (query.bounds.size() != query.columns.size())
      throw std::invalid_argument("feasibility: bounds length mismatch");
    for (std::int64_t b : query.bounds)
      if (b < 1) throw std::invalid_argument("feasibility: bounds must be >= 1");
  }
}

}  // namespace

FeasibilityOutcome solve_feasibility(const FeasibilityQuery& query) {
  check_query(query);
  FeasibilityOutcome outcome;
  if (query.budget < 0) return outcome;

  const int k = static_cast<int>(query.columns.size());
  const int m = query.m;
  auto bound_of = [&](int j) { return query.bounds.empty() ? 1 : query.bounds[j]; };

  // Interval of sums the columns j..k-1 can still contribute, per coordinate.
  std::vector<std::vector<std::int64_t>> suffix_lo(k + 1, std::vector<std::int64_t>(m, 0));
  std::vector<std::vector<std::int64_t>> suffix_hi(k + 1, std::vector<std::int64_t>(m, 0));
  for (int j = k - 1; j >= 0; --j)
    for (int i = 0; i < m; ++i) {
      std::int64_t contrib = bound_of(j) * query.columns[j][i];
      suffix_lo[j][i] = suffix_lo[j + 1][i] + std::min<std::int64_t>(0, contrib);
      suffix_hi[j][i] = suffix_hi[j + 1][i] + std::max<std::int64_t>(0, contrib);
    }

  // memo[j][sum] = largest remaining capacity for which the subtree failed.
  std::vector<std::unordered_map<std::vector<std::int64_t>, std::int64_t, VecHash>> memo(k + 1);
  std::vector<std::int64_t> y(k, 0);
  std::uint64_t states = 0;

  std::function<bool(int, std::vector<std::int64_t>&, std::int64_t)> dfs =
      [&](int j, std::vector<std::int64_t>& sum, std::int64_t cap) -> bool {
    auto [it, fresh] = memo[j].try_emplace(sum, -1);
    if (fresh) ++states;
    if (j == k) return sum == query.target;
    if (cap <= it->second) return false;

    for (int i = 0; i < m; ++i) {
      std::int64_t rem = query.target[i] - sum[i];
      if (rem < suffix_lo[j][i] || rem > suffix_hi[j][i]) {
        it->second = std::numeric_limits<std::int64_t>::max();
        return false;
      }
    }

    // Exclude first: the first witness found is lexicographically smallest.
    if (dfs(j + 1, sum, cap)) {
      y[j] = 0;
      return true;
    }
    if (cap >= 1) {
      for (std::int64_t v = 1; v <= bound_of(j); ++v) {
        std::vector<std::int64_t> next = sum;
        for (int i = 0; i < m; ++i) next[i] += v * query.columns[j][i];
        if (dfs(j + 1, next, cap - 1)) {
          y[j] = v;
          return true;
        }
      }
    }
    auto again = memo[j].find(sum);  // recursion may rehash
    again->second = std::max(again->second, cap);
    return false;
  };

  std::vector<std::int64_t> zero(m, 0);
  std::int64_t cap = std::min<std::int64_t>(query.budget, k);
  bool ok = dfs(0, zero, cap);
  outcome.states = states;
  if (ok) outcome.witness = y;
  return outcome;
}

std::uint64_t count_states(const FeasibilityQuery& query) { return solve_feasibility(query).states; }

std::uint64_t SubsetSumTable::encode_state(const std::vector<std::int64_t>& sum, int count) const {
  std::uint64_t enc = 0;
  for (int i = static_cast<int>(sum.size()) - 1; i >= 0; --i)
    enc = enc * radix_ + static_cast<std::uint64_t>(sum[i] + offset_);
  return enc * static_cast<std::uint64_t>(budget_ + 1) + static_cast<std::uint64_t>(count);
}

SubsetSumTable::SubsetSumTable(const ProblemInstance& instance, std::int64_t budget,
                               const std::vector<bool>& excluded)
    : instance_(instance), budget_(std::max<std::int64_t>(budget, 0)) {
  for (int j = 0; j < instance.n; ++j)
    if (excluded.empty() || !excluded[j]) cols_.push_back(j);
  budget_ = std::min<std::int64_t>(budget_, static_cast<std::int64_t>(cols_.size()));
  if (budget < 0) {  // answered empty: nothing reachable, not even the origin
    layers_.assign(1, {});
    return;
  }

  std::int64_t per_pick = 0;
  for (int j : cols_)
    for (int i = 0; i < instance.m; ++i)
      per_pick = std::max<std::int64_t>(per_pick, instance.bound(j) * std::abs(instance.a(i, j)));
  offset_ = budget_ * per_pick;
  radix_ = static_cast<std::uint64_t>(2 * offset_ + 1);

  double key_space = static_cast<double>(budget_ + 1);
  for (int i = 0; i < instance.m; ++i) key_space *= static_cast<double>(radix_);
  if (key_space > 9.0e18) throw std::overflow_error("SubsetSumTable: state space too large to encode");

  std::vector<std::int64_t> colstep(cols_.size(), 0);
  for (std::size_t c = 0; c < cols_.size(); ++c) {
    std::int64_t step = 0;
    for (int i = instance.m - 1; i >= 0; --i)
      step = step * static_cast<std::int64_t>(radix_) + instance.a(i, cols_[c]);
    colstep[c] = step * (budget_ + 1);
  }

  layers_.resize(cols_.size() + 1);
  std::vector<std::int64_t> zero(instance.m, 0);
  layers_[0].push_back({encode_state(zero, 0), Parent{0, -1, 0}});

  for (std::size_t c = 0; c < cols_.size(); ++c) {
    std::unordered_map<std::uint64_t, Parent> next;
    next.reserve(layers_[c].size() * 2);
    for (const auto& [key, parent] : layers_[c]) {
      next.try_emplace(key, Parent{key, cols_[c], 0});
      int count = static_cast<int>(key % static_cast<std::uint64_t>(budget_ + 1));
      if (count >= budget_) continue;
      for (std::int64_t v = 1; v <= instance_.bound(cols_[c]); ++v) {
        std::uint64_t child =
            static_cast<std::uint64_t>(static_cast<std::int64_t>(key) + v * colstep[c] + 1);
        next.try_emplace(child, Parent{key, cols_[c], static_cast<std::int32_t>(v)});
      }
    }
    auto& out = layers_[c + 1];
    out.assign(next.begin(), next.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  for (const auto& layer : layers_) states_ += layer.size();

  const std::uint64_t B = static_cast<std::uint64_t>(budget_ + 1);
  for (const auto& [key, parent] : layers_.back()) {
    Entry e;
    e.count = static_cast<int>(key % B);
    std::uint64_t rest = key / B;
    e.sum.resize(instance.m);
    for (int i = 0; i < instance.m; ++i) {
      e.sum[i] = static_cast<std::int64_t>(rest % radix_) - offset_;
      rest /= radix_;
    }
    entries_.push_back(std::move(e));
  }
}

bool SubsetSumTable::reachable(const std::vector<std::int64_t>& sum, int count) const {
  if (count < 0 || count > budget_) return false;
  for (std::int64_t s : sum)
    if (s < -offset_ || s > offset_) return false;
  std::uint64_t key = encode_state(sum, count);
  const auto& layer = layers_.back();
  auto it = std::lower_bound(layer.begin(), layer.end(), key,
                             [](const auto& a, std::uint64_t k) { return a.first < k; });
  return it != layer.end() && it->first == key;
}

std::vector<std::int64_t> SubsetSumTable::witness(const std::vector<std::int64_t>& sum,
                                                  int count) const {
  std::vector<std::int64_t> y(instance_.n, 0);
  std::uint64_t key = encode_state(sum, count);
  for (std::size_t level = layers_.size() - 1; level > 0; --level) {
    const auto& layer = layers_[level];
    auto it = std::lower_bound(layer.begin(), layer.end(), key,
                               [](const auto& a, std::uint64_t k) { return a.first < k; });
    if (it == layer.end() || it->first != key)
      throw std::invalid_argument("SubsetSumTable::witness: state not reachable");
    y[it->second.column] = it->second.value;
    key = it->second.prev_key;
  }
  return y;
}

}  // namespace cubesparse
