#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cubesparse/core.hpp"

namespace cubesparse {

/// One integer feasibility subproblem of the enumeration: does a vector
/// y with entries in {0..u_j} select columns summing to `target` using at
/// most `budget` nonzero entries? On the unit cube the entries are 0/1 and
/// the nonzero count equals sum y_i. Queries with a negative budget are
/// answered infeasible without search.
struct FeasibilityQuery {
  int m = 0;
  std::vector<std::vector<std::int64_t>> columns;  // each of length m
  std::vector<std::int64_t> target;                // length m
  std::int64_t budget = 0;
  std::vector<std::int64_t> bounds;  // per column; empty means all ones
};

struct FeasibilityOutcome {
  std::optional<std::vector<std::int64_t>> witness;
  std::uint64_t states = 0;  // distinct (column, partial-sum) nodes visited
};

/// Exact decision by depth-first search over columns with memoized failures
/// keyed on (column, partial sum, best failed capacity) and interval pruning
/// on the still-reachable sums. When feasible, returns the lexicographically
/// smallest witness (exclude explored before include, values ascending).
FeasibilityOutcome solve_feasibility(const FeasibilityQuery& query);

/// Number of memoized states after a solve; used to confirm polynomial
/// growth in n for fixed m and A_max.
std::uint64_t count_states(const FeasibilityQuery& query);

/// Layered forward DP over a column subset of an instance: every reachable
/// (partial sum, nonzero count) pair with backpointers for witness
/// reconstruction. One build answers membership for every candidate
/// right-hand side at once, which is how the solver batches the per-target
/// queries of the enumeration.
class SubsetSumTable {
 public:
  /// Builds over the columns of `instance` not marked in `excluded`
  /// (pass empty for all columns), tracking counts 0..budget.
  SubsetSumTable(const ProblemInstance& instance, std::int64_t budget,
                 const std::vector<bool>& excluded = {});

  struct Entry {
    std::vector<std::int64_t> sum;
    int count;
  };

  bool reachable(const std::vector<std::int64_t>& sum, int count) const;

  /// Some witness for a reachable (sum, count): full length n, zero on
  /// excluded columns. Deterministic (layers expand in sorted key order).
  std::vector<std::int64_t> witness(const std::vector<std::int64_t>& sum, int count) const;

  /// Final-layer states in deterministic order.
  const std::vector<Entry>& entries() const { return entries_; }

  std::uint64_t states() const { return states_; }
  std::int64_t budget() const { return budget_; }

 private:
  struct Parent {
    std::uint64_t prev_key;
    std::int32_t column;
    std::int32_t value;
  };

  std::uint64_t encode_state(const std::vector<std::int64_t>& sum, int count) const;

  const ProblemInstance& instance_;
  std::int64_t budget_;
  std::vector<int> cols_;           // included column indices, ascending
  std::int64_t offset_ = 0;         // per-coordinate shift into [0, 2*offset]
  std::uint64_t radix_ = 1;         // 2*offset + 1
  std::vector<std::vector<std::pair<std::uint64_t, Parent>>> layers_;  // sorted by key
  std::vector<Entry> entries_;
  std::uint64_t states_ = 0;
};

}  // namespace cubesparse
