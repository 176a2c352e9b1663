#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cubesparse {

using Vec = std::vector<double>;

/// Entries with |x_i| below this are treated as exact zeros when
/// classifying supports. Extension steps can leave float dust well
/// below any meaningful coordinate for integer matrices of desk size.
inline constexpr double kZeroTol = 1e-9;

/// An instance of the cardinality-constrained box least-squares problem
///   min ||Ax - b||_2   s.t.  0 <= x_i <= u_i,  ||x||_0 <= sigma.
/// A is integral; u defaults to the all-ones vector (unit cube).
/// Immutable after construction; safe to share across threads.
struct ProblemInstance {
  int m = 0;
  int n = 0;
  std::vector<std::int64_t> matrix;  // row-major, m*n entries
  Vec b;                             // length m
  std::int64_t sigma = 1;
  std::vector<std::int64_t> u;       // length n; empty means all ones

  std::int64_t a(int row, int col) const { return matrix[static_cast<std::size_t>(row) * n + col]; }

  std::int64_t bound(int col) const { return u.empty() ? 1 : u[col]; }

  bool has_general_bounds() const;

  /// sigma clamped to n: ||x||_0 <= n always holds.
  std::int64_t sigma_eff() const { return sigma < n ? sigma : n; }

  /// max_{i,j} |A_ij|, the matrix norm used in all proximity radii.
  std::int64_t max_abs_entry() const;

  /// max over i of u_i (1 when no general bounds are present).
  std::int64_t max_bound() const;

  /// largest Euclidean column norm, reported for diagnostics.
  double max_column_norm() const;

  /// A*x for a length-n vector.
  Vec apply(const Vec& x) const;

  /// A^T * r for a length-m vector.
  Vec apply_transposed(const Vec& r) const;
};

/// Pre-validation view of an instance: A entries still doubles so that
/// integrality violations can be reported instead of silently rounded.
struct InstanceDraft {
  int m = 0;
  int n = 0;
  std::vector<double> matrix;
  Vec b;
  std::int64_t sigma = 1;
  std::vector<std::int64_t> u;
  bool u_present = false;
};

struct ValidationResult {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationResult validate(const InstanceDraft& draft);

/// Converts a draft that passed validate(); throws std::invalid_argument otherwise.
ProblemInstance finalize(const InstanceDraft& draft);

/// Re-checks the invariants of an already-built instance (dimensions,
/// sigma >= 1, bounds >= 1). Used on programmatically constructed instances.
ValidationResult validate(const ProblemInstance& instance);

/// ||Ax - b||_2 with compensated summation of the squares.
/// Throws std::invalid_argument on dimension mismatch.
double objective(const ProblemInstance& instance, const Vec& x);

/// ||r||_2 with compensated summation.
double norm2(const Vec& r);

/// Neumaier-compensated sum.
double compensated_sum(const Vec& values);

/// A feasible point for the sparse problem. `support` lists the indices of
/// the nonzero entries (entries within kZeroTol of 0 are stored as exact 0),
/// and `objective` is the residual norm recomputed from x.
struct SparseSolution {
  Vec x;
  std::vector<int> support;
  double objective = 0.0;
};

/// Builds a SparseSolution from a raw vector: snaps near-zeros, collects the
/// support, recomputes the objective.
SparseSolution make_sparse_solution(const ProblemInstance& instance, Vec x);

/// Total order used for deterministic tie-breaking everywhere a best
/// solution is selected: (objective, |support|, lexicographic x).
bool solution_less(const SparseSolution& a, const SparseSolution& b);

/// Deterministic pseudo-randomness. All sampling flows through explicitly
/// passed Rng instances; `fork` derives an independent stream from
/// (seed, index) so that parallel trials are reproducible regardless of
/// scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform01();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

  /// Uniform integer on [lo, hi], inclusive, rejection-debiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  Rng fork(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];
};

}  // namespace cubesparse
