#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <vector>

#include "cubesparse/core.hpp"

namespace cubesparse {

inline constexpr int kExtensionHardCap = 20;

/// Exact box-constrained least squares min ||rhs - A g||_2, 0 <= g <= bounds,
/// for a fixed small column block. Sweeps all 3^k clamp patterns (each
/// coordinate clamped low, free, or clamped high), solves the free block by
/// a minimum-norm least-squares factorization, and keeps patterns whose free
/// coordinates land inside the box up to tau = 1e-9 (then clamped). The true
/// active set is among the patterns, so the best feasible candidate is the
/// exact constrained optimum. Factorizations are cached per pattern so
/// repeated solves against new right-hand sides cost only back-substitution.
/// Not safe for concurrent use by multiple threads; build one per worker.
class BoxLeastSquares {
 public:
  BoxLeastSquares(Eigen::MatrixXd columns, std::vector<double> bounds);
  ~BoxLeastSquares();
  BoxLeastSquares(BoxLeastSquares&&) noexcept;
  BoxLeastSquares& operator=(BoxLeastSquares&&) noexcept;

  struct Result {
    std::vector<double> g;
    double objective = 0.0;       // ||rhs - A g||_2 at the returned point
    std::uint64_t pattern = 0;    // winning clamp pattern, base-3 encoded
  };

  /// Ties within 1e-12 in objective resolve to the smallest base-3 pattern
  /// encoding (low < free < high per coordinate, first coordinate most
  /// significant).
  Result solve(const Eigen::VectorXd& rhs) const;

  int width() const { return static_cast<int>(bounds_.size()); }

 private:
  struct PatternCache;

  Eigen::MatrixXd columns_;
  std::vector<double> bounds_;
  std::uint64_t pattern_count_ = 1;
  mutable std::vector<std::unique_ptr<PatternCache>> cache_;
};

/// Free-function form of the sweep.
std::vector<double> box_least_squares(const std::vector<std::vector<double>>& columns,
                                      const Vec& rhs, const std::vector<double>& bounds);

/// Optimal completion of an integral part: minimizes ||b - A z - A f||_2 over
/// supp(f) contained in `guessed_support`, 0 <= f_i <= u_i. Requires z to be
/// zero on the guessed support. Returns the composite z + f.
SparseSolution extend(const ProblemInstance& instance, const std::vector<std::int64_t>& z,
                      const std::vector<int>& guessed_support);

}  // namespace cubesparse
