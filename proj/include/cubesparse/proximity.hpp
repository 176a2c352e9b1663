#pragma once

#include <cstdint>
#include <stdexcept>

#include "cubesparse/core.hpp"
#include "cubesparse/rational.hpp"

namespace cubesparse {

/// Worst-case distances between the images of relaxation and sparse optima.
/// radius_exact applies at the true relaxation optimum, radius_eps to the
/// integral part of the sparse optimum around an epsilon-close point. With
/// general upper bounds, per-coordinate radii additionally scale by u_factor.
struct ProximityBound {
  double radius_exact = 0.0;  // 2 m^{3/2} A_max
  double radius_eps = 0.0;    // 3 m^{3/2} A_max + epsilon
  double u_factor = 1.0;      // max_i u_i
};

ProximityBound compute_bounds(const ProblemInstance& instance, double epsilon);

/// Data-dependent alternative radius 2 ||x_hat - floor(x_hat)||_1 max_i ||A_i||_2,
/// reported for diagnostics only (near-integral entries snap before flooring).
double column_norm_radius(const ProblemInstance& instance, const Vec& x_hat);

struct EnumerationCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultEnumCap = 100'000'000;

/// The integer points of the axis-aligned closed box center +- radius:
/// per coordinate the integers in [ceil(c_i - r), floor(c_i + r)], with the
/// radius inflated by 1e-6 so float dust on the center never drops a point.
/// Points are indexed in lexicographic order (first coordinate most
/// significant); random access enables splitting across workers.
/// Construction throws EnumerationCapExceeded when the box holds more than
/// `cap` points.
class BoxEnumerator {
 public:
  BoxEnumerator(const Vec& center, double radius, std::uint64_t cap = kDefaultEnumCap);

  std::uint64_t size() const { return size_; }
  int dimension() const { return static_cast<int>(lo_.size()); }
  std::int64_t lo(int i) const { return lo_[i]; }
  std::int64_t hi(int i) const { return hi_[i]; }

  std::vector<std::int64_t> point(std::uint64_t index) const;

  bool contains(const std::vector<std::int64_t>& p) const;

 private:
  std::vector<std::int64_t> lo_, hi_;
  std::uint64_t size_ = 1;
};

/// Theorem-2-style rounding: with F the set of non-integral coordinates
/// (|F| <= m required; reduce first) and k their exact sum, fills the F
/// coordinates in decreasing-value order (capacity u_i each, ties by index)
/// so that sum_F y = sum_F x_hat exactly, and keeps all integral
/// coordinates. On the unit cube this sets floor(k) coordinates to 1, one to
/// the remainder, and the rest to 0; the result is always feasible there.
std::vector<Rat> round_fractional_part_exact(const ProblemInstance& instance,
                                             const std::vector<Rat>& x_hat);

SparseSolution round_fractional_part(const ProblemInstance& instance, const Vec& x_hat);

}  // namespace cubesparse
