#include "cubesparse/proximity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cubesparse {

ProximityBound compute_bounds(const ProblemInstance& instance, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("compute_bounds: epsilon must be >= 0");
  ProximityBound bound;
  double m32 = std::pow(static_cast<double>(instance.m), 1.5);
  double a_max = static_cast<double>(instance.max_abs_entry());
  bound.radius_exact = 2.0 * m32 * a_max;
  bound.radius_eps = 3.0 * m32 * a_max + epsilon;
  bound.u_factor = static_cast<double>(instance.max_bound());
  return bound;
}

double column_norm_radius(const ProblemInstance& instance, const Vec& x_hat) {
  double frac_mass = 0.0;
  for (double v : x_hat) {
    double nearest = std::round(v);
    if (std::abs(v - nearest) <= kZeroTol) continue;
    frac_mass += v - std::floor(v);
  }
  return 2.0 * frac_mass * instance.max_column_norm();
}

BoxEnumerator::BoxEnumerator(const Vec& center, double radius, std::uint64_t cap) {
  if (radius < 0.0) throw std::invalid_argument("BoxEnumerator: radius must be >= 0");
  const double inflated = radius + 1e-6;
  lo_.reserve(center.size());
  hi_.reserve(center.size());
  for (double c : center) {
    lo_.push_back(static_cast<std::int64_t>(std::ceil(c - inflated)));
    hi_.push_back(static_cast<std::int64_t>(std::floor(c + inflated)));
  }
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (hi_[i] < lo_[i]) {
      size_ = 0;
      return;
    }
    std::uint64_t width = static_cast<std::uint64_t>(hi_[i] - lo_[i]) + 1;
    if (size_ > cap / width + 1) size_ = cap + 1;  // overflow guard
    else size_ *= width;
    if (size_ > cap)
      throw EnumerationCapExceeded("candidate box holds more than " + std::to_string(cap) +
                                   " integer points; instance is outside the fixed-m regime");
  }
}

std::vector<std::int64_t> BoxEnumerator::point(std::uint64_t index) const {
  std::vector<std::int64_t> p(lo_.size());
  for (int i = dimension() - 1; i >= 0; --i) {
    std::uint64_t width = static_cast<std::uint64_t>(hi_[i] - lo_[i]) + 1;
    p[i] = lo_[i] + static_cast<std::int64_t>(index % width);
    index /= width;
  }
  return p;
}

bool BoxEnumerator::contains(const std::vector<std::int64_t>& p) const {
  for (std::size_t i = 0; i < lo_.size(); ++i)
    if (p[i] < lo_[i] || p[i] > hi_[i]) return false;
  return true;
}

std::vector<Rat> round_fractional_part_exact(const ProblemInstance& instance,
                                             const std::vector<Rat>& x_hat) {
  const int n = instance.n;
  if (static_cast<int>(x_hat.size()) != n)
    throw std::invalid_argument("round_fractional_part: x has wrong length");

  std::vector<int> frac;
  for (int i = 0; i < n; ++i) {
    if (x_hat[i] < 0 || x_hat[i] > Rat(instance.bound(i)))
      throw std::invalid_argument("round_fractional_part: x violates bounds");
    if (!rat_is_integer(x_hat[i])) frac.push_back(i);
  }
  if (static_cast<int>(frac.size()) > instance.m)
    throw std::invalid_argument("round_fractional_part: more than m fractional entries");

  // Decreasing value, ties by index.
  std::sort(frac.begin(), frac.end(), [&](int a, int b) {
    if (x_hat[a] != x_hat[b]) return x_hat[a] > x_hat[b];
    return a < b;
  });

  Rat remaining(0);
  for (int i : frac) remaining += x_hat[i];

  std::vector<Rat> y = x_hat;
  for (int i : frac) {
    Rat take = std::min(Rat(instance.bound(i)), remaining);
    y[i] = take;
    remaining -= take;
  }
  // The fractional mass fits below the bounds it came from.
  if (remaining != 0) throw std::logic_error("round_fractional_part: mass left over");
  return y;
}

SparseSolution round_fractional_part(const ProblemInstance& instance, const Vec& x_hat) {
  std::vector<Rat> exact = rats_from_doubles(x_hat);
  for (int i = 0; i < instance.n; ++i) {
    Rat ub(instance.bound(i));
    if (exact[i] < 0 && exact[i] >= Rat(-1e-6)) exact[i] = 0;
    if (exact[i] > ub && exact[i] <= ub + Rat(1e-6)) exact[i] = ub;
  }
  std::vector<Rat> y = round_fractional_part_exact(instance, exact);
  SparseSolution sol = make_sparse_solution(instance, rats_to_doubles(y));
  if (static_cast<std::int64_t>(sol.support.size()) > instance.sigma_eff())
    throw std::domain_error("round_fractional_part: rounded point exceeds the support budget");
  return sol;
}

}  // namespace cubesparse
