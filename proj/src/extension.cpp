#include "cubesparse/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace cubesparse {

namespace {

constexpr double kLandingTol = 1e-9;   // free coordinates may overshoot this far
constexpr double kTieTol = 1e-12;

constexpr std::uint64_t kPatternCacheLimit = 200'000;

}  // namespace

struct BoxLeastSquares::PatternCache {
  std::vector<int> low, free_set, high;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  Eigen::VectorXd high_image;
};

BoxLeastSquares::~BoxLeastSquares() = default;
BoxLeastSquares::BoxLeastSquares(BoxLeastSquares&&) noexcept = default;
BoxLeastSquares& BoxLeastSquares::operator=(BoxLeastSquares&&) noexcept = default;

BoxLeastSquares::BoxLeastSquares(Eigen::MatrixXd columns, std::vector<double> bounds)
    : columns_(std::move(columns)), bounds_(std::move(bounds)) {
  const int k = static_cast<int>(bounds_.size());
  if (columns_.cols() != k) throw std::invalid_argument("BoxLeastSquares: column/bound mismatch");
  if (k > kExtensionHardCap)
    throw std::invalid_argument("BoxLeastSquares: block wider than the hard cap");
  for (double b : bounds_)
    if (!(b > 0.0)) throw std::invalid_argument("BoxLeastSquares: bounds must be positive");
  for (int i = 0; i < k; ++i) pattern_count_ *= 3;
  if (pattern_count_ <= kPatternCacheLimit) cache_.resize(pattern_count_);
}

BoxLeastSquares::Result BoxLeastSquares::solve(const Eigen::VectorXd& rhs) const {
  const int k = width();
  std::vector<std::uint64_t> pow3(k + 1, 1);
  for (int i = 1; i <= k; ++i) pow3[i] = pow3[i - 1] * 3;

  Result best;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<double> g(k);

  std::unique_ptr<PatternCache> scratch;
  for (std::uint64_t p = 0; p < pattern_count_; ++p) {
    PatternCache* pc = nullptr;
    if (!cache_.empty() && cache_[p]) pc = cache_[p].get();
    if (!pc) {
      auto fresh = std::make_unique<PatternCache>();
      for (int i = 0; i < k; ++i) {
        int digit = static_cast<int>((p / pow3[k - 1 - i]) % 3);
        if (digit == 0) fresh->low.push_back(i);
        else if (digit == 1) fresh->free_set.push_back(i);
        else fresh->high.push_back(i);
      }
      if (!fresh->free_set.empty()) {
        Eigen::MatrixXd a_free(columns_.rows(), fresh->free_set.size());
        for (std::size_t c = 0; c < fresh->free_set.size(); ++c)
          a_free.col(c) = columns_.col(fresh->free_set[c]);
        fresh->cod.compute(a_free);
      }
      fresh->high_image = Eigen::VectorXd::Zero(columns_.rows());
      for (int i : fresh->high) fresh->high_image += bounds_[i] * columns_.col(i);
      if (!cache_.empty()) {
        cache_[p] = std::move(fresh);
        pc = cache_[p].get();
      } else {
        scratch = std::move(fresh);
        pc = scratch.get();
      }
    }

    Eigen::VectorXd g_free;
    if (!pc->free_set.empty()) {
      Eigen::VectorXd shifted = rhs - pc->high_image;
      g_free = pc->cod.solve(shifted);
    }

    bool lands = true;
    for (std::size_t c = 0; c < pc->free_set.size() && lands; ++c)
      lands = g_free[c] >= -kLandingTol && g_free[c] <= bounds_[pc->free_set[c]] + kLandingTol;
    if (!lands) continue;

    std::fill(g.begin(), g.end(), 0.0);
    for (int i : pc->high) g[i] = bounds_[i];
    for (std::size_t c = 0; c < pc->free_set.size(); ++c) {
      int i = pc->free_set[c];
      g[i] = std::clamp(g_free[c], 0.0, bounds_[i]);
    }

    Eigen::VectorXd residual = rhs;
    for (int i = 0; i < k; ++i)
      if (g[i] != 0.0) residual -= g[i] * columns_.col(i);
    double obj = residual.norm();

    if (obj < best.objective - kTieTol) {
      best.objective = obj;
      best.g = g;
      best.pattern = p;
    }
  }
  return best;
}

std::vector<double> box_least_squares(const std::vector<std::vector<double>>& columns,
                                      const Vec& rhs, const std::vector<double>& bounds) {
  const int k = static_cast<int>(columns.size());
  const int m = static_cast<int>(rhs.size());
  Eigen::MatrixXd a(m, k);
  for (int j = 0; j < k; ++j) {
    if (static_cast<int>(columns[j].size()) != m)
      throw std::invalid_argument("box_least_squares: column length mismatch");
    for (int i = 0; i < m; ++i) a(i, j) = columns[j][i];
  }
  Eigen::VectorXd r(m);
  for (int i = 0; i < m; ++i) r[i] = rhs[i];
  return BoxLeastSquares(std::move(a), bounds).solve(r).g;
}

SparseSolution extend(const ProblemInstance& instance, const std::vector<std::int64_t>& z,
                      const std::vector<int>& guessed_support) {
  if (static_cast<int>(z.size()) != instance.n) throw std::invalid_argument("extend: z has wrong length");
  for (int i : guessed_support) {
    if (i < 0 || i >= instance.n) throw std::invalid_argument("extend: support index out of range");
    if (z[i] != 0) throw std::invalid_argument("extend: z must vanish on the guessed support");
  }
  for (int i = 0; i < instance.n; ++i)
    if (z[i] < 0 || z[i] > instance.bound(i))
      throw std::invalid_argument("extend: z violates its bounds");
  const int k = static_cast<int>(guessed_support.size());
  if (k > kExtensionHardCap) throw std::invalid_argument("extend: guessed support over the hard cap");

  Vec z_dbl(z.begin(), z.end());
  Vec image = instance.apply(z_dbl);
  Eigen::VectorXd rhs(instance.m);
  for (int i = 0; i < instance.m; ++i) rhs[i] = instance.b[i] - image[i];

  Eigen::MatrixXd a(instance.m, k);
  std::vector<double> bounds(k);
  for (int c = 0; c < k; ++c) {
    int j = guessed_support[c];
    bounds[c] = static_cast<double>(instance.bound(j));
    for (int i = 0; i < instance.m; ++i) a(i, c) = static_cast<double>(instance.a(i, j));
  }

  Vec x = z_dbl;
  if (k > 0) {
    auto result = BoxLeastSquares(std::move(a), std::move(bounds)).solve(rhs);
    for (int c = 0; c < k; ++c) x[guessed_support[c]] = result.g[c];
  }
  SparseSolution sol = make_sparse_solution(instance, std::move(x));
  if (static_cast<std::int64_t>(sol.support.size()) > instance.sigma_eff())
    throw std::domain_error("extend: composite support exceeds the sparsity budget");
  return sol;
}

}  // namespace cubesparse
