#include "cubesparse/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cubesparse {

bool ProblemInstance::has_general_bounds() const {
  for (std::int64_t ui : u)
    if (ui != 1) return true;
  return false;
}

std::int64_t ProblemInstance::max_abs_entry() const {
  std::int64_t best = 0;
  for (std::int64_t v : matrix) best = std::max(best, v < 0 ? -v : v);
  return best;
}

std::int64_t ProblemInstance::max_bound() const {
  std::int64_t best = 1;
  for (std::int64_t ui : u) best = std::max(best, ui);
  return best;
}

double ProblemInstance::max_column_norm() const {
  double best = 0.0;
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      double v = static_cast<double>(a(i, j));
      s += v * v;
    }
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

Vec ProblemInstance::apply(const Vec& x) const {
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("apply: x has wrong length");
  Vec out(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    const std::int64_t* row = matrix.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) s += static_cast<double>(row[j]) * x[j];
    out[i] = s;
  }
  return out;
}

Vec ProblemInstance::apply_transposed(const Vec& r) const {
  if (static_cast<int>(r.size()) != m) throw std::invalid_argument("apply_transposed: r has wrong length");
  Vec out(n, 0.0);
  for (int i = 0; i < m; ++i) {
    const std::int64_t* row = matrix.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) out[j] += static_cast<double>(row[j]) * r[i];
  }
  return out;
}

namespace {

void check_common(int m, int n, std::size_t a_size, std::size_t b_size, std::int64_t sigma,
                  const std::vector<std::int64_t>& u, bool u_present,
                  std::vector<std::string>& out) {
  if (m < 1) out.push_back("m must be >= 1");
  if (n < 1) out.push_back("n must be >= 1");
  if (m >= 1 && n >= 1 && a_size != static_cast<std::size_t>(m) * n)
    out.push_back("A must have m*n entries");
  if (m >= 1 && b_size != static_cast<std::size_t>(m)) out.push_back("b must have m entries");
  if (sigma < 1) out.push_back("sigma must be >= 1");
  if (u_present) {
    if (n >= 1 && u.size() != static_cast<std::size_t>(n)) out.push_back("u must have n entries");
    for (std::int64_t ui : u)
      if (ui < 1) {
        out.push_back("u entries must be >= 1");
        break;
      }
  }
}

}  // namespace

ValidationResult validate(const InstanceDraft& draft) {
  ValidationResult result;
  check_common(draft.m, draft.n, draft.matrix.size(), draft.b.size(), draft.sigma, draft.u,
               draft.u_present, result.violations);
  for (double v : draft.matrix) {
    if (!std::isfinite(v) || v != std::floor(v)) {
      result.violations.push_back("A must be integral");
      break;
    }
  }
  for (double v : draft.b) {
    if (!std::isfinite(v)) {
      result.violations.push_back("b entries must be finite");
      break;
    }
  }
  return result;
}

ProblemInstance finalize(const InstanceDraft& draft) {
  ValidationResult check = validate(draft);
  if (!check.ok()) throw std::invalid_argument("invalid instance: " + check.violations.front());
  ProblemInstance instance;
  instance.m = draft.m;
  instance.n = draft.n;
  instance.matrix.reserve(draft.matrix.size());
  for (double v : draft.matrix) instance.matrix.push_back(static_cast<std::int64_t>(std::llround(v)));
  instance.b = draft.b;
  instance.sigma = draft.sigma;
  if (draft.u_present) instance.u = draft.u;
  return instance;
}

ValidationResult validate(const ProblemInstance& instance) {
  ValidationResult result;
  check_common(instance.m, instance.n, instance.matrix.size(), instance.b.size(), instance.sigma,
               instance.u, !instance.u.empty(), result.violations);
  for (double v : instance.b) {
    if (!std::isfinite(v)) {
      result.violations.push_back("b entries must be finite");
      break;
    }
  }
  return result;
}

double compensated_sum(const Vec& values) {
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double norm2(const Vec& r) {
  Vec squares(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) squares[i] = r[i] * r[i];
  double s = compensated_sum(squares);
  return s > 0.0 ? std::sqrt(s) : 0.0;
}

double objective(const ProblemInstance& instance, const Vec& x) {
  Vec r = instance.apply(x);
  for (int i = 0; i < instance.m; ++i) r[i] -= instance.b[i];
  return norm2(r);
}

SparseSolution make_sparse_solution(const ProblemInstance& instance, Vec x) {
  if (static_cast<int>(x.size()) != instance.n)
    throw std::invalid_argument("make_sparse_solution: x has wrong length");
  SparseSolution sol;
  for (double& v : x)
    if (std::abs(v) <= kZeroTol) v = 0.0;
  for (int j = 0; j < instance.n; ++j)
    if (x[j] != 0.0) sol.support.push_back(j);
  sol.x = std::move(x);
  sol.objective = objective(instance, sol.x);
  return sol;
}

bool solution_less(const SparseSolution& a, const SparseSolution& b) {
  if (a.objective != b.objective) return a.objective < b.objective;
  if (a.support.size() != b.support.size()) return a.support.size() < b.support.size();
  return a.x < b.x;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t s = seed;
  for (auto& word : state_) word = splitmix64(s);
}

// xoshiro256**
std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
  std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t draw;
  do {
    draw = next_u64();
  } while (draw >= limit);
  return lo + static_cast<std::int64_t>(draw % span);
}

Rng Rng::fork(std::uint64_t stream) const {
  std::uint64_t s = seed_ ^ (0x9e3779b97f4a7c15ULL + stream * 0xd1342543de82ef95ULL);
  splitmix64(s);
  return Rng(s);
}

}  // namespace cubesparse
