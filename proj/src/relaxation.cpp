#include "cubesparse/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace cubesparse {

namespace {

std::vector<std::int64_t> effective_bounds(const ProblemInstance& instance) {
  if (!instance.u.empty()) return instance.u;
  return std::vector<std::int64_t>(instance.n, 1);
}

}  // namespace

Vec linear_minimization(const Vec& gradient, std::int64_t sigma,
                        const std::vector<std::int64_t>& u) {
  const int n = static_cast<int>(gradient.size());
  if (static_cast<int>(u.size()) != n)
    throw std::invalid_argument("linear_minimization: bounds length mismatch");
  std::vector<int> candidates;
  candidates.reserve(n);
  for (int i = 0; i < n; ++i)
    if (gradient[i] < 0.0) candidates.push_back(i);
  // Most negative u_i * gradient_i first; index breaks ties.
  std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    double ca = static_cast<double>(u[a]) * gradient[a];
    double cb = static_cast<double>(u[b]) * gradient[b];
    if (ca != cb) return ca < cb;
    return a < b;
  });
  std::int64_t budget = std::min<std::int64_t>(sigma, n);
  Vec s(n, 0.0);
  for (std::size_t k = 0; k < candidates.size() && static_cast<std::int64_t>(k) < budget; ++k)
    s[candidates[k]] = static_cast<double>(u[candidates[k]]);
  return s;
}

Vec linear_minimization(const ProblemInstance& instance, const Vec& gradient) {
  return linear_minimization(gradient, instance.sigma_eff(), effective_bounds(instance));
}

namespace {

// Vertices of P are the points with x_i in {0, u_i} and at most sigma
// nonzeros; a sorted support list identifies one.
using VertexKey = std::vector<int>;

VertexKey support_of(const Vec& v) {
  VertexKey key;
  for (int i = 0; i < static_cast<int>(v.size()); ++i)
    if (v[i] != 0.0) key.push_back(i);
  return key;
}

struct AfwState {
  const ProblemInstance& instance;
  const std::vector<std::int64_t>& bounds;
  Vec x;
  Vec ax;
  std::map<VertexKey, double> weights;

  explicit AfwState(const ProblemInstance& inst, const std::vector<std::int64_t>& u)
      : instance(inst), bounds(u), x(inst.n, 0.0), ax(inst.m, 0.0) {
    weights[VertexKey{}] = 1.0;
  }

  Vec vertex_point(const VertexKey& key) const {
    Vec v(instance.n, 0.0);
    for (int i : key) v[i] = static_cast<double>(bounds[i]);
    return v;
  }

  Vec vertex_image(const VertexKey& key) const {
    Vec img(instance.m, 0.0);
    for (int i : key)
      for (int r = 0; r < instance.m; ++r)
        img[r] += static_cast<double>(instance.a(r, i)) * static_cast<double>(bounds[i]);
    return img;
  }

  double vertex_dot(const VertexKey& key, const Vec& gradient) const {
    double s = 0.0;
    for (int i : key) s += static_cast<double>(bounds[i]) * gradient[i];
    return s;
  }

  void resync() {
    double total = 0.0;
    for (auto& [key, w] : weights) total += w;
    std::fill(x.begin(), x.end(), 0.0);
    for (auto& [key, w] : weights) {
      w /= total;
      for (int i : key) x[i] += w * static_cast<double>(bounds[i]);
    }
    ax = instance.apply(x);
  }
};

// Clamp into the box and rescale until the budget constraint holds in
// double arithmetic; the returned point is feasible, not just nearly so.
void enforce_feasibility(Vec& x, std::int64_t sigma, const std::vector<std::int64_t>& u) {
  const double budget_cap = static_cast<double>(std::min<std::int64_t>(sigma, x.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::clamp(x[i], 0.0, static_cast<double>(u[i]));
  for (int round = 0; round < 64; ++round) {
    double budget = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) budget += x[i] / static_cast<double>(u[i]);
    if (budget <= budget_cap) return;
    double scale = budget_cap / budget;
    if (round > 0) scale *= 1.0 - 4.0 * round * std::numeric_limits<double>::epsilon();
    for (double& v : x) v *= scale;
  }
}

}  // namespace

RelaxedSolution solve_relaxation(const ProblemInstance& instance, double epsilon,
                                 long max_iters) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("solve_relaxation: epsilon must be > 0");
  const auto bounds = effective_bounds(instance);
  const double target = epsilon * epsilon;
  const std::int64_t sigma = instance.sigma_eff();

  AfwState state(instance, bounds);
  double best_gap = std::numeric_limits<double>::infinity();
  Vec best_x = state.x;
  bool certified = false;
  long iter = 0;

  for (; iter < max_iters; ++iter) {
    if ((iter & 0xff) == 0xff) state.resync();

    Vec r(instance.m);
    for (int i = 0; i < instance.m; ++i) r[i] = state.ax[i] - instance.b[i];
    Vec grad = instance.apply_transposed(r);
    for (double& g : grad) g *= 2.0;

    Vec s = linear_minimization(grad, sigma, bounds);
    VertexKey s_key = support_of(s);

    double grad_dot_x = 0.0;
    for (int i = 0; i < instance.n; ++i) grad_dot_x += grad[i] * state.x[i];
    double grad_dot_s = 0.0;
    for (int i : s_key) grad_dot_s += grad[i] * s[i];
    double gap = grad_dot_x - grad_dot_s;

    if (gap < best_gap) {
      best_gap = gap;
      best_x = state.x;
    }
    if (gap <= target) {
      certified = true;
      break;
    }

    // Away vertex: the active vertex with the largest gradient inner product.
    const VertexKey* away_key = nullptr;
    double away_dot = -std::numeric_limits<double>::infinity();
    for (const auto& [key, w] : state.weights) {
      double d = state.vertex_dot(key, grad);
      if (d > away_dot) {
        away_dot = d;
        away_key = &key;
      }
    }
    double fw_gain = gap;                    // grad^T (x - s)
    double away_gain = away_dot - grad_dot_x;  // grad^T (v - x)

    bool fw_step = fw_gain >= away_gain || state.weights.size() == 1;
    Vec ad(instance.m);
    double gamma_max;
    if (fw_step) {
      Vec as = state.vertex_image(s_key);
      for (int i = 0; i < instance.m; ++i) ad[i] = as[i] - state.ax[i];
      gamma_max = 1.0;
    } else {
      Vec av = state.vertex_image(*away_key);
      for (int i = 0; i < instance.m; ++i) ad[i] = state.ax[i] - av[i];
      double w = state.weights.at(*away_key);
      gamma_max = w >= 1.0 ? std::numeric_limits<double>::infinity() : w / (1.0 - w);
    }

    double denom = 0.0, numer = 0.0;
    for (int i = 0; i < instance.m; ++i) {
      denom += ad[i] * ad[i];
      numer -= r[i] * ad[i];
    }
    if (denom <= 0.0) {
      // Directional image is zero; the measured gap is pure round-off.
      certified = gap <= target;
      break;
    }
    double gamma = std::clamp(numer / denom, 0.0, gamma_max);
    if (gamma <= 0.0) break;  // no further float progress possible

    if (fw_step) {
      for (auto& [key, w] : state.weights) w *= 1.0 - gamma;
      state.weights[s_key] += gamma;
      for (int i = 0; i < instance.n; ++i) state.x[i] *= 1.0 - gamma;
      for (int i : s_key) state.x[i] += gamma * static_cast<double>(bounds[i]);
      for (int i = 0; i < instance.m; ++i) state.ax[i] += gamma * ad[i];
      if (gamma >= 1.0) {
        state.weights.clear();
        state.weights[s_key] = 1.0;
      }
    } else {
      VertexKey away = *away_key;
      for (auto& [key, w] : state.weights) w *= 1.0 + gamma;
      auto it = state.weights.find(away);
      it->second -= gamma;
      if (it->second <= 1e-14) state.weights.erase(it);
      Vec av = state.vertex_point(away);
      for (int i = 0; i < instance.n; ++i)
        state.x[i] = (1.0 + gamma) * state.x[i] - gamma * av[i];
      for (int i = 0; i < instance.m; ++i) state.ax[i] += gamma * ad[i];
    }
  }

  RelaxedSolution out;
  out.x_bar = certified ? state.x : best_x;
  out.certified_gap = std::max(certified ? std::min(best_gap, target) : best_gap, 0.0);
  out.iterations = iter;
  out.certified = certified;
  enforce_feasibility(out.x_bar, sigma, bounds);
  out.objective = objective(instance, out.x_bar);
  return out;
}

namespace {

// One nonzero rational kernel vector of the integer matrix formed by the
// `cols` columns of A, via exact Gauss-Jordan elimination. Requires more
// columns than the rank (callers pass |cols| > m).
std::vector<Rat> kernel_vector(const ProblemInstance& instance, const std::vector<int>& cols) {
  const int m = instance.m;
  const int k = static_cast<int>(cols.size());
  std::vector<std::vector<Rat>> mat(m, std::vector<Rat>(k));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) mat[i][j] = Rat(instance.a(i, cols[j]));

  std::vector<int> pivot_col;
  int rank = 0;
  for (int col = 0; col < k && rank < m; ++col) {
    int piv = -1;
    for (int row = rank; row < m; ++row)
      if (mat[row][col] != 0) {
        piv = row;
        break;
      }
    if (piv < 0) continue;
    std::swap(mat[rank], mat[piv]);
    Rat inv = mat[rank][col];
    for (int j = col; j < k; ++j) mat[rank][j] /= inv;
    for (int row = 0; row < m; ++row) {
      if (row == rank || mat[row][col] == 0) continue;
      Rat f = mat[row][col];
      for (int j = col; j < k; ++j) mat[row][j] -= f * mat[rank][j];
    }
    pivot_col.push_back(col);
    ++rank;
  }

  // First free column spawns the kernel vector.
  std::vector<bool> is_pivot(k, false);
  for (int c : pivot_col) is_pivot[c] = true;
  int free_col = -1;
  for (int c = 0; c < k; ++c)
    if (!is_pivot[c]) {
      free_col = c;
      break;
    }
  if (free_col < 0) throw std::logic_error("kernel_vector: matrix has full column rank");

  std::vector<Rat> d(k, Rat(0));
  d[free_col] = 1;
  for (int p = 0; p < rank; ++p) d[pivot_col[p]] = -mat[p][free_col];
  return d;
}

}  // namespace

int count_strictly_fractional(const ProblemInstance& instance, const std::vector<Rat>& x) {
  int count = 0;
  for (int i = 0; i < instance.n; ++i)
    if (x[i] > 0 && x[i] < Rat(instance.bound(i))) ++count;
  return count;
}

std::vector<Rat> reduce_to_few_fractionals_exact(const ProblemInstance& instance,
                                                 const std::vector<Rat>& x_in) {
  const int n = instance.n;
  if (static_cast<int>(x_in.size()) != n)
    throw std::invalid_argument("reduce: x has wrong length");
  std::vector<Rat> x = x_in;

  Rat budget(0);
  for (int i = 0; i < n; ++i) {
    Rat ub(instance.bound(i));
    if (x[i] < 0 || x[i] > ub) throw std::invalid_argument("reduce: x violates bounds");
    budget += x[i] / ub;
  }
  if (budget > Rat(instance.sigma_eff())) throw std::invalid_argument("reduce: x violates budget");

  while (true) {
    std::vector<int> frac;
    for (int i = 0; i < n; ++i)
      if (x[i] > 0 && x[i] < Rat(instance.bound(i))) frac.push_back(i);
    if (static_cast<int>(frac.size()) <= instance.m) break;

    std::vector<Rat> d = kernel_vector(instance, frac);

    Rat budget_rate(0);
    for (std::size_t j = 0; j < frac.size(); ++j) budget_rate += d[j] / Rat(instance.bound(frac[j]));
    if (budget_rate > 0)
      for (Rat& v : d) v = -v;

    // Largest step keeping every walked coordinate inside its bounds.
    bool have_step = false;
    Rat step(0);
    for (std::size_t j = 0; j < frac.size(); ++j) {
      if (d[j] == 0) continue;
      Rat room = d[j] > 0 ? (Rat(instance.bound(frac[j])) - x[frac[j]]) / d[j] : x[frac[j]] / -d[j];
      if (!have_step || room < step) {
        step = room;
        have_step = true;
      }
    }
    if (!have_step) throw std::logic_error("reduce: zero kernel vector");

    for (std::size_t j = 0; j < frac.size(); ++j) x[frac[j]] += step * d[j];
  }
  return x;
}

Vec reduce_to_few_fractionals(const ProblemInstance& instance, const Vec& x) {
  std::vector<Rat> exact = rats_from_doubles(x);
  // Float dust from the relaxation solver may sit a hair outside the exact
  // feasible region; repair tiny violations, reject real ones.
  Rat budget(0);
  for (int i = 0; i < instance.n; ++i) {
    Rat ub(instance.bound(i));
    if (exact[i] < 0) {
      if (exact[i] < Rat(-1e-6)) throw std::invalid_argument("reduce: x violates bounds");
      exact[i] = 0;
    }
    if (exact[i] > ub) {
      if (exact[i] > ub + Rat(1e-6)) throw std::invalid_argument("reduce: x violates bounds");
      exact[i] = ub;
    }
    budget += exact[i] / ub;
  }
  Rat cap(instance.sigma_eff());
  if (budget > cap) {
    if (budget > cap + Rat(1e-6)) throw std::invalid_argument("reduce: x violates budget");
    Rat scale = cap / budget;
    for (Rat& v : exact) v *= scale;
  }
  return rats_to_doubles(reduce_to_few_fractionals_exact(instance, exact));
}

}  // namespace cubesparse
