#include "cubesparse/solver.hpp"

#include <omp.h>

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>

#include "cubesparse/extension.hpp"
#include "cubesparse/feasibility.hpp"

namespace cubesparse {

namespace {

std::vector<std::vector<int>> support_guesses(int n, int max_size, bool exhaustive,
                                              std::uint64_t cap, bool* truncated) {
  std::vector<std::vector<int>> guesses;
  int first = exhaustive ? 0 : max_size;
  for (int k = first; k <= max_size; ++k) {
    std::vector<int> combo(k);
    for (int i = 0; i < k; ++i) combo[i] = i;
    while (true) {
      if (guesses.size() >= cap) {
        *truncated = true;
        return guesses;
      }
      guesses.push_back(combo);
      if (k == 0) break;
      int pos = k - 1;
      while (pos >= 0 && combo[pos] == n - k + pos) --pos;
      if (pos < 0) break;
      ++combo[pos];
      for (int i = pos + 1; i < k; ++i) combo[i] = combo[i - 1] + 1;
    }
  }
  return guesses;
}

struct Incumbent {
  std::optional<SparseSolution> best;

  void offer(SparseSolution candidate) {
    if (!best || solution_less(candidate, *best)) best = std::move(candidate);
  }
};

// Columns with equal value vectors and equal upper bounds are interchangeable
// in every feasibility question, so guesses that exclude the same multiset of
// column classes share one exact table. A witness computed against the
// canonical representative of the class multiset remaps onto columns outside
// the actual guess, class by class.
struct ColumnClasses {
  std::vector<int> class_of;               // column -> class id
  std::vector<std::vector<int>> members;   // class id -> columns, ascending

  explicit ColumnClasses(const ProblemInstance& instance) {
    std::map<std::vector<std::int64_t>, int> ids;
    class_of.resize(instance.n);
    for (int j = 0; j < instance.n; ++j) {
      std::vector<std::int64_t> key(instance.m + 1);
      for (int i = 0; i < instance.m; ++i) key[i] = instance.a(i, j);
      key[instance.m] = instance.bound(j);
      auto [it, fresh] = ids.try_emplace(key, static_cast<int>(members.size()));
      if (fresh) members.emplace_back();
      class_of[j] = it->second;
      members[it->second].push_back(j);
    }
  }

  std::vector<int> key_of_guess(const std::vector<int>& guess) const {
    std::vector<int> key;
    key.reserve(guess.size());
    for (int col : guess) key.push_back(class_of[col]);
    std::sort(key.begin(), key.end());
    return key;
  }

  // Excludes, for each class in the multiset, its first occurrences.
  std::vector<bool> canonical_exclusion(const std::vector<int>& key, int n) const {
    std::vector<bool> excluded(n, false);
    std::size_t i = 0;
    while (i < key.size()) {
      std::size_t j = i;
      while (j < key.size() && key[j] == key[i]) ++j;
      for (std::size_t c = 0; c < j - i; ++c) excluded[members[key[i]][c]] = true;
      i = j;
    }
    return excluded;
  }

  // Moves the support of `witness` off the guessed columns, class by class,
  // onto the smallest available column indices. Always possible because the
  // canonical exclusion removed the same multiset of classes.
  std::vector<std::int64_t> remap(const std::vector<std::int64_t>& witness,
                                  const std::vector<bool>& in_guess) const {
    std::vector<std::int64_t> out(witness.size(), 0);
    std::vector<std::vector<std::pair<int, std::int64_t>>> used(members.size());
    for (int j = 0; j < static_cast<int>(witness.size()); ++j)
      if (witness[j] != 0) used[class_of[j]].push_back({j, witness[j]});
    for (std::size_t cls = 0; cls < members.size(); ++cls) {
      if (used[cls].empty()) continue;
      std::size_t next = 0;
      for (auto [col, value] : used[cls]) {
        while (next < members[cls].size() && in_guess[members[cls][next]]) ++next;
        if (next >= members[cls].size())
          throw std::logic_error("witness remap ran out of columns");
        out[members[cls][next++]] = value;
      }
    }
    return out;
  }
};

// In-box reachable sums with the counts they are reachable at over all
// columns; candidates outside this list are infeasible for every guess.
struct CandidateSums {
  std::vector<std::vector<std::int64_t>> sums;
  std::vector<std::vector<int>> counts;  // ascending per sum
};

struct GuessScratch {
  std::vector<bool> in_guess;
  std::unique_ptr<BoxLeastSquares> box_ls;
};

}  // namespace

SolveReport solve_exact(const ProblemInstance& instance, const SolverConfig& config) {
  auto t0 = std::chrono::steady_clock::now();
  {
    ValidationResult check = validate(instance);
    if (!check.ok()) throw std::invalid_argument("solve_exact: " + check.violations.front());
  }

  SolveReport report;
  const int n = instance.n;
  const int m = instance.m;
  const std::int64_t sigma = instance.sigma_eff();
  const double a_max = static_cast<double>(instance.max_abs_entry());

  double eps_req = config.epsilon;
  if (eps_req < 0.0) eps_req = std::sqrt(static_cast<double>(m)) * a_max;
  eps_req = std::max(eps_req, 1e-12);

  report.relaxation = solve_relaxation(instance, eps_req, config.relax_max_iters);
  const Vec& x_bar = report.relaxation.x_bar;
  // The certificate that was actually achieved is what the proximity
  // argument needs; an over-achieving solve shrinks the box, an exhausted
  // budget enlarges it but keeps the search exact.
  double eps_eff = std::sqrt(std::max(report.relaxation.certified_gap, 0.0)) + 1e-9;
  report.bounds = compute_bounds(instance, eps_eff);
  report.column_norm_radius = column_norm_radius(instance, x_bar);

  Vec center = instance.apply(x_bar);
  BoxEnumerator box(center, report.bounds.radius_eps * report.bounds.u_factor, config.enum_cap);

  // Every reachable (sum, count) over all columns, restricted to the box.
  SubsetSumTable global(instance, sigma);
  report.stats.dp_states += global.states();

  CandidateSums candidates;
  {
    std::map<std::vector<std::int64_t>, int> ids;
    for (const auto& entry : global.entries()) {
      if (!box.contains(entry.sum)) continue;
      auto [it, fresh] = ids.try_emplace(entry.sum, -1);
      if (fresh) {
        it->second = static_cast<int>(candidates.sums.size());
        candidates.sums.push_back(entry.sum);
        candidates.counts.emplace_back();
      }
      candidates.counts[it->second].push_back(entry.count);
    }
    for (auto& list : candidates.counts) std::sort(list.begin(), list.end());
  }

  const int max_guess = static_cast<int>(
      std::min<std::int64_t>({static_cast<std::int64_t>(m), sigma, static_cast<std::int64_t>(n)}));
  bool truncated = false;
  std::vector<std::vector<int>> guesses =
      support_guesses(n, max_guess, config.exhaustive_support, config.support_guess_cap, &truncated);
  report.stats.truncated = truncated;

  const int workers = config.threads > 0 ? config.threads : omp_get_max_threads();

  // One exact table per distinct excluded class multiset.
  ColumnClasses classes(instance);
  std::map<std::vector<int>, std::unique_ptr<SubsetSumTable>> tables;
  for (const auto& guess : guesses) tables.try_emplace(classes.key_of_guess(guess), nullptr);
  {
    std::vector<decltype(tables)::iterator> work;
    for (auto it = tables.begin(); it != tables.end(); ++it) work.push_back(it);
    std::uint64_t table_states = 0;
#pragma omp parallel for num_threads(workers) schedule(dynamic) reduction(+ : table_states) if (workers > 1)
    for (std::size_t i = 0; i < work.size(); ++i) {
      const std::vector<int>& key = work[i]->first;
      std::int64_t budget = sigma - static_cast<std::int64_t>(key.size());
      work[i]->second = std::make_unique<SubsetSumTable>(
          instance, budget, classes.canonical_exclusion(key, n));
      table_states += work[i]->second->states();
    }
    report.stats.dp_states += table_states;
  }

  // Safety candidates: zero vector and the rounded, vertex-reduced relaxation.
  Incumbent seed;
  seed.offer(make_sparse_solution(instance, Vec(n, 0.0)));
  try {
    Vec reduced = reduce_to_few_fractionals(instance, x_bar);
    seed.offer(round_fractional_part(instance, reduced));
  } catch (const std::domain_error&) {
    // With general bounds the rounding can overshoot the support budget;
    // it is only a warm start, the enumeration below is what is exact.
  }

  auto scan_guess = [&](const std::vector<int>& guess, Incumbent& incumbent, SolveStats& stats,
                        GuessScratch& scratch) {
    const std::int64_t budget = sigma - static_cast<std::int64_t>(guess.size());
    stats.support_guesses += 1;
    stats.box_points += box.size();

    scratch.in_guess.assign(n, false);
    for (int col : guess) scratch.in_guess[col] = true;
    scratch.box_ls.reset();

    const SubsetSumTable& table = *tables.at(classes.key_of_guess(guess));

    for (std::size_t sid = 0; sid < candidates.sums.size(); ++sid) {
      const auto& sum = candidates.sums[sid];
      if (candidates.counts[sid].front() > budget) continue;
      stats.feasibility_calls += 1;

      std::vector<std::int64_t> witness;
      bool found = false;
      for (int c : candidates.counts[sid]) {
        if (c > budget) break;
        if (table.reachable(sum, c)) {
          witness = classes.remap(table.witness(sum, c), scratch.in_guess);
          found = true;
          break;
        }
      }
      if (!found) continue;
      stats.feasible_rhs += 1;

      if (!scratch.box_ls) {
        Eigen::MatrixXd cols(m, guess.size());
        std::vector<double> bounds(guess.size());
        for (std::size_t c = 0; c < guess.size(); ++c) {
          bounds[c] = static_cast<double>(instance.bound(guess[c]));
          for (int i = 0; i < m; ++i) cols(i, c) = static_cast<double>(instance.a(i, guess[c]));
        }
        scratch.box_ls = std::make_unique<BoxLeastSquares>(std::move(cols), std::move(bounds));
      }
      Eigen::VectorXd rhs(m);
      for (int i = 0; i < m; ++i) rhs[i] = instance.b[i] - static_cast<double>(sum[i]);
      auto ext = scratch.box_ls->solve(rhs);
      stats.extensions += 1;

      double incumbent_obj =
          incumbent.best ? incumbent.best->objective : std::numeric_limits<double>::infinity();
      if (ext.objective > incumbent_obj + 1e-9) continue;

      Vec x(witness.begin(), witness.end());
      for (std::size_t c = 0; c < guess.size(); ++c) x[guess[c]] = ext.g[c];
      incumbent.offer(make_sparse_solution(instance, std::move(x)));
    }
  };

  std::vector<Incumbent> incumbents(workers);
  std::vector<SolveStats> stats(workers);
  incumbents[0] = seed;

  if (workers == 1) {
    // Serial reference path: same per-guess kernel, plain loop.
    GuessScratch scratch;
    for (const auto& guess : guesses) scan_guess(guess, incumbents[0], stats[0], scratch);
  } else {
    std::vector<GuessScratch> scratch(workers);
#pragma omp parallel for num_threads(workers) schedule(dynamic)
    for (std::size_t g = 0; g < guesses.size(); ++g) {
      int t = omp_get_thread_num();
      scan_guess(guesses[g], incumbents[t], stats[t], scratch[t]);
    }
  }

  Incumbent final;
  final.offer(*seed.best);
  for (auto& inc : incumbents)
    if (inc.best) final.offer(std::move(*inc.best));
  report.best = std::move(*final.best);

  for (const auto& s : stats) {
    report.stats.support_guesses += s.support_guesses;
    report.stats.box_points += s.box_points;
    report.stats.feasibility_calls += s.feasibility_calls;
    report.stats.feasible_rhs += s.feasible_rhs;
    report.stats.extensions += s.extensions;
    report.stats.dp_states += s.dp_states;
  }
  report.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

namespace {

std::vector<std::vector<int>> all_supports_up_to(int n, int max_size) {
  bool ignored = false;
  return support_guesses(n, max_size, true, UINT64_MAX, &ignored);
}

}  // namespace

SparseSolution solve_oracle(const ProblemInstance& instance, std::uint64_t work_cap) {
  {
    ValidationResult check = validate(instance);
    if (!check.ok()) throw std::invalid_argument("solve_oracle: " + check.violations.front());
  }
  const int n = instance.n;
  const int sigma = static_cast<int>(instance.sigma_eff());

  long double work = 0.0L, binom = 1.0L, pow3 = 1.0L;
  for (int k = 0; k <= sigma; ++k) {
    work += binom * pow3;
    binom = binom * (n - k) / (k + 1);
    pow3 *= 3.0L;
  }
  if (work > static_cast<long double>(work_cap))
    throw EnumerationCapExceeded("oracle sweep would exceed its work cap");

  std::optional<SparseSolution> best;
  for (const auto& support : all_supports_up_to(n, sigma)) {
    const int k = static_cast<int>(support.size());
    Eigen::MatrixXd cols(instance.m, k);
    std::vector<double> bounds(k);
    for (int c = 0; c < k; ++c) {
      bounds[c] = static_cast<double>(instance.bound(support[c]));
      for (int i = 0; i < instance.m; ++i)
        cols(i, c) = static_cast<double>(instance.a(i, support[c]));
    }
    Eigen::VectorXd rhs(instance.m);
    for (int i = 0; i < instance.m; ++i) rhs[i] = instance.b[i];
    auto res = BoxLeastSquares(std::move(cols), std::move(bounds)).solve(rhs);
    Vec x(n, 0.0);
    for (int c = 0; c < k; ++c) x[support[c]] = res.g[c];
    SparseSolution candidate = make_sparse_solution(instance, std::move(x));
    if (!best || solution_less(candidate, *best)) best = std::move(candidate);
  }
  return *best;
}

SparseSolution solve_m1_fast(const ProblemInstance& instance) {
  if (instance.m != 1) throw std::invalid_argument("solve_m1_fast: requires m = 1");
  RelaxedSolution relax = solve_relaxation(instance, 1e-6);
  Vec reduced = reduce_to_few_fractionals(instance, relax.x_bar);
  SparseSolution sol = make_sparse_solution(instance, std::move(reduced));
  if (static_cast<std::int64_t>(sol.support.size()) > instance.sigma_eff())
    throw std::logic_error("solve_m1_fast: reduction exceeded the support budget");
  return sol;
}

}  // namespace cubesparse
