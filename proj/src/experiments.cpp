#include "cubesparse/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cubesparse/proximity.hpp"
#include "cubesparse/relaxation.hpp"
#include "cubesparse/solver.hpp"

namespace cubesparse {

WilsonInterval wilson_interval(double frequency, std::uint64_t trials, double z) {
  WilsonInterval ci;
  if (trials == 0) return ci;
  double n = static_cast<double>(trials);
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (frequency + z2 / (2.0 * n)) / denom;
  ci.halfwidth = z * std::sqrt(frequency * (1.0 - frequency) / n + z2 / (4.0 * n * n)) / denom;
  ci.low = std::max(0.0, center - ci.halfwidth);
  ci.high = std::min(1.0, center + ci.halfwidth);
  return ci;
}

double far_target_bound(const ProblemInstance& instance, double lambda) {
  double mu = static_cast<double>(instance.sigma_eff()) *
              std::sqrt(static_cast<double>(instance.m)) *
              static_cast<double>(instance.max_abs_entry());
  if (lambda <= 0.0) return 0.0;
  return std::pow(lambda / (lambda + mu), static_cast<double>(instance.m));
}

Vec sample_from_q_plus_ball(const ProblemInstance& instance, double lambda, Rng& rng,
                            double membership_tol, std::uint64_t rejection_budget) {
  if (lambda < 0.0) throw std::invalid_argument("sample_from_q_plus_ball: lambda must be >= 0");
  const int m = instance.m;
  const int n = instance.n;

  // Bounding box of Q + lambda*B, coordinate extremes by the linear oracle.
  Vec lo(m), hi(m);
  std::vector<std::int64_t> bounds(n, 1);
  if (!instance.u.empty()) bounds = instance.u;
  for (int i = 0; i < m; ++i) {
    Vec row(n), neg_row(n);
    for (int j = 0; j < n; ++j) {
      row[j] = static_cast<double>(instance.a(i, j));
      neg_row[j] = -row[j];
    }
    Vec arg_min = linear_minimization(row, instance.sigma_eff(), bounds);
    Vec arg_max = linear_minimization(neg_row, instance.sigma_eff(), bounds);
    double v_min = 0.0, v_max = 0.0;
    for (int j = 0; j < n; ++j) {
      v_min += row[j] * arg_min[j];
      v_max += row[j] * arg_max[j];
    }
    lo[i] = v_min - lambda;
    hi[i] = v_max + lambda;
  }

  ProblemInstance probe = instance;
  for (std::uint64_t attempt = 0; attempt < rejection_budget; ++attempt) {
    Vec proposal(m);
    for (int i = 0; i < m; ++i) proposal[i] = rng.uniform(lo[i], hi[i]);
    probe.b = proposal;
    double eps = std::max(membership_tol, 1e-7 * (1.0 + norm2(proposal)));
    RelaxedSolution projection = solve_relaxation(probe, eps);
    double slack = std::sqrt(std::max(projection.certified_gap, 0.0));
    if (projection.objective <= lambda + slack) return proposal;
  }
  throw EnumerationCapExceeded(
      "sample_from_q_plus_ball: rejection budget exhausted; raise the budget or lambda");
}

namespace {

ExperimentReport finish_report(std::vector<TrialRecord> records, double lambda, double tol,
                               double rho) {
  ExperimentReport report;
  report.lambda = lambda;
  report.membership_tol = tol;
  report.rho = rho;
  std::uint64_t hits = 0;
  for (const auto& r : records)
    if (r.success) ++hits;
  report.frequency =
      records.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(records.size());
  report.ci = wilson_interval(report.frequency, records.size());
  report.trials = std::move(records);
  return report;
}

}  // namespace

ExperimentReport check_interior_exactness(const ProblemInstance& instance, std::uint64_t trials,
                                          std::uint64_t seed, int threads) {
  const std::int64_t sigma = instance.sigma_eff();
  if (sigma < instance.m)
    throw std::invalid_argument("check_interior_exactness: requires sigma >= m");
  if (trials < 1) throw std::invalid_argument("check_interior_exactness: trials must be >= 1");

  const double shrink =
      static_cast<double>(sigma - instance.m + 1) / static_cast<double>(sigma);
  const double budget_cap = static_cast<double>(sigma - instance.m + 1);
  const Rng root(seed);
  std::vector<TrialRecord> records(trials);
  const int workers = threads > 0 ? threads : omp_get_max_threads();

  auto run_trial = [&](std::uint64_t t) {
    Rng rng = root.fork(t);
    Vec x(instance.n);
    for (std::uint64_t attempt = 0;; ++attempt) {
      if (attempt >= 1'000'000)
        throw EnumerationCapExceeded("check_interior_exactness: rejection budget exhausted");
      double budget = 0.0;
      for (int j = 0; j < instance.n; ++j) {
        x[j] = rng.uniform(0.0, shrink * static_cast<double>(instance.bound(j)));
        budget += x[j] / static_cast<double>(instance.bound(j));
      }
      if (budget <= budget_cap) break;
    }
    ProblemInstance shifted = instance;
    shifted.b = instance.apply(x);

    SolverConfig config;
    config.threads = 1;  // trials parallelize, each solve stays serial
    SolveReport report = solve_exact(shifted, config);

    TrialRecord rec;
    rec.b = shifted.b;
    rec.objective_relax = report.relaxation.objective;
    rec.objective_exact = report.best.objective;
    rec.success = report.best.objective <= 1e-6;
    records[t] = std::move(rec);
  };

  if (workers == 1) {
    for (std::uint64_t t = 0; t < trials; ++t) run_trial(t);
  } else {
#pragma omp parallel for num_threads(workers) schedule(dynamic)
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(trials); ++t)
      run_trial(static_cast<std::uint64_t>(t));
  }
  return finish_report(std::move(records), 0.0, 0.0, 1.0);
}

ExperimentReport check_far_target_probability(const ProblemInstance& instance,
                                              const SamplingConfig& config) {
  if (config.trials < 1)
    throw std::invalid_argument("check_far_target_probability: trials must be >= 1");
  if (config.lambda < 0.0)
    throw std::invalid_argument("check_far_target_probability: lambda must be >= 0");

  const Rng root(config.seed);
  std::vector<TrialRecord> records(config.trials);
  const int workers = config.threads > 0 ? config.threads : omp_get_max_threads();

  auto run_trial = [&](std::uint64_t t) {
    Rng rng = root.fork(t);
    TrialRecord rec;
    rec.b = sample_from_q_plus_ball(instance, config.lambda, rng, config.membership_tol,
                                    config.rejection_budget);

    ProblemInstance shifted = instance;
    shifted.b = rec.b;
    SolverConfig solver_config;
    solver_config.threads = 1;
    solver_config.epsilon = 1e-5;  // 1e-10 certified gap on the relaxation
    SolveReport report = solve_exact(shifted, solver_config);

    rec.objective_relax = report.relaxation.objective;
    rec.objective_exact = report.best.objective;

    Vec reduced = reduce_to_few_fractionals(shifted, report.relaxation.x_bar);
    rec.integral_reduced = true;
    for (double v : reduced)
      if (std::abs(v - std::round(v)) > kZeroTol) {
        rec.integral_reduced = false;
        break;
      }
    rec.success =
        rec.integral_reduced || rec.objective_exact - rec.objective_relax <= 1e-6;
    records[t] = std::move(rec);
  };

  if (workers == 1) {
    for (std::uint64_t t = 0; t < config.trials; ++t) run_trial(t);
  } else {
#pragma omp parallel for num_threads(workers) schedule(dynamic)
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(config.trials); ++t)
      run_trial(static_cast<std::uint64_t>(t));
  }
  return finish_report(std::move(records), config.lambda, config.membership_tol,
                       far_target_bound(instance, config.lambda));
}

}  // namespace cubesparse
