#pragma once

#include <cstdint>

#include "cubesparse/core.hpp"

namespace cubesparse {

struct SamplingConfig {
  double lambda = 0.0;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  double membership_tol = 1e-7;  // one-sided slack of the dist(b, Q) test
  std::uint64_t rejection_budget = 1'000'000;  // proposals per accepted sample
  int threads = 0;
};

struct TrialRecord {
  Vec b;
  double objective_relax = 0.0;
  double objective_exact = 0.0;
  bool integral_reduced = false;
  bool success = false;  // interior: exact representation; far: relaxation optimal for the sparse problem
};

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
  double halfwidth = 0.5;
};

WilsonInterval wilson_interval(double frequency, std::uint64_t trials, double z = 1.0);

struct ExperimentReport {
  std::vector<TrialRecord> trials;
  double frequency = 0.0;
  double rho = 1.0;  // theoretical lower bound on the success probability
  WilsonInterval ci;
  double lambda = 0.0;
  double membership_tol = 0.0;
};

/// Uniform sample from Q + lambda*B, Q = {Ax : x feasible for the relaxation},
/// by rejection from the bounding box of Q inflated by lambda. Membership
/// dist(b, Q) <= lambda is decided by a certified projection solve; the
/// acceptance region is inflated one-sidedly by at most twice the achieved
/// closeness (about membership_tol). Throws std::runtime_error when the
/// rejection budget is exhausted.
Vec sample_from_q_plus_ball(const ProblemInstance& instance, double lambda, Rng& rng,
                            double membership_tol = 1e-7,
                            std::uint64_t rejection_budget = 1'000'000);

/// Shrunk-target suite: samples b = Ax with x uniform in the budget polytope
/// scaled by (sigma - m + 1)/sigma and checks that the solver represents b
/// exactly (objective <= 1e-6). Requires sigma >= m.
ExperimentReport check_interior_exactness(const ProblemInstance& instance, std::uint64_t trials,
                                          std::uint64_t seed, int threads = 0);

/// Far-target suite: samples b from Q + lambda*B, solves the relaxation to a
/// 1e-10 gap, vertex-reduces, rounds, solves exactly, and flags a trial when
/// the relaxation value is attained by a sparse-feasible point (reduced
/// point integral, or exact and relaxed objectives within 1e-6). Reports the
/// empirical frequency against rho = (lambda/(lambda + sigma sqrt(m) A_max))^m.
ExperimentReport check_far_target_probability(const ProblemInstance& instance,
                                              const SamplingConfig& config);

/// The probability lower bound of the far-target experiment.
double far_target_bound(const ProblemInstance& instance, double lambda);

}  // namespace cubesparse
