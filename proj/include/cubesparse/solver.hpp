#pragma once

#include <cstdint>

#include "cubesparse/core.hpp"
#include "cubesparse/proximity.hpp"
#include "cubesparse/relaxation.hpp"

namespace cubesparse {

struct SolverConfig {
  /// Closeness target for the relaxation; negative selects the default
  /// sqrt(m) * A_max. The enumeration radius uses the certified gap actually
  /// achieved, so a tighter solve shrinks the candidate box.
  double epsilon = -1.0;
  long relax_max_iters = kDefaultRelaxIters;
  std::uint64_t enum_cap = kDefaultEnumCap;
  std::uint64_t support_guess_cap = UINT64_MAX;
  /// true: iterate |F| = 0..min(m, sigma, n); false: only the largest size.
  bool exhaustive_support = true;
  /// 0 = all available workers; 1 = the serial reference path.
  int threads = 0;
  std::uint64_t seed = 0;  // echoed into artifacts; the solver is deterministic
  std::uint64_t oracle_cap = 20'000'000;
};

struct SolveStats {
  std::uint64_t support_guesses = 0;
  std::uint64_t box_points = 0;        // integral RHS candidates covered per guess, summed
  std::uint64_t feasibility_calls = 0; // (guess, candidate RHS) membership decisions
  std::uint64_t feasible_rhs = 0;      // decisions that produced a witness
  std::uint64_t extensions = 0;
  std::uint64_t dp_states = 0;
  double wall_seconds = 0.0;
  bool truncated = false;  // guess cap hit: result is heuristic, never silent
};

struct SolveReport {
  SparseSolution best;
  RelaxedSolution relaxation;
  ProximityBound bounds;
  double column_norm_radius = 0.0;  // diagnostic alternative radius
  SolveStats stats;
};

/// The full exact pipeline: certified relaxation, proximity box around
/// A x_bar, per-support-guess integral feasibility, box least-squares
/// extension of every witness, deterministic best-candidate selection.
/// The rounded relaxation and the zero vector are always scored as safety
/// candidates. Throws EnumerationCapExceeded when the candidate box exceeds
/// config.enum_cap.
SolveReport solve_exact(const ProblemInstance& instance, const SolverConfig& config = {});

/// Ground-truth baseline: enumerates every support of size <= sigma and
/// solves the box least-squares restriction exactly. Refuses instances whose
/// sweep cost exceeds `work_cap` (see SolverConfig::oracle_cap).
SparseSolution solve_oracle(const ProblemInstance& instance,
                            std::uint64_t work_cap = 20'000'000);

/// m = 1 shortcut: the reduced relaxation optimum has at most one fractional
/// entry, is feasible for the sparse problem, and hence optimal.
SparseSolution solve_m1_fast(const ProblemInstance& instance);

}  // namespace cubesparse
