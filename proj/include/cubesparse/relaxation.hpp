#pragma once

#include "cubesparse/core.hpp"
#include "cubesparse/rational.hpp"

namespace cubesparse {

/// A feasible point for the convex relaxation
///   min ||Ax - b||_2   s.t.  0 <= x_i <= u_i,  sum_i x_i/u_i <= sigma
/// together with a duality-gap certificate: certified_gap bounds
/// ||b - A x_bar||^2 - ||b - A x_hat||^2 from above, where x_hat is the true
/// relaxation optimum. `certified` is false when the iteration budget ran out
/// first; x_bar and certified_gap then describe the best iterate reached.
struct RelaxedSolution {
  Vec x_bar;
  double certified_gap = 0.0;
  long iterations = 0;
  bool certified = false;
  double objective = 0.0;  // ||b - A x_bar||_2, for convenience
};

inline constexpr long kDefaultRelaxIters = 1'000'000;

/// Exact linear minimization over the relaxation polytope
/// P = {0 <= x <= u, sum x_i/u_i <= sigma}: returns a vertex s minimizing
/// gradient^T s. Greedy: pick the sigma most negative u_i*gradient_i
/// contributions (only where gradient_i < 0) and set those x_i = u_i.
Vec linear_minimization(const Vec& gradient, std::int64_t sigma,
                        const std::vector<std::int64_t>& u);

Vec linear_minimization(const ProblemInstance& instance, const Vec& gradient);

/// Solves the relaxation to a certified gap <= epsilon^2 with an away-step
/// conditional-gradient method (exact 1-D line search on the quadratic).
/// The certificate is the plain linear-minimization gap
///   g(x) = max_{s in P} grad f(x)^T (x - s) >= f(x) - f(x_hat).
/// The returned point is exactly feasible (clamped and budget-rescaled).
RelaxedSolution solve_relaxation(const ProblemInstance& instance, double epsilon,
                                 long max_iters = kDefaultRelaxIters);

/// Lemma-1 vertex reduction in exact rational arithmetic: returns x' with
/// A x' = A x exactly, bounds respected, sum x'_i/u_i <= sum x_i/u_i, and at
/// most m entries strictly between their bounds. Walks along kernel vectors
/// of A restricted to the interior coordinates until enough of them hit a
/// bound. Throws std::invalid_argument on infeasible input.
std::vector<Rat> reduce_to_few_fractionals_exact(const ProblemInstance& instance,
                                                 const std::vector<Rat>& x);

/// Double-precision wrapper: converts losslessly to rationals, walks, and
/// rounds the result back to doubles.
Vec reduce_to_few_fractionals(const ProblemInstance& instance, const Vec& x);

/// Number of coordinates strictly between 0 and their bound.
int count_strictly_fractional(const ProblemInstance& instance, const std::vector<Rat>& x);

}  // namespace cubesparse
