#include <CLI11.hpp>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "cubesparse/experiments.hpp"
#include "cubesparse/io.hpp"
#include "cubesparse/solver.hpp"

namespace cs = cubesparse;
using nlohmann::ordered_json;

namespace {

void emit(const ordered_json& doc, const std::string& out_path) {
  std::string text = doc.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    cs::write_text_file(out_path, text);
}

double default_lambda_scale(const cs::ProblemInstance& instance) {
  return std::pow(static_cast<double>(instance.m), 1.5) *
         static_cast<double>(instance.sigma_eff()) *
         static_cast<double>(instance.max_abs_entry());
}

cs::ProblemInstance generate_instance(int m, int n, std::int64_t sigma, std::int64_t amax,
                                      std::uint64_t seed, const std::string& mode, double lambda,
                                      bool u_mode, std::int64_t u_max) {
  cs::Rng rng(seed);
  cs::ProblemInstance instance;
  instance.m = m;
  instance.n = n;
  instance.sigma = sigma;
  instance.matrix.resize(static_cast<std::size_t>(m) * n);
  for (auto& v : instance.matrix) v = rng.uniform_int(-amax, amax);
  if (u_mode) {
    instance.u.resize(n);
    for (auto& v : instance.u) v = rng.uniform_int(1, std::max<std::int64_t>(u_max, 1));
  }

  if (mode == "planted") {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = n - 1; i > 0; --i)
      std::swap(order[i], order[rng.uniform_int(0, i)]);
    cs::Vec x(n, 0.0);
    std::int64_t k = std::min<std::int64_t>(sigma, n);
    for (std::int64_t c = 0; c < k; ++c) {
      int j = order[c];
      x[j] = rng.uniform(0.0, static_cast<double>(instance.bound(j)));
    }
    instance.b = instance.apply(x);
  } else {  // geometric
    instance.b.assign(m, 0.0);
    double lam = lambda >= 0.0 ? lambda : default_lambda_scale(instance);
    instance.b = cs::sample_from_q_plus_ball(instance, lam, rng);
  }
  return instance;
}

double fitted_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double lx = std::log(xs[i]), ly = std::log(std::max(ys[i], 1e-12));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int run_solve(const std::string& path, cs::SolverConfig config, std::int64_t sigma_override,
              bool check_oracle, bool allow_heuristic, const std::string& out_path) {
  cs::ProblemInstance instance = cs::load_instance_file(path);
  if (sigma_override > 0) instance.sigma = sigma_override;

  cs::SolveReport report = cs::solve_exact(instance, config);

  ordered_json doc;
  doc["command"] = "solve";
  doc["input"] = path;
  doc["config"] = {{"epsilon", config.epsilon},
                   {"threads", config.threads},
                   {"enum_cap", config.enum_cap},
                   {"exhaustive_F", config.exhaustive_support},
                   {"seed", config.seed},
                   {"sigma_override", sigma_override}};
  doc["report"] = cs::solve_report_json(report);

  int exit_code = 0;
  if (check_oracle) {
    try {
      cs::SparseSolution oracle = cs::solve_oracle(instance, config.oracle_cap);
      bool match = std::abs(oracle.objective - report.best.objective) <= 1e-6;
      doc["oracle"] = {{"objective", oracle.objective}, {"match", match}};
      if (!match) {
        std::cerr << "oracle mismatch: solver " << report.best.objective << " vs oracle "
                  << oracle.objective << "\n";
        exit_code = 1;
      }
    } catch (const cs::EnumerationCapExceeded&) {
      doc["oracle"] = {{"skipped", "instance exceeds the oracle work cap"}};
    }
  }
  if (report.stats.truncated && !allow_heuristic) {
    std::cerr << "search was truncated by the guess cap; result is heuristic "
                 "(pass --allow-heuristic to accept)\n";
    exit_code = 1;
  }
  emit(doc, out_path);
  return exit_code;
}

int run_relax(const std::string& path, double epsilon, long max_iters,
              const std::string& out_path) {
  cs::ProblemInstance instance = cs::load_instance_file(path);
  double eps = epsilon > 0.0
                   ? epsilon
                   : std::max(std::sqrt(static_cast<double>(instance.m)) *
                                  static_cast<double>(instance.max_abs_entry()),
                              1e-9);
  cs::RelaxedSolution relaxed = cs::solve_relaxation(instance, eps, max_iters);

  ordered_json doc;
  doc["command"] = "relax";
  doc["input"] = path;
  doc["config"] = {{"epsilon", eps}, {"max_iters", max_iters}};
  doc["relaxation"] = cs::relaxed_solution_json(relaxed);
  emit(doc, out_path);
  if (!relaxed.certified) {
    std::cerr << "iteration budget exhausted before certification (gap "
              << relaxed.certified_gap << ")\n";
    return 1;
  }
  return 0;
}

int run_oracle(const std::string& path, std::uint64_t cap, const std::string& out_path) {
  cs::ProblemInstance instance = cs::load_instance_file(path);
  cs::SparseSolution solution = cs::solve_oracle(instance, cap);
  ordered_json doc;
  doc["command"] = "oracle";
  doc["input"] = path;
  doc["solution"] = cs::sparse_solution_json(solution);
  emit(doc, out_path);
  return 0;
}

int run_experiment(const std::string& kind, const std::string& path, std::uint64_t trials,
                   std::uint64_t seed, double lambda, double lambda_mult, double tol,
                   std::uint64_t rejection_budget, int threads, bool ci_mode,
                   const std::string& csv_path, const std::string& out_path) {
  cs::ProblemInstance instance = cs::load_instance_file(path);
  cs::ExperimentReport report;
  double threshold = 0.0;

  if (kind == "interior") {
    report = cs::check_interior_exactness(instance, trials, seed, threads);
    threshold = 1.0;
  } else {
    double lam = lambda >= 0.0 ? lambda : lambda_mult * default_lambda_scale(instance);
    cs::SamplingConfig config;
    config.lambda = lam;
    config.trials = trials;
    config.seed = seed;
    config.membership_tol = tol;
    config.rejection_budget = rejection_budget;
    config.threads = threads;
    report = cs::check_far_target_probability(instance, config);
    threshold = report.rho - 3.0 * report.ci.halfwidth;
  }

  ordered_json doc;
  doc["command"] = "experiment";
  doc["kind"] = kind;
  doc["input"] = path;
  doc["summary"] = cs::experiment_summary_json(report);
  doc["summary"]["threshold"] = threshold;
  if (!csv_path.empty()) cs::write_text_file(csv_path, cs::experiment_csv(report));
  emit(doc, out_path);

  if (ci_mode && report.frequency < threshold) {
    std::cerr << "experiment frequency " << report.frequency << " below threshold " << threshold
              << "\n";
    return 1;
  }
  return 0;
}

int run_bench(std::uint64_t seed, int m, std::int64_t amax, std::int64_t sigma,
              std::vector<int> sizes, bool u_mode, bool ci_mode, const std::string& out_path) {
  if (sizes.empty()) sizes = {10, 20, 40, 80};
  std::sort(sizes.begin(), sizes.end());

  ordered_json doc;
  doc["command"] = "bench";

  // Serial reference vs the OpenMP path on the largest size.
  {
    cs::ProblemInstance instance =
        generate_instance(m, sizes.back(), sigma, amax, seed, "planted", -1.0, u_mode, 3);
    cs::SolverConfig serial_cfg;
    serial_cfg.threads = 1;
    cs::SolveReport serial = cs::solve_exact(instance, serial_cfg);
    cs::SolverConfig parallel_cfg;
    parallel_cfg.threads = 0;
    cs::SolveReport parallel = cs::solve_exact(instance, parallel_cfg);
    bool identical = serial.best.x == parallel.best.x &&
                     serial.best.objective == parallel.best.objective;
    doc["parallel_comparison"] = {{"n", sizes.back()},
                                  {"threads", omp_get_max_threads()},
                                  {"serial_seconds", serial.stats.wall_seconds},
                                  {"parallel_seconds", parallel.stats.wall_seconds},
                                  {"speedup", serial.stats.wall_seconds /
                                                  std::max(parallel.stats.wall_seconds, 1e-9)},
                                  {"identical_result", identical}};
    std::fprintf(stderr, "n=%d serial %.3fs parallel %.3fs (x%.2f, results %s)\n", sizes.back(),
                 serial.stats.wall_seconds, parallel.stats.wall_seconds,
                 serial.stats.wall_seconds / std::max(parallel.stats.wall_seconds, 1e-9),
                 identical ? "identical" : "DIFFER");
    if (ci_mode && !identical) return 1;
  }

  // Scaling sweep on the serial path.
  std::vector<double> ns, times, states;
  ordered_json rows = ordered_json::array();
  for (int n : sizes) {
    cs::ProblemInstance instance =
        generate_instance(m, n, sigma, amax, seed + static_cast<std::uint64_t>(n), "planted",
                          -1.0, u_mode, 3);
    cs::SolverConfig config;
    config.threads = 1;
    cs::SolveReport report = cs::solve_exact(instance, config);
    ns.push_back(n);
    times.push_back(report.stats.wall_seconds);
    states.push_back(static_cast<double>(report.stats.dp_states));
    rows.push_back({{"n", n},
                    {"wall_seconds", report.stats.wall_seconds},
                    {"dp_states", report.stats.dp_states},
                    {"objective", report.best.objective}});
    std::fprintf(stderr, "n=%3d  %.4fs  dp_states=%llu\n", n, report.stats.wall_seconds,
                 static_cast<unsigned long long>(report.stats.dp_states));
  }
  double time_slope = fitted_slope(ns, times);
  double state_slope = fitted_slope(ns, states);
  doc["scaling"] = {{"rows", rows}, {"time_slope", time_slope}, {"state_slope", state_slope}};
  std::fprintf(stderr, "log-log slopes: time %.2f, dp states %.2f\n", time_slope, state_slope);

  emit(doc, out_path);
  if (ci_mode && (time_slope > 2.2 || state_slope > 2.2)) {
    std::cerr << "scaling slope above 2.2\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact sparse approximation over the cube"};
  app.require_subcommand(1);

  // solve
  std::string path, out_path;
  cs::SolverConfig config;
  std::int64_t sigma_override = 0;
  bool check_oracle = false, allow_heuristic = false, paper_mode = false;
  auto* solve = app.add_subcommand("solve", "run the exact solver on an instance file");
  solve->add_option("instance", path, "instance JSON file")->required();
  solve->add_option("--epsilon", config.epsilon, "relaxation closeness target (default sqrt(m)*A_max)");
  solve->add_option("--threads", config.threads, "worker threads (1 = serial reference)");
  solve->add_option("--seed", config.seed, "seed echoed into the artifact");
  solve->add_option("--max-iters", config.relax_max_iters, "relaxation iteration budget");
  solve->add_option("--enum-cap", config.enum_cap, "candidate box enumeration cap");
  solve->add_option("--guess-cap", config.support_guess_cap, "support guess cap");
  solve->add_option("--oracle-cap", config.oracle_cap, "oracle work cap for --check-oracle");
  solve->add_option("--sigma-override", sigma_override, "replace the instance sparsity budget");
  solve->add_flag("--check-oracle", check_oracle, "cross-validate against the brute-force oracle");
  solve->add_flag("--allow-heuristic", allow_heuristic, "accept cap-truncated searches");
  solve->add_flag("--paper-F", paper_mode, "guess only supports of size min(m, sigma, n)");
  solve->add_flag("--exhaustive-F", [](std::int64_t) {}, "guess all sizes 0..min(m, sigma, n) (default)");
  solve->add_option("-o,--output", out_path, "write the artifact JSON here instead of stdout");

  // relax
  double relax_eps = -1.0;
  long relax_iters = cs::kDefaultRelaxIters;
  auto* relax = app.add_subcommand("relax", "solve only the certified relaxation");
  relax->add_option("instance", path, "instance JSON file")->required();
  relax->add_option("--epsilon", relax_eps, "closeness target (default sqrt(m)*A_max)");
  relax->add_option("--max-iters", relax_iters, "iteration budget");
  relax->add_option("-o,--output", out_path, "output path");

  // oracle
  std::uint64_t oracle_cap = 20'000'000;
  auto* oracle = app.add_subcommand("oracle", "run the brute-force oracle");
  oracle->add_option("instance", path, "instance JSON file")->required();
  oracle->add_option("--oracle-cap", oracle_cap, "work cap");
  oracle->add_option("-o,--output", out_path, "output path");

  // generate
  int gen_m = 2, gen_n = 8;
  std::int64_t gen_sigma = 2, gen_amax = 2, gen_umax = 3;
  std::uint64_t gen_seed = 0;
  std::string gen_mode = "planted";
  double gen_lambda = -1.0;
  bool gen_u_mode = false;
  auto* generate = app.add_subcommand("generate", "emit a random instance");
  generate->add_option("--m", gen_m, "rows")->check(CLI::PositiveNumber);
  generate->add_option("--n", gen_n, "columns")->check(CLI::PositiveNumber);
  generate->add_option("--sigma", gen_sigma, "sparsity budget")->check(CLI::PositiveNumber);
  generate->add_option("--amax", gen_amax, "entry magnitude bound")->check(CLI::NonNegativeNumber);
  generate->add_option("--seed", gen_seed, "rng seed");
  generate->add_option("--mode", gen_mode, "planted or geometric")
      ->check(CLI::IsMember({"planted", "geometric"}));
  generate->add_option("--lambda", gen_lambda, "geometric-mode radius (default m^1.5*sigma*A_max)");
  generate->add_flag("--u-mode", gen_u_mode, "draw general upper bounds");
  generate->add_option("--u-max", gen_umax, "largest bound in --u-mode");
  generate->add_option("-o,--output", out_path, "output path");

  // experiment
  std::string exp_kind;
  std::uint64_t exp_trials = 0, exp_seed = 0, exp_budget = 1'000'000;
  double exp_lambda = -1.0, exp_mult = 2.0, exp_tol = 1e-7;
  int exp_threads = 0;
  bool exp_ci = false;
  std::string csv_path;
  auto* experiment = app.add_subcommand("experiment", "run a Monte-Carlo suite");
  experiment->add_option("kind", exp_kind, "interior or far")
      ->required()
      ->check(CLI::IsMember({"interior", "far"}));
  experiment->add_option("instance", path, "instance JSON file")->required();
  experiment->add_option("--trials", exp_trials, "trial count (default 100 interior, 500 far)");
  experiment->add_option("--seed", exp_seed, "rng seed");
  experiment->add_option("--lambda", exp_lambda, "sampling radius");
  experiment->add_option("--lambda-mult", exp_mult, "radius as multiple of m^1.5*sigma*A_max");
  experiment->add_option("--tol", exp_tol, "membership tolerance");
  experiment->add_option("--rejection-budget", exp_budget, "proposals per accepted sample");
  experiment->add_option("--threads", exp_threads, "worker threads");
  experiment->add_flag("--ci", exp_ci, "exit 1 when the acceptance threshold is violated");
  experiment->add_option("--csv", csv_path, "write the per-trial table here");
  experiment->add_option("-o,--output", out_path, "output path");

  // bench
  std::uint64_t bench_seed = 7;
  int bench_m = 2;
  std::int64_t bench_amax = 2, bench_sigma = 3;
  std::vector<int> bench_sizes;
  bool bench_ci = false, bench_u_mode = false;
  auto* bench = app.add_subcommand("bench", "serial/parallel comparison and scaling sweep");
  bench->add_option("--seed", bench_seed, "rng seed");
  bench->add_option("--m", bench_m, "rows");
  bench->add_option("--amax", bench_amax, "entry magnitude bound");
  bench->add_option("--sigma", bench_sigma, "sparsity budget");
  bench->add_option("--sizes", bench_sizes, "column counts to sweep");
  bench->add_flag("--u-mode", bench_u_mode, "draw general upper bounds");
  bench->add_flag("--ci", bench_ci, "exit 1 on slope or mismatch failures");
  bench->add_option("-o,--output", out_path, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) {
      config.exhaustive_support = !paper_mode;
      return run_solve(path, config, sigma_override, check_oracle, allow_heuristic, out_path);
    }
    if (relax->parsed()) return run_relax(path, relax_eps, relax_iters, out_path);
    if (oracle->parsed()) return run_oracle(path, oracle_cap, out_path);
    if (generate->parsed()) {
      cs::ProblemInstance instance = generate_instance(
          gen_m, gen_n, gen_sigma, gen_amax, gen_seed, gen_mode, gen_lambda, gen_u_mode, gen_umax);
      emit(cs::instance_json(instance), out_path);
      return 0;
    }
    if (experiment->parsed()) {
      if (exp_trials == 0) exp_trials = exp_kind == "interior" ? 100 : 500;
      return run_experiment(exp_kind, path, exp_trials, exp_seed, exp_lambda, exp_mult, exp_tol,
                            exp_budget, exp_threads, exp_ci, csv_path, out_path);
    }
    if (bench->parsed())
      return run_bench(bench_seed, bench_m, bench_amax, bench_sigma, bench_sizes, bench_u_mode,
                       bench_ci, out_path);
  } catch (const cs::EnumerationCapExceeded& e) {
    std::cerr << "cap refusal: " << e.what() << "\n";
    return 3;
  } catch (const cs::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
