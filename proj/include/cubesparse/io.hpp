#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cubesparse/core.hpp"
#include "cubesparse/experiments.hpp"
#include "cubesparse/solver.hpp"

namespace cubesparse {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Instance file schema:
///   {"m": int, "n": int, "A": [[int, ...], ...] row-major,
///    "b": [number, ...], "sigma": int, "u": [int, ...] optional}
/// Throws ParseError on malformed JSON or validation failures.
ProblemInstance parse_instance_json(const std::string& text);
ProblemInstance load_instance_file(const std::string& path);

nlohmann::ordered_json instance_json(const ProblemInstance& instance);

nlohmann::ordered_json sparse_solution_json(const SparseSolution& solution);
nlohmann::ordered_json relaxed_solution_json(const RelaxedSolution& relaxed);
nlohmann::ordered_json solve_report_json(const SolveReport& report);
nlohmann::ordered_json experiment_summary_json(const ExperimentReport& report);

/// Per-trial table: trial, lambda, objective_relax, objective_exact,
/// integral_reduced, success.
std::string experiment_csv(const ExperimentReport& report);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cubesparse
