#include "cubesparse/io.hpp"

#include <fstream>
#include <sstream>

namespace cubesparse {

using nlohmann::json;
using nlohmann::ordered_json;

ProblemInstance parse_instance_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance is not valid JSON: ") + e.what());
  }

  InstanceDraft draft;
  try {
    draft.m = doc.at("m").get<int>();
    draft.n = doc.at("n").get<int>();
    for (const auto& row : doc.at("A")) {
      if (!row.is_array()) throw ParseError("A must be an array of rows");
      for (const auto& v : row) draft.matrix.push_back(v.get<double>());
    }
    if (doc.at("A").size() != static_cast<std::size_t>(std::max(draft.m, 0)))
      throw ParseError("A must have m rows");
    for (const auto& v : doc.at("b")) draft.b.push_back(v.get<double>());
    draft.sigma = doc.at("sigma").get<std::int64_t>();
    if (doc.contains("u")) {
      draft.u_present = true;
      for (const auto& v : doc.at("u")) {
        if (!v.is_number_integer()) throw ParseError("u entries must be integers");
        draft.u.push_back(v.get<std::int64_t>());
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("instance schema violation: ") + e.what());
  }

  ValidationResult check = validate(draft);
  if (!check.ok()) {
    std::string msg = "invalid instance:";
    for (const auto& v : check.violations) msg += " " + v + ";";
    throw ParseError(msg);
  }
  return finalize(draft);
}

ProblemInstance load_instance_file(const std::string& path) {
  return parse_instance_json(read_text_file(path));
}

ordered_json instance_json(const ProblemInstance& instance) {
  ordered_json doc;
  doc["m"] = instance.m;
  doc["n"] = instance.n;
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < instance.m; ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < instance.n; ++j) row.push_back(instance.a(i, j));
    rows.push_back(std::move(row));
  }
  doc["A"] = std::move(rows);
  doc["b"] = instance.b;
  doc["sigma"] = instance.sigma;
  if (!instance.u.empty()) doc["u"] = instance.u;
  return doc;
}

ordered_json sparse_solution_json(const SparseSolution& solution) {
  ordered_json doc;
  doc["objective"] = solution.objective;
  doc["support"] = solution.support;
  doc["x"] = solution.x;
  return doc;
}

ordered_json relaxed_solution_json(const RelaxedSolution& relaxed) {
  ordered_json doc;
  doc["objective"] = relaxed.objective;
  doc["certified_gap"] = relaxed.certified_gap;
  doc["iterations"] = relaxed.iterations;
  doc["certified"] = relaxed.certified;
  doc["x_bar"] = relaxed.x_bar;
  return doc;
}

ordered_json solve_report_json(const SolveReport& report) {
  ordered_json doc;
  doc["best"] = sparse_solution_json(report.best);
  doc["relaxation"] = relaxed_solution_json(report.relaxation);
  doc["bounds"] = {{"radius_exact", report.bounds.radius_exact},
                   {"radius_eps", report.bounds.radius_eps},
                   {"u_factor", report.bounds.u_factor},
                   {"column_norm_radius", report.column_norm_radius}};
  doc["stats"] = {{"support_guesses", report.stats.support_guesses},
                  {"box_points", report.stats.box_points},
                  {"feasibility_calls", report.stats.feasibility_calls},
                  {"feasible_rhs", report.stats.feasible_rhs},
                  {"extensions", report.stats.extensions},
                  {"dp_states", report.stats.dp_states},
                  {"wall_seconds", report.stats.wall_seconds},
                  {"truncated", report.stats.truncated}};
  return doc;
}

ordered_json experiment_summary_json(const ExperimentReport& report) {
  ordered_json doc;
  doc["frequency"] = report.frequency;
  doc["rho"] = report.rho;
  doc["ci_low"] = report.ci.low;
  doc["ci_high"] = report.ci.high;
  doc["halfwidth"] = report.ci.halfwidth;
  doc["trials"] = report.trials.size();
  doc["lambda"] = report.lambda;
  doc["membership_tol"] = report.membership_tol;
  return doc;
}

std::string experiment_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "trial,lambda,objective_relax,objective_exact,integral_reduced,success\n";
  for (std::size_t t = 0; t < report.trials.size(); ++t) {
    const TrialRecord& rec = report.trials[t];
    out << t << ',' << report.lambda << ',' << rec.objective_relax << ',' << rec.objective_exact
        << ',' << (rec.integral_reduced ? 1 : 0) << ',' << (rec.success ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace cubesparse
