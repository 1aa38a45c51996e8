#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ensopt/analysis.hpp"

namespace ensopt {

using json = nlohmann::json;

// Shortest round-trip decimal form; used for CSV so numeric cells are
// deterministic and re-parse exactly.
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline void reject_unknown_keys(const json& j, const std::string& where,
                                const std::vector<std::string>& allowed) {
  if (!j.is_object()) throw std::invalid_argument("config: " + where + " must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const auto& k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw std::invalid_argument("config: unknown key \"" + item.key() + "\" in " + where);
  }
}

inline void require_key(const json& j, const std::string& where, const std::string& key) {
  if (!j.contains(key))
    throw std::invalid_argument("config: missing key \"" + key + "\" in " + where);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Objective configuration

struct ObjectiveConfig {
  std::string name;  // golf_course | gaussian_well | multiwell
  int dimension = 1;
  Point center;                 // golf_course, gaussian_well
  double epsilon = 0.0;         // golf_course
  double sigma = 0.0;           // gaussian_well
  std::vector<Point> centers;   // multiwell
  std::vector<double> depths;   // multiwell
  double slope = 50.0;          // multiwell
};

inline ObjectiveConfig parse_objective_config(const json& j) {
  ObjectiveConfig cfg;
  detail::require_key(j, "objective", "name");
  detail::require_key(j, "objective", "dimension");
  cfg.name = j.at("name").get<std::string>();
  cfg.dimension = j.at("dimension").get<int>();
  if (cfg.name == "golf_course") {
    detail::reject_unknown_keys(j, "objective", {"name", "dimension", "center", "epsilon"});
    detail::require_key(j, "objective", "center");
    detail::require_key(j, "objective", "epsilon");
    cfg.center = j.at("center").get<Point>();
    cfg.epsilon = j.at("epsilon").get<double>();
  } else if (cfg.name == "gaussian_well") {
    detail::reject_unknown_keys(j, "objective", {"name", "dimension", "center", "sigma"});
    detail::require_key(j, "objective", "center");
    detail::require_key(j, "objective", "sigma");
    cfg.center = j.at("center").get<Point>();
    cfg.sigma = j.at("sigma").get<double>();
  } else if (cfg.name == "multiwell") {
    detail::reject_unknown_keys(j, "objective",
                                {"name", "dimension", "centers", "depths", "slope"});
    detail::require_key(j, "objective", "centers");
    detail::require_key(j, "objective", "depths");
    cfg.centers = j.at("centers").get<std::vector<Point>>();
    cfg.depths = j.at("depths").get<std::vector<double>>();
    if (j.contains("slope")) cfg.slope = j.at("slope").get<double>();
  } else {
    throw std::invalid_argument("config: unknown objective \"" + cfg.name + "\"");
  }
  return cfg;
}

inline json objective_config_to_json(const ObjectiveConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["dimension"] = cfg.dimension;
  if (cfg.name == "golf_course") {
    j["center"] = cfg.center;
    j["epsilon"] = cfg.epsilon;
  } else if (cfg.name == "gaussian_well") {
    j["center"] = cfg.center;
    j["sigma"] = cfg.sigma;
  } else if (cfg.name == "multiwell") {
    j["centers"] = cfg.centers;
    j["depths"] = cfg.depths;
    j["slope"] = cfg.slope;
  }
  return j;
}

inline ObjectiveSpec build_objective(const ObjectiveConfig& cfg, double delta) {
  if (cfg.name == "golf_course")
    return make_golf_course(cfg.dimension, cfg.center, cfg.epsilon, delta);
  if (cfg.name == "gaussian_well")
    return make_gaussian_well(cfg.dimension, cfg.center, cfg.sigma, delta);
  if (cfg.name == "multiwell")
    return make_multiwell(cfg.dimension, cfg.centers, cfg.depths, delta, cfg.slope);
  throw std::invalid_argument("config: unknown objective \"" + cfg.name + "\"");
}

// ---------------------------------------------------------------------------
// Per-command configurations. Parsing is strict: unknown keys are rejected at
// every level so a typo cannot silently fall back to a default.

struct SolveCmdConfig {
  ObjectiveConfig objective;
  double delta = 0.5;
  std::optional<std::vector<double>> basin_override;
  double delta1 = 0.0;
  std::optional<std::uint64_t> molecules;
  double safety_c = 2.0;
  std::uint64_t seed = 0;
  double grid_safety = 2.0;
  std::optional<int> m_override;
  bool verify = true;
  std::uint64_t runs = 1;
  DescentConfig descent{};
  std::optional<std::string> out_path;
  std::optional<std::string> out_format;
};

inline DescentConfig parse_descent_config(const json& j) {
  detail::reject_unknown_keys(j, "descent",
                              {"fd_step", "f_tol", "x_tol", "max_iters", "initial_step"});
  DescentConfig cfg;
  if (j.contains("fd_step")) cfg.fd_step = j.at("fd_step").get<double>();
  if (j.contains("f_tol")) cfg.f_tol = j.at("f_tol").get<double>();
  if (j.contains("x_tol")) cfg.x_tol = j.at("x_tol").get<double>();
  if (j.contains("max_iters")) cfg.max_iters = j.at("max_iters").get<std::uint64_t>();
  if (j.contains("initial_step")) cfg.initial_step = j.at("initial_step").get<double>();
  return cfg;
}

inline json descent_config_to_json(const DescentConfig& cfg) {
  json j;
  j["fd_step"] = cfg.fd_step;
  j["f_tol"] = cfg.f_tol;
  j["x_tol"] = cfg.x_tol;
  j["max_iters"] = cfg.max_iters;
  j["initial_step"] = cfg.initial_step;
  return j;
}

inline void parse_output_block(const json& j, std::optional<std::string>& path,
                               std::optional<std::string>& format) {
  detail::reject_unknown_keys(j, "output", {"path", "format"});
  if (j.contains("path")) path = j.at("path").get<std::string>();
  if (j.contains("format")) {
    format = j.at("format").get<std::string>();
    if (*format != "json" && *format != "csv")
      throw std::invalid_argument("config: output format must be json or csv");
  }
}

inline SolveCmdConfig parse_solve_config(const json& j) {
  detail::reject_unknown_keys(
      j, "solve config",
      {"objective", "delta", "basin_override", "delta1", "molecules", "safety_c", "seed",
       "grid_safety", "m_override", "verify", "runs", "descent", "output"});
  detail::require_key(j, "solve config", "objective");
  SolveCmdConfig cfg;
  cfg.objective = parse_objective_config(j.at("objective"));
  if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
  if (j.contains("basin_override"))
    cfg.basin_override = j.at("basin_override").get<std::vector<double>>();
  if (j.contains("delta1")) cfg.delta1 = j.at("delta1").get<double>();
  if (j.contains("molecules")) cfg.molecules = j.at("molecules").get<std::uint64_t>();
  if (j.contains("safety_c")) cfg.safety_c = j.at("safety_c").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("grid_safety")) cfg.grid_safety = j.at("grid_safety").get<double>();
  if (j.contains("m_override")) cfg.m_override = j.at("m_override").get<int>();
  if (j.contains("verify")) cfg.verify = j.at("verify").get<bool>();
  if (j.contains("runs")) cfg.runs = j.at("runs").get<std::uint64_t>();
  if (j.contains("descent")) cfg.descent = parse_descent_config(j.at("descent"));
  if (j.contains("output")) parse_output_block(j.at("output"), cfg.out_path, cfg.out_format);
  return cfg;
}

// Resolved-config echo embedded in every output record. Contains the semantic
// fields only (not the output location), with all defaults materialized, so
// re-running the embedded config reproduces the record byte for byte.
inline json solve_config_to_json(const SolveCmdConfig& cfg) {
  json j;
  j["objective"] = objective_config_to_json(cfg.objective);
  j["delta"] = cfg.delta;
  if (cfg.basin_override) j["basin_override"] = *cfg.basin_override;
  j["delta1"] = cfg.delta1;
  if (cfg.molecules) j["molecules"] = *cfg.molecules;
  j["safety_c"] = cfg.safety_c;
  j["seed"] = cfg.seed;
  j["grid_safety"] = cfg.grid_safety;
  if (cfg.m_override) j["m_override"] = *cfg.m_override;
  j["verify"] = cfg.verify;
  j["runs"] = cfg.runs;
  j["descent"] = descent_config_to_json(cfg.descent);
  return j;
}

inline SolveOptions solve_options_from_config(const SolveCmdConfig& cfg) {
  SolveOptions options;
  options.grid_safety = cfg.grid_safety;
  options.basin_override = cfg.basin_override;
  options.m_override = cfg.m_override;
  options.delta1 = cfg.delta1;
  options.molecules = cfg.molecules;
  options.safety_c = cfg.safety_c;
  options.verify = cfg.verify;
  options.seed = cfg.seed;
  options.descent = cfg.descent;
  return options;
}

struct SearchCmdConfig {
  std::uint64_t n_padded = 0;
  std::vector<std::uint64_t> marked;
  double delta1 = 0.0;
  double safety_c = 2.0;
  std::uint64_t seed = 0;
  bool verify = true;
  std::optional<std::string> out_path;
  std::optional<std::string> out_format;
};

inline SearchCmdConfig parse_search_config(const json& j) {
  detail::reject_unknown_keys(
      j, "search config",
      {"n_padded", "marked", "delta1", "safety_c", "seed", "verify", "output"});
  detail::require_key(j, "search config", "n_padded");
  detail::require_key(j, "search config", "marked");
  SearchCmdConfig cfg;
  cfg.n_padded = j.at("n_padded").get<std::uint64_t>();
  cfg.marked = j.at("marked").get<std::vector<std::uint64_t>>();
  if (j.contains("delta1")) cfg.delta1 = j.at("delta1").get<double>();
  if (j.contains("safety_c")) cfg.safety_c = j.at("safety_c").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("verify")) cfg.verify = j.at("verify").get<bool>();
  if (j.contains("output")) parse_output_block(j.at("output"), cfg.out_path, cfg.out_format);
  return cfg;
}

inline json search_config_to_json(const SearchCmdConfig& cfg) {
  json j;
  j["n_padded"] = cfg.n_padded;
  j["marked"] = cfg.marked;
  j["delta1"] = cfg.delta1;
  j["safety_c"] = cfg.safety_c;
  j["seed"] = cfg.seed;
  j["verify"] = cfg.verify;
  return j;
}

struct BenchCmdConfig {
  std::vector<std::uint64_t> n_list;
  std::vector<double> delta1_list;
  double safety_c = 1.0;
  bool realized = false;
  std::uint64_t seed = 0;
  std::optional<std::string> out_path;
  std::optional<std::string> out_format;
};

inline BenchCmdConfig parse_bench_config(const json& j) {
  detail::reject_unknown_keys(
      j, "bench config", {"n_list", "delta1_list", "safety_c", "realized", "seed", "output"});
  detail::require_key(j, "bench config", "n_list");
  detail::require_key(j, "bench config", "delta1_list");
  BenchCmdConfig cfg;
  cfg.n_list = j.at("n_list").get<std::vector<std::uint64_t>>();
  cfg.delta1_list = j.at("delta1_list").get<std::vector<double>>();
  if (j.contains("safety_c")) cfg.safety_c = j.at("safety_c").get<double>();
  if (j.contains("realized")) cfg.realized = j.at("realized").get<bool>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("output")) parse_output_block(j.at("output"), cfg.out_path, cfg.out_format);
  return cfg;
}

inline json bench_config_to_json(const BenchCmdConfig& cfg) {
  json j;
  j["n_list"] = cfg.n_list;
  j["delta1_list"] = cfg.delta1_list;
  j["safety_c"] = cfg.safety_c;
  j["realized"] = cfg.realized;
  j["seed"] = cfg.seed;
  return j;
}

struct CompareCmdConfig {
  std::vector<std::uint64_t> n_list;
  std::vector<double> delta1_list;
  double safety_c = 1.0;
  std::optional<std::string> out_path;
  std::optional<std::string> out_format;
};

inline CompareCmdConfig parse_compare_config(const json& j) {
  detail::reject_unknown_keys(j, "compare config",
                              {"n_list", "delta1_list", "safety_c", "output"});
  detail::require_key(j, "compare config", "n_list");
  detail::require_key(j, "compare config", "delta1_list");
  CompareCmdConfig cfg;
  cfg.n_list = j.at("n_list").get<std::vector<std::uint64_t>>();
  cfg.delta1_list = j.at("delta1_list").get<std::vector<double>>();
  if (j.contains("safety_c")) cfg.safety_c = j.at("safety_c").get<double>();
  if (j.contains("output")) parse_output_block(j.at("output"), cfg.out_path, cfg.out_format);
  return cfg;
}

inline json compare_config_to_json(const CompareCmdConfig& cfg) {
  json j;
  j["n_list"] = cfg.n_list;
  j["delta1_list"] = cfg.delta1_list;
  j["safety_c"] = cfg.safety_c;
  return j;
}

struct ValidateCmdConfig {
  ObjectiveConfig objective;
  double delta = 0.5;
  int resolution = 256;
  std::optional<std::string> out_path;
  std::optional<std::string> out_format;
};

inline ValidateCmdConfig parse_validate_config(const json& j) {
  detail::reject_unknown_keys(j, "validate config",
                              {"objective", "delta", "resolution", "output"});
  detail::require_key(j, "validate config", "objective");
  ValidateCmdConfig cfg;
  cfg.objective = parse_objective_config(j.at("objective"));
  if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
  if (j.contains("resolution")) cfg.resolution = j.at("resolution").get<int>();
  if (j.contains("output")) parse_output_block(j.at("output"), cfg.out_path, cfg.out_format);
  return cfg;
}

inline json validate_config_to_json(const ValidateCmdConfig& cfg) {
  json j;
  j["objective"] = objective_config_to_json(cfg.objective);
  j["delta"] = cfg.delta;
  j["resolution"] = cfg.resolution;
  return j;
}

// ---------------------------------------------------------------------------
// Result serialization

inline const char* to_string(HalfChoice c) {
  return c == HalfChoice::lower ? "lower" : "upper";
}

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::f_tol: return "f_tol";
    case StopReason::x_tol: return "x_tol";
    case StopReason::max_iters: return "max_iters";
    case StopReason::boundary: return "boundary";
    case StopReason::plateau: return "plateau";
  }
  return "unknown";
}

inline json grid_to_json(const GridSpec& grid) {
  json j;
  j["dimension"] = grid.dimension;
  j["cells_per_dim"] = grid.cells_per_dim;
  j["cell_width"] = grid.cell_width;
  j["n_cells"] = grid.n_cells;
  j["n_padded"] = grid.n_padded;
  j["n_bits"] = grid.n_bits;
  return j;
}

inline json search_result_to_json(const SearchResult& result) {
  json j;
  j["found"] = result.found.value;
  j["verification_performed"] = result.verification_performed;
  j["verified"] = result.verified;
  j["total_queries"] = result.total_queries;
  json trace = json::array();
  for (const PartitionTest& t : result.trace) {
    json row;
    row["k"] = t.k;
    row["lo"] = t.tested.lo;
    row["hi"] = t.tested.hi;
    row["partition_size"] = t.partition_size;
    row["n_e"] = t.n_e;
    row["mean_signal"] = t.mean_signal;
    row["threshold"] = t.threshold;
    row["decision"] = to_string(t.decision);
    trace.push_back(row);
  }
  j["trace"] = trace;
  return j;
}

inline json descent_result_to_json(const DescentResult& result) {
  json j;
  j["point"] = result.point;
  j["f_value"] = result.f_value;
  j["iters"] = result.iters;
  j["evals_used"] = result.evals_used;
  j["terminated_by"] = to_string(result.terminated_by);
  return j;
}

inline json solve_report_to_json(const SolveReport& report) {
  json j;
  j["grid"] = grid_to_json(report.grid);
  j["sharpening_m"] = report.sharpening_m;
  j["search"] = search_result_to_json(report.search);
  j["descent"] = report.descent ? descent_result_to_json(*report.descent) : json(nullptr);
  json counters;
  counters["oracle_queries"] = report.oracle_queries;
  counters["classical_work"] = report.classical_work;
  counters["objective_evals"] = report.objective_evals;
  counters["scan_evals"] = report.scan_evals;
  j["counters"] = counters;
  j["status"] = report.search.failure_detected() ? "search_failed" : "ok";
  return j;
}

inline json assumption_report_to_json(const AssumptionReport& report) {
  json j;
  j["unique_min_zero"] = report.unique_min_zero;
  j["gap_holds"] = report.gap_holds;
  j["basin_size_consistent"] = report.basin_size_consistent;
  j["scan_resolution"] = report.scan_resolution;
  j["worst_violation"] = report.worst_violation;
  j["scan_min"] = report.scan_min;
  j["zero_cluster_count"] = report.zero_cluster_count;
  j["measured_basin"] = report.measured_basin;
  return j;
}

// Wall time is deliberately omitted: serialized records must be reproducible
// byte for byte under a fixed config and seed.
inline json experiment_stats_to_json(const ExperimentStats& stats) {
  json j;
  j["runs"] = stats.runs;
  j["successes"] = stats.successes;
  j["mean_queries"] = stats.mean_queries;
  j["std_queries"] = stats.std_queries;
  return j;
}

inline json comparison_row_to_json(const ComparisonRow& row) {
  json j;
  j["n_items"] = row.n_items;
  j["delta1"] = row.delta1;
  j["safety_c"] = row.safety_c;
  j["ensemble_queries"] = row.ensemble_queries;
  j["grover_pure"] = row.grover_pure;
  j["grover_pseudopure"] = row.grover_pseudopure;
  j["ensemble_wins_vs_pure"] = row.ensemble_wins_vs_pure;
  return j;
}

inline json bench_row_to_json(const BenchRow& row) {
  json j;
  j["n_padded"] = row.n_padded;
  j["delta1"] = row.delta1;
  j["safety_c"] = row.safety_c;
  j["tests"] = row.tests;
  j["predicted_queries"] = row.predicted_queries;
  if (row.realized_queries) j["realized_queries"] = *row.realized_queries;
  return j;
}

// CSV tables; column order is fixed and versioned in the header comment.

inline std::string bench_rows_to_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "# ensopt bench table v1\n";
  out << "# columns: n_padded,delta1,safety_c,tests,predicted_queries,realized_queries\n";
  for (const BenchRow& r : rows) {
    out << r.n_padded << ',' << format_double(r.delta1) << ',' << format_double(r.safety_c)
        << ',' << r.tests << ',' << r.predicted_queries << ',';
    if (r.realized_queries) out << *r.realized_queries;
    out << '\n';
  }
  return out.str();
}

inline std::string comparison_rows_to_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "# ensopt comparison table v1\n";
  out << "# columns: n_items,delta1,safety_c,ensemble_queries,grover_pure,"
         "grover_pseudopure,ensemble_wins_vs_pure\n";
  for (const ComparisonRow& r : rows) {
    out << r.n_items << ',' << format_double(r.delta1) << ',' << format_double(r.safety_c)
        << ',' << r.ensemble_queries << ',' << r.grover_pure << ',' << r.grover_pseudopure
        << ',' << (r.ensemble_wins_vs_pure ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace ensopt
