// Command-line front end: solve | search | bench | compare | validate.
// Exit codes: 0 success, 1 usage or config error, 2 detected search failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ensopt/io.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_override;
  std::optional<std::string> format_override;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Path to the JSON config file")
      ->required();
  cmd->add_option("--seed", flags.seed_override, "Override the config's RNG seed");
  cmd->add_option("--out", flags.out_override, "Write the output to this path (default: stdout)");
  cmd->add_option("--format", flags.format_override, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

ensopt::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  ensopt::json j;
  in >> j;
  return j;
}

// Resolve the output destination: CLI flags win over the config's output block.
struct OutputTarget {
  std::optional<std::string> path;
  std::string format = "json";
};

OutputTarget resolve_output(const CommonFlags& flags, const std::optional<std::string>& cfg_path,
                            const std::optional<std::string>& cfg_format) {
  OutputTarget target;
  target.path = flags.out_override ? flags.out_override : cfg_path;
  if (flags.format_override)
    target.format = *flags.format_override;
  else if (cfg_format)
    target.format = *cfg_format;
  return target;
}

void write_output(const OutputTarget& target, const std::string& payload) {
  if (target.path) {
    std::ofstream out(*target.path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + *target.path);
    out << payload;
  } else {
    std::cout << payload;
  }
}

void require_json_format(const OutputTarget& target, const std::string& command) {
  if (target.format != "json")
    throw std::invalid_argument(command + " emits a record, not a table; use --format json");
}

int cmd_solve(const CommonFlags& flags) {
  ensopt::SolveCmdConfig cfg = ensopt::parse_solve_config(load_config(flags.config_path));
  if (flags.seed_override) cfg.seed = *flags.seed_override;
  const OutputTarget target = resolve_output(flags, cfg.out_path, cfg.out_format);
  require_json_format(target, "solve");

  const ensopt::ObjectiveSpec objective = ensopt::build_objective(cfg.objective, cfg.delta);
  const ensopt::SolveOptions options = ensopt::solve_options_from_config(cfg);

  ensopt::json out;
  out["config"] = ensopt::solve_config_to_json(cfg);
  int exit_code = 0;
  if (cfg.runs > 1) {
    out["command"] = "experiment";
    const ensopt::ExperimentStats stats =
        ensopt::run_experiment(objective, options, cfg.runs, cfg.seed);
    out["stats"] = ensopt::experiment_stats_to_json(stats);
    std::cerr << "experiment: " << stats.successes << "/" << stats.runs
              << " runs succeeded, mean wall time " << stats.mean_wall_seconds << " s\n";
  } else {
    out["command"] = "solve";
    const ensopt::SolveReport report = ensopt::solve(objective, options);
    out["report"] = ensopt::solve_report_to_json(report);
    if (report.search.failure_detected()) {
      std::cerr << "solve: search verification failed; the found cell is not marked.\n"
                << "       Either the noise level defeated the repetition schedule or the\n"
                << "       grid cells are larger than the basin (check basin metadata).\n";
      exit_code = 2;
    }
  }
  write_output(target, out.dump(2) + "\n");
  return exit_code;
}

int cmd_search(const CommonFlags& flags) {
  ensopt::SearchCmdConfig cfg = ensopt::parse_search_config(load_config(flags.config_path));
  if (flags.seed_override) cfg.seed = *flags.seed_override;
  const OutputTarget target = resolve_output(flags, cfg.out_path, cfg.out_format);
  require_json_format(target, "search");

  ensopt::MarkedSetOracle oracle(cfg.n_padded, cfg.marked);
  ensopt::MeasurementModel model(cfg.delta1, cfg.seed);
  ensopt::SearchConfig search_config;
  search_config.safety_c = cfg.safety_c;
  search_config.verify_result = cfg.verify;
  const ensopt::SearchResult result =
      ensopt::run_search(oracle, std::move(model), search_config);

  ensopt::json out;
  out["command"] = "search";
  out["config"] = ensopt::search_config_to_json(cfg);
  out["result"] = ensopt::search_result_to_json(result);
  write_output(target, out.dump(2) + "\n");
  return result.failure_detected() ? 2 : 0;
}

int cmd_bench(const CommonFlags& flags) {
  ensopt::BenchCmdConfig cfg = ensopt::parse_bench_config(load_config(flags.config_path));
  if (flags.seed_override) cfg.seed = *flags.seed_override;
  const OutputTarget target = resolve_output(flags, cfg.out_path, cfg.out_format);

  const std::vector<ensopt::BenchRow> rows = ensopt::build_bench_table(
      cfg.n_list, cfg.delta1_list, cfg.safety_c, cfg.realized, cfg.seed);

  if (target.format == "csv") {
    write_output(target, ensopt::bench_rows_to_csv(rows));
  } else {
    ensopt::json out;
    out["command"] = "bench";
    out["config"] = ensopt::bench_config_to_json(cfg);
    ensopt::json jrows = ensopt::json::array();
    for (const auto& r : rows) jrows.push_back(ensopt::bench_row_to_json(r));
    out["rows"] = jrows;
    write_output(target, out.dump(2) + "\n");
  }
  return 0;
}

int cmd_compare(const CommonFlags& flags) {
  ensopt::CompareCmdConfig cfg = ensopt::parse_compare_config(load_config(flags.config_path));
  const OutputTarget target = resolve_output(flags, cfg.out_path, cfg.out_format);

  std::vector<ensopt::ComparisonRow> rows;
  for (std::uint64_t n : cfg.n_list)
    for (double delta1 : cfg.delta1_list)
      rows.push_back(ensopt::compare(n, delta1, cfg.safety_c));

  if (target.format == "csv") {
    write_output(target, ensopt::comparison_rows_to_csv(rows));
  } else {
    ensopt::json out;
    out["command"] = "compare";
    out["config"] = ensopt::compare_config_to_json(cfg);
    ensopt::json jrows = ensopt::json::array();
    for (const auto& r : rows) jrows.push_back(ensopt::comparison_row_to_json(r));
    out["rows"] = jrows;
    ensopt::json thresholds = ensopt::json::array();
    for (double delta1 : cfg.delta1_list) {
      if (delta1 <= 0.0 || delta1 >= 1.0) continue;
      const ensopt::CrossoverThreshold t = ensopt::ensemble_threshold_max_N(delta1);
      ensopt::json row;
      row["delta1"] = delta1;
      row["max_pow2"] = t.max_pow2;
      row["max_unrestricted"] = t.max_unrestricted;
      thresholds.push_back(row);
    }
    out["thresholds"] = thresholds;
    write_output(target, out.dump(2) + "\n");
  }
  return 0;
}

int cmd_validate(const CommonFlags& flags) {
  ensopt::ValidateCmdConfig cfg = ensopt::parse_validate_config(load_config(flags.config_path));
  const OutputTarget target = resolve_output(flags, cfg.out_path, cfg.out_format);
  require_json_format(target, "validate");

  const ensopt::ObjectiveSpec objective = ensopt::build_objective(cfg.objective, cfg.delta);
  const ensopt::AssumptionReport report =
      ensopt::validate_assumptions(objective, cfg.resolution);

  ensopt::json out;
  out["command"] = "validate";
  out["config"] = ensopt::validate_config_to_json(cfg);
  out["report"] = ensopt::assumption_report_to_json(report);
  write_output(target, out.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global optimization via ensemble binary-partition search"};
  app.require_subcommand(1);

  CommonFlags solve_flags, search_flags, bench_flags, compare_flags, validate_flags;
  CLI::App* solve = app.add_subcommand(
      "solve", "Full pipeline: discretize, search, refine");
  add_common_flags(solve, solve_flags);
  CLI::App* search = app.add_subcommand(
      "search", "Partition search on an explicit marked set (harness mode)");
  add_common_flags(search, search_flags);
  CLI::App* bench = app.add_subcommand(
      "bench", "Query-count sweep over database sizes and noise levels");
  add_common_flags(bench, bench_flags);
  CLI::App* compare = app.add_subcommand(
      "compare", "Query counts vs pure and pseudopure baselines");
  add_common_flags(compare, compare_flags);
  CLI::App* validate = app.add_subcommand(
      "validate", "Exhaustive check of the objective's structural assumptions");
  add_common_flags(validate, validate_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_flags);
    if (search->parsed()) return cmd_search(search_flags);
    if (bench->parsed()) return cmd_bench(bench_flags);
    if (compare->parsed()) return cmd_compare(compare_flags);
    if (validate->parsed()) return cmd_validate(validate_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
