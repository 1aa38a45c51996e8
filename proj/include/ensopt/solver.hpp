#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ensopt/descent.hpp"
#include "ensopt/mapping.hpp"
#include "ensopt/search.hpp"

namespace ensopt {

// Everything the end-to-end pipeline needs beyond the objective itself.
// basin_override substitutes the metadata width when the user knows the
// sublevel set at the cut height is narrower than the basin at height delta;
// m_override pins the sharpening exponent.
struct SolveOptions {
  double grid_safety = 2.0;
  std::optional<std::vector<double>> basin_override;
  std::optional<int> m_override;
  double delta1 = 0.0;
  std::optional<std::uint64_t> molecules;
  double safety_c = 2.0;
  bool verify = true;
  std::uint64_t seed = 0;
  DescentConfig descent{};
};

struct SolveReport {
  GridSpec grid;
  int sharpening_m = 1;
  SearchResult search;
  std::optional<DescentResult> descent;
  bool success = false;  // verified marked cell and refined below f_tol
  // counter deltas over this solve
  std::uint64_t oracle_queries = 0;
  std::uint64_t classical_work = 0;
  std::uint64_t objective_evals = 0;
  std::uint64_t scan_evals = 0;
};

// Full pipeline: sharpen + discretize the objective into a binary oracle,
// locate a marked cell with the ensemble partition search, then refine from
// the cell midpoint by local descent. A failed verification short-circuits
// descent and is reported, never silently returned as a result.
inline SolveReport solve(const ObjectiveSpec& objective, const SolveOptions& options) {
  if (!(options.grid_safety >= 1.0))
    throw std::invalid_argument("solve: grid safety must be >= 1");
  const int m = options.m_override ? *options.m_override
                                   : choose_sharpening_exponent(objective.gap_delta());
  const std::vector<double>& basin =
      options.basin_override ? *options.basin_override : objective.basin_size();
  const std::uint64_t cells_per_dim = choose_grid_resolution(basin, options.grid_safety);
  const GridSpec grid = make_grid(objective.dimension(), cells_per_dim);

  const std::uint64_t evals_before = objective.eval_count();
  const std::uint64_t scans_before = objective.scan_count();
  DiscreteOracle oracle = build_oracle(objective, grid, m);

  SolveReport report;
  report.grid = grid;
  report.sharpening_m = m;

  if (grid.n_padded == 1) {
    // Degenerate single-cell grid: nothing to search, just verify.
    report.search.found = CellIndex{0};
    report.search.verification_performed = true;
    report.search.verified = (oracle.h_query(0) == 1);
    report.search.total_queries = 1;
  } else {
    MeasurementModel model(options.delta1, options.seed, options.molecules);
    SearchConfig search_config;
    search_config.safety_c = options.safety_c;
    search_config.verify_result = options.verify;
    report.search = run_search(oracle, std::move(model), search_config);
  }

  const bool search_ok =
      report.search.verification_performed ? report.search.verified : true;
  if (search_ok && report.search.found.value < grid.n_cells) {
    const Point midpoint = index_to_midpoint(grid, report.search.found);
    report.descent = refine(objective, midpoint, options.descent);
    report.success = report.search.verified &&
                     report.descent->f_value < options.descent.f_tol;
  }

  report.oracle_queries = oracle.query_count();
  report.classical_work = oracle.work_count();
  report.objective_evals = objective.eval_count() - evals_before;
  report.scan_evals = objective.scan_count() - scans_before;
  return report;
}

}  // namespace ensopt
