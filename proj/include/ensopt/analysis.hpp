#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ensopt/random.hpp"
#include "ensopt/search.hpp"
#include "ensopt/solver.hpp"

namespace ensopt {

// Query-count baselines. Both are order-of-magnitude models with the constant
// made explicit: pi/4 for the pure-state search, 1 for the pseudopure variant.
// Outputs saturate at uint64 max rather than overflow.

inline std::uint64_t grover_pure_queries(std::uint64_t n_items) {
  if (n_items < 1) throw std::invalid_argument("grover: N must be >= 1");
  const double q = std::ceil((kPi / 4.0) * std::sqrt(static_cast<double>(n_items)));
  return q < 1.0 ? 1 : static_cast<std::uint64_t>(q);
}

inline std::uint64_t grover_pseudopure_queries(std::uint64_t n_items) {
  if (n_items < 1) throw std::invalid_argument("grover: N must be >= 1");
  const double n = static_cast<double>(n_items);
  const double q = std::ceil(n * n * std::sqrt(n));
  if (q >= static_cast<double>(std::numeric_limits<std::uint64_t>::max()))
    return std::numeric_limits<std::uint64_t>::max();
  return q < 1.0 ? 1 : static_cast<std::uint64_t>(q);
}

// Left side of the crossover inequality N * sqrt(N) * log2(N) < 1/delta1^2;
// strictly increasing for N >= 2.
inline double crossover_lhs(std::uint64_t n_items) {
  const double n = static_cast<double>(n_items);
  return n * std::sqrt(n) * std::log2(n);
}

inline bool ensemble_beats_pure(std::uint64_t n_items, double delta1) {
  if (delta1 == 0.0) return true;
  return crossover_lhs(n_items) < 1.0 / (delta1 * delta1);
}

struct CrossoverThreshold {
  std::uint64_t max_pow2 = 1;          // largest power of two satisfying the bound
  std::uint64_t max_unrestricted = 1;  // largest integer satisfying the bound
};

// Largest database sizes for which the noisy ensemble search still beats the
// pure-state baseline at single-trial error level delta1.
inline CrossoverThreshold ensemble_threshold_max_N(double delta1) {
  if (!(delta1 > 0.0 && delta1 < 1.0))
    throw std::invalid_argument("threshold: delta1 must lie in (0,1)");
  const double rhs = 1.0 / (delta1 * delta1);
  CrossoverThreshold out;
  for (std::uint64_t n = 2; n <= (1ULL << 62); n *= 2) {
    if (crossover_lhs(n) < rhs)
      out.max_pow2 = n;
    else
      break;
  }
  std::uint64_t lo = 1, hi = 1ULL << 62;  // lhs(1) = 0 < rhs always
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo + 1) / 2;
    if (crossover_lhs(mid) < rhs)
      lo = mid;
    else
      hi = mid - 1;
  }
  out.max_unrestricted = lo;
  return out;
}

struct ComparisonRow {
  std::uint64_t n_items = 0;
  double delta1 = 0.0;
  double safety_c = 1.0;
  std::uint64_t ensemble_queries = 0;
  std::uint64_t grover_pure = 0;
  std::uint64_t grover_pseudopure = 0;
  bool ensemble_wins_vs_pure = false;
};

inline ComparisonRow compare(std::uint64_t n_items, double delta1, double safety_c) {
  ComparisonRow row;
  row.n_items = n_items;
  row.delta1 = delta1;
  row.safety_c = safety_c;
  row.ensemble_queries = predict_total_queries(n_items, delta1, safety_c);
  row.grover_pure = grover_pure_queries(n_items);
  row.grover_pseudopure = grover_pseudopure_queries(n_items);
  row.ensemble_wins_vs_pure = ensemble_beats_pure(n_items, delta1);
  return row;
}

struct BenchRow {
  std::uint64_t n_padded = 0;
  double delta1 = 0.0;
  double safety_c = 1.0;
  std::uint64_t tests = 0;
  std::uint64_t predicted_queries = 0;
  std::optional<std::uint64_t> realized_queries;  // from an actual synthetic run
};

// Query-count sweep over database sizes and noise levels. When `realized` is
// set, each row additionally runs the search on a synthetic single-marked
// oracle (marked position derived from the seed) and records the realized
// count, which must equal the prediction.
inline std::vector<BenchRow> build_bench_table(const std::vector<std::uint64_t>& n_list,
                                               const std::vector<double>& delta1_list,
                                               double safety_c, bool realized,
                                               std::uint64_t seed = 0) {
  std::vector<BenchRow> rows;
  std::uint64_t seed_state = seed;
  for (std::uint64_t n : n_list)
    for (double delta1 : delta1_list) {
      BenchRow row;
      row.n_padded = n;
      row.delta1 = delta1;
      row.safety_c = safety_c;
      row.tests = static_cast<std::uint64_t>(std::countr_zero(std::bit_ceil(n)));
      row.predicted_queries = predict_total_queries(n, delta1, safety_c);
      if (realized) {
        const std::uint64_t marked = splitmix64(seed_state) % n;
        MarkedSetOracle oracle(n, {marked});
        MeasurementModel model(delta1, splitmix64(seed_state));
        SearchConfig config;
        config.safety_c = safety_c;
        const SearchResult res = run_search(oracle, std::move(model), config);
        row.realized_queries = res.total_queries;
      }
      rows.push_back(row);
    }
  return rows;
}

struct ExperimentStats {
  std::uint64_t runs = 0;
  std::uint64_t successes = 0;
  double mean_queries = 0.0;
  double std_queries = 0.0;
  double mean_wall_seconds = 0.0;  // diagnostic; excluded from serialized output
};

// Repeat the full solve pipeline with per-run seeds derived from `seed`.
// Success couples the verified search with the descent tolerance: the
// deliverable is the continuous minimum, not just the marked cell. Failed
// runs count as failures, they do not abort the experiment.
inline ExperimentStats run_experiment(const ObjectiveSpec& objective,
                                      const SolveOptions& base_options, std::uint64_t runs,
                                      std::uint64_t seed) {
  if (runs < 1) throw std::invalid_argument("experiment: runs must be >= 1");
  ExperimentStats stats;
  stats.runs = runs;
  std::vector<double> query_counts;
  query_counts.reserve(runs);
  std::uint64_t seed_state = seed;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::uint64_t r = 0; r < runs; ++r) {
    SolveOptions options = base_options;
    options.seed = splitmix64(seed_state);
    const SolveReport report = solve(objective, options);
    if (report.success) ++stats.successes;
    query_counts.push_back(static_cast<double>(report.search.total_queries));
  }
  const auto t1 = std::chrono::steady_clock::now();
  stats.mean_wall_seconds =
      std::chrono::duration<double>(t1 - t0).count() / static_cast<double>(runs);

  double sum = 0.0;
  for (double q : query_counts) sum += q;
  stats.mean_queries = sum / static_cast<double>(runs);
  if (runs > 1) {
    double ss = 0.0;
    for (double q : query_counts) {
      const double d = q - stats.mean_queries;
      ss += d * d;
    }
    stats.std_queries = std::sqrt(ss / static_cast<double>(runs - 1));
  }
  return stats;
}

}  // namespace ensopt
