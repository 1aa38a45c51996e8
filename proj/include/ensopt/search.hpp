#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ensopt/ensemble.hpp"

namespace ensopt {

struct SearchConfig {
  double safety_c = 2.0;  // multiplier on the trial count; the averaged noise
                          // is kept at 1/safety_c of the decision threshold
  bool verify_result = true;
  std::optional<std::uint64_t> max_tests;
};

enum class HalfChoice { lower, upper };

// Record of one halving decision: the lower half of the current candidate
// range was measured n_e times and the mean compared against the threshold.
struct PartitionTest {
  std::uint64_t k = 0;  // 1-based test number
  Partition tested;     // lower half
  std::uint64_t partition_size = 0;
  std::uint64_t n_e = 0;
  double mean_signal = 0.0;
  double threshold = 0.0;
  HalfChoice decision = HalfChoice::lower;
};

struct SearchResult {
  CellIndex found{};
  std::vector<PartitionTest> trace;
  std::uint64_t total_queries = 0;
  bool verification_performed = false;
  bool verified = false;  // verification query confirmed h(found) = 1

  // A noise-induced wrong turn surfaces here: the search finished but the
  // final verification query says the index is not marked.
  bool failure_detected() const { return verification_performed && !verified; }
};

// Midpoint between the no-hit signal 0 and the single-marked signal 1/P.
inline double decision_threshold(std::uint64_t partition_size) {
  if (partition_size < 1) throw std::invalid_argument("search: partition size must be >= 1");
  return 1.0 / (2.0 * static_cast<double>(partition_size));
}

// Trials needed so the averaged noise delta1/sqrt(n) stays at or below
// 1/(safety_c * 2P), i.e. at most 1/safety_c of the decision threshold:
// n = ceil((safety_c * 2P * delta1)^2), at least 1.
inline std::uint64_t required_trials(std::uint64_t partition_size, double delta1,
                                     double safety_c) {
  if (partition_size < 1) throw std::invalid_argument("search: partition size must be >= 1");
  if (!(delta1 >= 0.0)) throw std::invalid_argument("search: delta1 must be >= 0");
  if (!(safety_c >= 1.0)) throw std::invalid_argument("search: safety_c must be >= 1");
  const double x = safety_c * 2.0 * static_cast<double>(partition_size) * delta1;
  if (x <= 1.0) return 1;
  return static_cast<std::uint64_t>(std::ceil(x * x));
}

// Binary-partition driver. Starting from the full padded range, each test
// measures the lower half of the surviving range and keeps it iff the mean
// signal reaches the threshold (ties decide lower); otherwise the upper half
// must contain a marked index and survives by elimination. log2(n_padded)
// tests leave a single index, optionally confirmed by one direct query.
//
// With several marked indices the same rule applies: the lower half is kept
// exactly when it contains at least one marked index, so the surviving range
// always contains one and the result is some marked index.
template <OracleLike O>
SearchResult run_search(O& oracle, MeasurementModel model, const SearchConfig& config) {
  const std::uint64_t n = oracle.n_padded();
  if (n < 2 || !std::has_single_bit(n))
    throw std::invalid_argument("search: oracle size must be a power of two >= 2");
  if (!(config.safety_c >= 1.0)) throw std::invalid_argument("search: safety_c must be >= 1");
  const std::uint64_t n_tests = static_cast<std::uint64_t>(std::countr_zero(n));
  if (config.max_tests && n_tests > *config.max_tests)
    throw std::invalid_argument("search: more tests required than max_tests allows");

  SearchResult result;
  result.trace.reserve(n_tests);
  std::uint64_t lo = 0, hi = n;
  for (std::uint64_t k = 1; k <= n_tests; ++k) {
    const std::uint64_t half = (hi - lo) / 2;
    const Partition lower{lo, lo + half};
    const std::uint64_t n_e = required_trials(half, model.delta1, config.safety_c);
    const TrialsResult trials = run_trials(lower, oracle, model, n_e);
    const double threshold = decision_threshold(half);
    const HalfChoice decision =
        (trials.mean_signal >= threshold) ? HalfChoice::lower : HalfChoice::upper;
    result.trace.push_back(
        PartitionTest{k, lower, half, n_e, trials.mean_signal, threshold, decision});
    result.total_queries += trials.queries;
    if (decision == HalfChoice::lower)
      hi = lo + half;
    else
      lo = lo + half;
  }
  result.found = CellIndex{lo};
  if (config.verify_result) {
    result.verification_performed = true;
    result.verified = (oracle.h_query(lo) == 1);
    result.total_queries += 1;
  }
  return result;
}

// Closed-form query count of a run with these parameters: per-test trial
// counts over the halving schedule plus the verification query. Matches the
// realized total_queries of run_search exactly.
inline std::uint64_t predict_total_queries(std::uint64_t n_padded, double delta1,
                                           double safety_c, bool include_verification = true) {
  if (n_padded < 2 || !std::has_single_bit(n_padded))
    throw std::invalid_argument("search: n_padded must be a power of two >= 2");
  std::uint64_t total = include_verification ? 1 : 0;
  for (std::uint64_t p = n_padded / 2; p >= 1; p /= 2) {
    total += required_trials(p, delta1, safety_c);
    if (p == 1) break;
  }
  return total;
}

}  // namespace ensopt
