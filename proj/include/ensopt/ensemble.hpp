#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ensopt/mapping.hpp"
#include "ensopt/random.hpp"

namespace ensopt {

// Contiguous index range [lo, hi) of candidate cells. During the binary
// partition search the size is always a power of two.
struct Partition {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  std::uint64_t size() const { return hi - lo; }
};

// Coherence-free ensemble state: the input register holds an equally-weighted
// mixture over the partition (weight 1/P per index, kept explicit so tests
// can assert the oracle leaves it bit-identical), and the output register is
// summarized by the fraction of its spins in |1>. Thermal preparation puts
// that fraction at exactly 1/2; the oracle shifts it by marked/(2P).
struct MixedState {
  Partition partition;
  std::vector<double> input_weights;
  double out_frac_one = 0.5;
  bool oracle_applied = false;
};

// Single-trial measurement: additive Gaussian noise of standard deviation
// delta1 on the normalized signal, optionally preceded by binomial shot noise
// when the sub-ensembles contain finitely many molecules. The engine advances
// once per enabled noise source per measurement, so noiseless runs consume no
// randomness at all.
struct MeasurementModel {
  double delta1 = 0.0;
  std::optional<std::uint64_t> molecules_per_subensemble;
  std::uint64_t rng_seed = 0;
  std::mt19937_64 engine;

  explicit MeasurementModel(double delta1_in = 0.0, std::uint64_t seed = 0,
                            std::optional<std::uint64_t> molecules = std::nullopt)
      : delta1(delta1_in), molecules_per_subensemble(molecules), rng_seed(seed),
        engine(seed) {
    if (!(delta1 >= 0.0)) throw std::invalid_argument("measurement: delta1 must be >= 0");
    if (molecules_per_subensemble && *molecules_per_subensemble < 1)
      throw std::invalid_argument("measurement: molecule count must be >= 1");
  }
};

inline MixedState prepare_state(const Partition& partition) {
  if (partition.lo >= partition.hi) throw std::invalid_argument("ensemble: empty partition");
  MixedState state;
  state.partition = partition;
  state.input_weights.assign(partition.size(), 1.0 / static_cast<double>(partition.size()));
  state.out_frac_one = 0.5;
  state.oracle_applied = false;
  return state;
}

// Apply the oracle transformation to the whole ensemble at once. The input
// register is untouched; the |1> fraction of the output register becomes
// 1/2 + marked/(2P). This is one concurrent evaluation and charges exactly
// one solver query no matter how many cells the partition spans.
template <OracleLike O>
MixedState apply_oracle(const MixedState& state, O& oracle) {
  if (state.oracle_applied)
    throw std::logic_error("ensemble: oracle already applied; re-prepare the state first");
  if (state.partition.hi > oracle.n_padded())
    throw std::invalid_argument("ensemble: partition exceeds oracle range");
  const std::uint64_t marked = oracle.marked_in_range(state.partition.lo, state.partition.hi);
  MixedState out = state;
  out.out_frac_one = 0.5 + static_cast<double>(marked) /
                               (2.0 * static_cast<double>(state.partition.size()));
  out.oracle_applied = true;
  return out;
}

// One analog readout of the output register, normalized so the ideal value is
// marked/P: S = 2 * (out_frac_one - 1/2), plus measurement noise.
inline double measure_signal(const MixedState& state, MeasurementModel& model) {
  if (!state.oracle_applied)
    throw std::logic_error("ensemble: measure requires an oracle application");
  double frac = state.out_frac_one;
  if (model.molecules_per_subensemble) {
    const std::uint64_t n = *model.molecules_per_subensemble;
    frac = static_cast<double>(binomial(model.engine, n, frac)) / static_cast<double>(n);
  }
  double signal = 2.0 * (frac - 0.5);
  if (model.delta1 > 0.0) signal += model.delta1 * gaussian(model.engine);
  return signal;
}

struct TrialsResult {
  double mean_signal = 0.0;
  std::uint64_t queries = 0;
};

// n_trials independent prepare/apply/measure cycles; averaging suppresses the
// single-trial noise by 1/sqrt(n_trials). Each trial is one query.
template <OracleLike O>
TrialsResult run_trials(const Partition& partition, O& oracle, MeasurementModel& model,
                        std::uint64_t n_trials) {
  if (n_trials < 1) throw std::invalid_argument("ensemble: need at least one trial");
  double sum = 0.0;
  for (std::uint64_t t = 0; t < n_trials; ++t) {
    const MixedState prepared = prepare_state(partition);
    const MixedState transformed = apply_oracle(prepared, oracle);
    sum += measure_signal(transformed, model);
  }
  return TrialsResult{sum / static_cast<double>(n_trials), n_trials};
}

}  // namespace ensopt
