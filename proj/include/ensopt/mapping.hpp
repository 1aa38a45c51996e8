#pragma once

#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "ensopt/objective.hpp"

namespace ensopt {

// Uniform discretization of [0,1]^d into M^d hypercube cells of side 1/M,
// padded up to a power of two so the cell index fits a binary register.
// Midpoints are computed as (c + 1/2) / M directly, so the grid tiles [0,1]
// exactly; cell_width is the derived value 1/M.
struct GridSpec {
  int dimension = 1;
  std::uint64_t cells_per_dim = 1;  // M
  double cell_width = 1.0;          // 1/M
  std::uint64_t n_cells = 1;        // M^d
  std::uint64_t n_padded = 1;       // smallest power of two >= n_cells
  int n_bits = 0;                   // log2(n_padded)
};

inline GridSpec make_grid(int dimension, std::uint64_t cells_per_dim) {
  if (dimension < 1) throw std::invalid_argument("grid: dimension must be >= 1");
  if (cells_per_dim < 1) throw std::invalid_argument("grid: cells per dimension must be >= 1");
  GridSpec g;
  g.dimension = dimension;
  g.cells_per_dim = cells_per_dim;
  g.cell_width = 1.0 / static_cast<double>(cells_per_dim);
  std::uint64_t n = 1;
  for (int j = 0; j < dimension; ++j) {
    if (n > (1ULL << 26) / cells_per_dim + 1)
      throw std::invalid_argument("grid: too many cells to simulate");
    n *= cells_per_dim;
  }
  if (n > (1ULL << 26)) throw std::invalid_argument("grid: too many cells to simulate");
  g.n_cells = n;
  g.n_padded = std::bit_ceil(n);
  g.n_bits = std::countr_zero(g.n_padded);
  return g;
}

// 0-based index of a grid cell, in [0, n_padded).
struct CellIndex {
  std::uint64_t value = 0;
  friend bool operator==(CellIndex a, CellIndex b) { return a.value == b.value; }
  friend bool operator!=(CellIndex a, CellIndex b) { return a.value != b.value; }
};

// Smallest sharpening exponent m such that delta^(1/m) >= 1/2, i.e. the
// smallest m with 2^-m <= delta. Any point with f >= delta then rounds to
// h = 0 under the binary cut.
inline int choose_sharpening_exponent(double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("sharpening: delta must lie in (0,1)");
  int m = 1;
  while (std::ldexp(1.0, -m) > delta) ++m;
  return m;
}

// Cells per dimension so that the midpoint lattice (spacing 1/M) cannot skip
// an axis-aligned interval of width min_j r_j. safety > 1 shrinks the cell
// further, guarding against the cut-height sublevel set being narrower than
// the basin measured at height delta.
inline std::uint64_t choose_grid_resolution(const std::vector<double>& basin_size,
                                            double safety) {
  if (basin_size.empty()) throw std::invalid_argument("grid: empty basin size");
  if (!(safety >= 1.0)) throw std::invalid_argument("grid: safety must be >= 1");
  double r_min = basin_size.front();
  for (double r : basin_size) {
    if (!(r > 0.0 && r <= 1.0))
      throw std::invalid_argument("grid: basin widths must lie in (0,1]");
    if (r < r_min) r_min = r;
  }
  return static_cast<std::uint64_t>(std::ceil(safety / r_min));
}

// Mixed-radix decode: digit j of `i` in base M is the cell coordinate along
// dimension j (least significant digit = dimension 0). Padded indices have no
// midpoint.
inline Point index_to_midpoint(const GridSpec& grid, CellIndex i) {
  if (i.value >= grid.n_cells)
    throw std::out_of_range("grid: padded index has no midpoint");
  Point p(grid.dimension);
  std::uint64_t rest = i.value;
  for (int j = 0; j < grid.dimension; ++j) {
    p[j] = (static_cast<double>(rest % grid.cells_per_dim) + 0.5) /
           static_cast<double>(grid.cells_per_dim);
    rest /= grid.cells_per_dim;
  }
  return p;
}

// Inverse codec: cells are half-open along each axis except the last one,
// which is closed at 1.
inline CellIndex midpoint_to_index(const GridSpec& grid, const Point& p) {
  if (p.size() != static_cast<std::size_t>(grid.dimension))
    throw std::invalid_argument("grid: point dimension mismatch");
  std::uint64_t idx = 0;
  std::uint64_t stride = 1;
  for (int j = 0; j < grid.dimension; ++j) {
    const double x = p[j];
    if (!(x >= 0.0 && x <= 1.0)) throw std::out_of_range("grid: coordinate outside [0,1]");
    std::uint64_t c = static_cast<std::uint64_t>(x * static_cast<double>(grid.cells_per_dim));
    if (c >= grid.cells_per_dim) c = grid.cells_per_dim - 1;
    idx += c * stride;
    stride *= grid.cells_per_dim;
  }
  return CellIndex{idx};
}

// g = f^(1/m): squashes everything at or above the gap toward 1 while pinning
// f = 0 at 0. Charges one solver evaluation.
inline double sharpen(const ObjectiveSpec& spec, int m, const Point& p) {
  if (m < 1) throw std::invalid_argument("sharpen: exponent must be >= 1");
  return std::pow(evaluate(spec, p), 1.0 / static_cast<double>(m));
}

struct OracleCounters {
  std::atomic<std::uint64_t> queries{0};  // solver-charged oracle invocations
  std::atomic<std::uint64_t> work{0};     // underlying per-cell evaluations
};

// Binary oracle over grid cells: h(i) = 1 - floor(g(midpoint(i)) + 1/2),
// equivalently h(i) = 1 iff f(midpoint(i)) < 2^-m (ties at g = 1/2 give 0).
// The comparison form is what we compute; it is exact where pow() is not.
// Padded indices always give 0. Values are cached for the oracle's lifetime
// since h is deterministic; `queries` still advances per invocation, because
// it models physical oracle calls, not memoization.
class DiscreteOracle {
 public:
  DiscreteOracle(ObjectiveSpec objective, const GridSpec& grid, int sharpening_m)
      : objective_(std::move(objective)),
        grid_(grid),
        m_(sharpening_m),
        cut_(std::ldexp(1.0, -sharpening_m)),
        counters_(std::make_shared<OracleCounters>()),
        cache_(std::make_shared<std::vector<std::int8_t>>(grid.n_padded, kUnknown)) {
    if (sharpening_m < 1) throw std::invalid_argument("oracle: sharpening exponent must be >= 1");
    if (objective_.dimension() != grid.dimension)
      throw std::invalid_argument("oracle: grid dimension mismatch");
  }

  const GridSpec& grid() const { return grid_; }
  int sharpening_m() const { return m_; }
  double cut_height() const { return cut_; }
  const ObjectiveSpec& objective() const { return objective_; }
  std::uint64_t n_padded() const { return grid_.n_padded; }
  std::uint64_t n_cells() const { return grid_.n_cells; }
  std::uint64_t query_count() const { return counters_->queries.load(); }
  std::uint64_t work_count() const { return counters_->work.load(); }

  // One solver-charged oracle call on a single index.
  int h_query(std::uint64_t i) {
    counters_->queries.fetch_add(1);
    counters_->work.fetch_add(1);
    return cached_h(i, /*scan_budget=*/false);
  }

  // One concurrent ensemble evaluation over [lo, hi): a single solver query,
  // however many cells the ensemble spans. The hidden per-cell evaluations go
  // to the work counter and the objective's scan budget.
  std::uint64_t marked_in_range(std::uint64_t lo, std::uint64_t hi) {
    if (lo >= hi || hi > grid_.n_padded)
      throw std::invalid_argument("oracle: bad index range");
    counters_->queries.fetch_add(1);
    counters_->work.fetch_add(hi - lo);
    std::uint64_t marked = 0;
    for (std::uint64_t i = lo; i < hi; ++i) marked += cached_h(i, /*scan_budget=*/true);
    return marked;
  }

  // Test/validation path: no solver charge.
  int h_scan(std::uint64_t i) {
    counters_->work.fetch_add(1);
    return cached_h(i, /*scan_budget=*/true);
  }

 private:
  static constexpr std::int8_t kUnknown = -1;

  int cached_h(std::uint64_t i, bool scan_budget) {
    if (i >= grid_.n_padded) throw std::out_of_range("oracle: index out of range");
    std::int8_t& slot = (*cache_)[i];
    if (slot == kUnknown) {
      if (i >= grid_.n_cells) {
        slot = 0;
      } else {
        const double f = objective_.call_metered(index_to_midpoint(grid_, CellIndex{i}),
                                                 scan_budget);
        slot = (f < cut_) ? 1 : 0;
      }
    }
    return slot;
  }

  ObjectiveSpec objective_;
  GridSpec grid_;
  int m_;
  double cut_;
  std::shared_ptr<OracleCounters> counters_;
  std::shared_ptr<std::vector<std::int8_t>> cache_;
};

inline DiscreteOracle build_oracle(const ObjectiveSpec& spec, const GridSpec& grid,
                                   int sharpening_m) {
  return DiscreteOracle(spec, grid, sharpening_m);
}

// Synthetic oracle over an explicit marked set; used by the search-only CLI
// mode and by tests that need a marked set independent of any objective.
class MarkedSetOracle {
 public:
  MarkedSetOracle(std::uint64_t n_padded, const std::vector<std::uint64_t>& marked)
      : n_padded_(n_padded),
        bitmap_(n_padded, 0),
        counters_(std::make_shared<OracleCounters>()) {
    if (n_padded < 1 || !std::has_single_bit(n_padded))
      throw std::invalid_argument("marked-set oracle: size must be a power of two");
    for (std::uint64_t q : marked) {
      if (q >= n_padded) throw std::out_of_range("marked-set oracle: marked index out of range");
      bitmap_[q] = 1;
    }
  }

  std::uint64_t n_padded() const { return n_padded_; }
  std::uint64_t query_count() const { return counters_->queries.load(); }
  std::uint64_t work_count() const { return counters_->work.load(); }

  int h_query(std::uint64_t i) {
    check(i);
    counters_->queries.fetch_add(1);
    counters_->work.fetch_add(1);
    return bitmap_[i];
  }

  std::uint64_t marked_in_range(std::uint64_t lo, std::uint64_t hi) {
    if (lo >= hi || hi > n_padded_) throw std::invalid_argument("oracle: bad index range");
    counters_->queries.fetch_add(1);
    counters_->work.fetch_add(hi - lo);
    std::uint64_t marked = 0;
    for (std::uint64_t i = lo; i < hi; ++i) marked += bitmap_[i];
    return marked;
  }

  int h_scan(std::uint64_t i) {
    check(i);
    counters_->work.fetch_add(1);
    return bitmap_[i];
  }

 private:
  void check(std::uint64_t i) const {
    if (i >= n_padded_) throw std::out_of_range("oracle: index out of range");
  }
  std::uint64_t n_padded_;
  std::vector<std::uint8_t> bitmap_;
  std::shared_ptr<OracleCounters> counters_;
};

// Anything the ensemble machine can drive: report a padded size, answer a
// single charged query, answer one concurrent evaluation over a range.
template <class O>
concept OracleLike = requires(O o, std::uint64_t i) {
  { o.n_padded() } -> std::convertible_to<std::uint64_t>;
  { o.h_query(i) } -> std::convertible_to<int>;
  { o.marked_in_range(i, i) } -> std::convertible_to<std::uint64_t>;
};

// Index-offset window onto a parent oracle: view index i maps to parent index
// offset + i. This realizes the "prepare the same mixed state every time and
// remap the oracle" variant; counters are shared with the parent.
template <OracleLike O>
class OffsetOracleView {
 public:
  OffsetOracleView(O& parent, std::uint64_t offset, std::uint64_t span)
      : parent_(&parent), offset_(offset), span_(span) {
    if (span < 1 || !std::has_single_bit(span))
      throw std::invalid_argument("oracle view: span must be a power of two");
    if (offset + span > parent.n_padded())
      throw std::invalid_argument("oracle view: window exceeds parent range");
  }

  std::uint64_t n_padded() const { return span_; }
  int h_query(std::uint64_t i) { return parent_->h_query(offset_ + check(i)); }
  int h_scan(std::uint64_t i) { return parent_->h_scan(offset_ + check(i)); }
  std::uint64_t marked_in_range(std::uint64_t lo, std::uint64_t hi) {
    if (lo >= hi || hi > span_) throw std::invalid_argument("oracle view: bad index range");
    return parent_->marked_in_range(offset_ + lo, offset_ + hi);
  }

 private:
  std::uint64_t check(std::uint64_t i) const {
    if (i >= span_) throw std::out_of_range("oracle view: index out of range");
    return i;
  }
  O* parent_;
  std::uint64_t offset_;
  std::uint64_t span_;
};

// Exhaustive marked-cell count on the scan budget. Desk-scale only.
template <OracleLike O>
std::uint64_t count_marked_bruteforce(O& oracle) {
  const std::uint64_t n = oracle.n_padded();
  if (n > (1ULL << 24)) throw std::invalid_argument("brute force: oracle too large");
  std::uint64_t count = 0;
  for (std::uint64_t i = 0; i < n; ++i) count += oracle.h_scan(i);
  return count;
}

}  // namespace ensopt
