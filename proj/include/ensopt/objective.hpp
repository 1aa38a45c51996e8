#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ensopt {

// A point in the unit hypercube [0,1]^d.
using Point = std::vector<double>;

// Evaluation counters, split into two budgets:
//   solver - evaluations charged to the optimization run itself
//   scan   - evaluations spent on validation, brute-force checks and other
//            bookkeeping that the solver's complexity claims do not cover
// Counters are atomic, so concurrent increments are safe; copies of an
// ObjectiveSpec share the same counters.
struct EvalCounters {
  std::atomic<std::uint64_t> solver{0};
  std::atomic<std::uint64_t> scan{0};
};

// A continuous objective f : [0,1]^d -> [0,1] together with the structural
// metadata the solver exploits: the gap `gap_delta` separating the global
// minimum (value zero) from every other local minimum, and `basin_size`, the
// per-dimension width of the global-minimum basin measured at height
// gap_delta. Widths are per-dimension by convention.
//
// `known_optimum` is test-only ground truth. Nothing on the solver path reads
// it; it exists so tests can check that refinement landed in the right place.
class ObjectiveSpec {
 public:
  using Evaluator = std::function<double(const Point&)>;

  ObjectiveSpec(int dimension, Evaluator evaluator, double gap_delta,
                std::vector<double> basin_size,
                std::optional<Point> known_optimum = std::nullopt)
      : dimension_(dimension),
        evaluator_(std::move(evaluator)),
        gap_delta_(gap_delta),
        basin_size_(std::move(basin_size)),
        known_optimum_(std::move(known_optimum)),
        counters_(std::make_shared<EvalCounters>()) {
    if (dimension_ < 1) throw std::invalid_argument("objective: dimension must be >= 1");
    if (!evaluator_) throw std::invalid_argument("objective: null evaluator");
    if (!(gap_delta_ > 0.0 && gap_delta_ < 1.0))
      throw std::invalid_argument("objective: gap delta must lie in (0,1)");
    if (basin_size_.size() != static_cast<std::size_t>(dimension_))
      throw std::invalid_argument("objective: basin size needs one width per dimension");
    for (double r : basin_size_)
      if (!(r > 0.0 && r <= 1.0))
        throw std::invalid_argument("objective: basin widths must lie in (0,1]");
    if (known_optimum_ && known_optimum_->size() != static_cast<std::size_t>(dimension_))
      throw std::invalid_argument("objective: known optimum has wrong dimension");
  }

  int dimension() const { return dimension_; }
  double gap_delta() const { return gap_delta_; }
  const std::vector<double>& basin_size() const { return basin_size_; }
  const std::optional<Point>& known_optimum() const { return known_optimum_; }

  std::uint64_t eval_count() const { return counters_->solver.load(); }
  std::uint64_t scan_count() const { return counters_->scan.load(); }

  double call_metered(const Point& p, bool scan_budget) const {
    check_point(p);
    if (scan_budget)
      counters_->scan.fetch_add(1);
    else
      counters_->solver.fetch_add(1);
    const double v = evaluator_(p);
    if (!(v >= 0.0 && v <= 1.0))
      throw std::domain_error("objective: evaluator returned a value outside [0,1]");
    return v;
  }

  void check_point(const Point& p) const {
    if (p.size() != static_cast<std::size_t>(dimension_))
      throw std::invalid_argument("objective: point dimension mismatch");
    for (double x : p)
      if (!(x >= 0.0 && x <= 1.0))
        throw std::out_of_range("objective: coordinate outside [0,1]");
  }

 private:
  int dimension_;
  Evaluator evaluator_;
  double gap_delta_;
  std::vector<double> basin_size_;
  std::optional<Point> known_optimum_;
  std::shared_ptr<EvalCounters> counters_;
};

// Evaluate f(p) on the solver budget. Exactly one counter tick per call.
inline double evaluate(const ObjectiveSpec& spec, const Point& p) {
  return spec.call_metered(p, /*scan_budget=*/false);
}

// Evaluate f(p) on the scan budget (validation, brute force, diagnostics).
inline double evaluate_scan(const ObjectiveSpec& spec, const Point& p) {
  return spec.call_metered(p, /*scan_budget=*/true);
}

namespace detail {
inline double sq_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}
}  // namespace detail

// Flat objective with a single rectangular well of width epsilon (per
// dimension, as an L-inf ball) around center `a`: f = 0 inside the closed
// well, 1 outside. The zero set has Lebesgue measure epsilon^d, which is what
// makes blind sampling hopeless and a known basin width valuable.
inline ObjectiveSpec make_golf_course(int dimension, const Point& center, double epsilon,
                                      double gap_delta = 0.5) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("golf course: epsilon must lie in (0,1)");
  if (center.size() != static_cast<std::size_t>(dimension))
    throw std::invalid_argument("golf course: center has wrong dimension");
  for (double a : center)
    if (!(a >= epsilon / 2.0 && a <= 1.0 - epsilon / 2.0))
      throw std::invalid_argument("golf course: well must lie fully inside the domain");
  const double half = epsilon / 2.0;
  auto f = [center, half](const Point& p) {
    for (std::size_t j = 0; j < p.size(); ++j)
      if (std::abs(p[j] - center[j]) > half) return 1.0;
    return 0.0;
  };
  return ObjectiveSpec(dimension, std::move(f), gap_delta,
                       std::vector<double>(dimension, epsilon), center);
}

// Smooth single-well objective 1 - exp(-|p-a|^2 / (2 sigma^2)). The basin
// width at height delta follows from solving 1 - exp(-w^2 / (2 sigma^2)) =
// delta: half-width sigma * sqrt(2 ln(1/(1-delta))).
inline ObjectiveSpec make_gaussian_well(int dimension, const Point& center, double sigma,
                                        double gap_delta = 0.5) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian well: sigma must be positive");
  if (center.size() != static_cast<std::size_t>(dimension))
    throw std::invalid_argument("gaussian well: center has wrong dimension");
  for (double a : center)
    if (!(a > 0.0 && a < 1.0))
      throw std::invalid_argument("gaussian well: center must be interior");
  auto f = [center, sigma](const Point& p) {
    return 1.0 - std::exp(-detail::sq_distance(p, center) / (2.0 * sigma * sigma));
  };
  const double width = 2.0 * sigma * std::sqrt(2.0 * std::log(1.0 / (1.0 - gap_delta)));
  return ObjectiveSpec(dimension, std::move(f), gap_delta,
                       std::vector<double>(dimension, std::min(width, 1.0)), center);
}

// Several quadratic wells min_j(depth_j + slope * |p - c_j|^2), clipped at 1.
// Exactly one depth must be zero (the global minimum); every other depth must
// sit at or above the gap so the instance satisfies the solver's assumptions.
inline ObjectiveSpec make_multiwell(int dimension, const std::vector<Point>& centers,
                                    const std::vector<double>& depths,
                                    double gap_delta = 0.5, double slope = 50.0) {
  if (centers.empty() || centers.size() != depths.size())
    throw std::invalid_argument("multiwell: need one depth per center");
  if (!(slope > 0.0)) throw std::invalid_argument("multiwell: slope must be positive");
  int zero_count = 0;
  std::size_t zero_at = 0;
  for (std::size_t j = 0; j < depths.size(); ++j) {
    if (centers[j].size() != static_cast<std::size_t>(dimension))
      throw std::invalid_argument("multiwell: center has wrong dimension");
    if (depths[j] == 0.0) {
      ++zero_count;
      zero_at = j;
    } else if (!(depths[j] >= gap_delta && depths[j] <= 1.0)) {
      throw std::invalid_argument("multiwell: nonzero depths must lie in [gap_delta, 1]");
    }
  }
  if (zero_count != 1)
    throw std::invalid_argument("multiwell: exactly one depth must be zero");
  // Wells must not overlap inside the region where they undercut the clip
  // level 1; radius of well j at the clip is sqrt((1 - depth_j) / slope).
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      const double ri = std::sqrt((1.0 - depths[i]) / slope);
      const double rj = std::sqrt((1.0 - depths[j]) / slope);
      if (std::sqrt(detail::sq_distance(centers[i], centers[j])) <= ri + rj)
        throw std::invalid_argument("multiwell: wells overlap");
    }
  auto f = [centers, depths, slope](const Point& p) {
    double best = 1.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      const double v = depths[j] + slope * detail::sq_distance(p, centers[j]);
      if (v < best) best = v;
    }
    return best;
  };
  const double width = 2.0 * std::sqrt(gap_delta / slope);
  return ObjectiveSpec(dimension, std::move(f), gap_delta,
                       std::vector<double>(dimension, std::min(width, 1.0)),
                       centers[zero_at]);
}

// Result of the exhaustive desk-scale scan over a resolution^d midpoint grid.
// scan_resolution is recorded so the report is reproducible. worst_violation
// is 0 when all checks pass, otherwise the largest normalized violation seen:
//   uniqueness - number of extra near-zero clusters,
//   gap        - (delta - offending_minimum) / delta,
//   basin      - how far the measured/claimed width ratio falls outside its
//                allowed band, in band units.
struct AssumptionReport {
  bool unique_min_zero = false;
  bool gap_holds = false;
  bool basin_size_consistent = false;
  int scan_resolution = 0;
  double worst_violation = 0.0;
  // diagnostics beyond the headline booleans
  double scan_min = 0.0;
  int zero_cluster_count = 0;
  std::vector<double> measured_basin;

  bool all_hold() const { return unique_min_zero && gap_holds && basin_size_consistent; }
};

// Exhaustively scan a resolution^d grid of cell midpoints and check the three
// structural assumptions: a unique near-zero minimum cluster, no other local
// minimum at or below gap_delta, and metadata basin widths within a factor of
// two of the measured sublevel-set extent. All evaluations land on the scan
// budget. A cluster is "near zero" when it dips below gap_delta/2; the width
// band is strict and guarded by one grid cell, so a claimed width off by a
// full factor of two is flagged even when discretization lands the ratio a
// hair inside 2.0.
inline AssumptionReport validate_assumptions(const ObjectiveSpec& spec, int resolution) {
  if (resolution < 2) throw std::invalid_argument("validate: resolution must be >= 2");
  const int d = spec.dimension();
  double cells_d = 1.0;
  for (int j = 0; j < d; ++j) cells_d *= static_cast<double>(resolution);
  if (cells_d > static_cast<double>(1ULL << 26))
    throw std::invalid_argument("validate: scan grid too large");
  const std::uint64_t n_cells = static_cast<std::uint64_t>(cells_d);

  const double delta = spec.gap_delta();
  const double zero_tol = delta / 2.0;
  const double dx = 1.0 / static_cast<double>(resolution);

  auto cell_point = [&](std::uint64_t idx) {
    Point p(d);
    for (int j = 0; j < d; ++j) {
      p[j] = (static_cast<double>(idx % resolution) + 0.5) * dx;
      idx /= resolution;
    }
    return p;
  };

  std::vector<double> value(n_cells);
  double scan_min = 2.0;
  for (std::uint64_t i = 0; i < n_cells; ++i) {
    value[i] = evaluate_scan(spec, cell_point(i));
    if (value[i] < scan_min) scan_min = value[i];
  }

  // Connected components of the sublevel set {f < delta}, axis neighbors.
  std::vector<std::int32_t> component(n_cells, -1);
  std::int32_t n_components = 0;
  std::vector<double> comp_min;
  std::vector<std::vector<std::uint64_t>> comp_lo, comp_hi;  // bounding boxes
  std::vector<std::uint64_t> stack;
  std::vector<std::uint64_t> digits(d);
  for (std::uint64_t seed_cell = 0; seed_cell < n_cells; ++seed_cell) {
    if (value[seed_cell] >= delta || component[seed_cell] >= 0) continue;
    const std::int32_t id = n_components++;
    comp_min.push_back(2.0);
    comp_lo.emplace_back(d, static_cast<std::uint64_t>(resolution));
    comp_hi.emplace_back(d, 0);
    stack.clear();
    stack.push_back(seed_cell);
    component[seed_cell] = id;
    while (!stack.empty()) {
      const std::uint64_t cur = stack.back();
      stack.pop_back();
      if (value[cur] < comp_min[id]) comp_min[id] = value[cur];
      std::uint64_t rest = cur;
      for (int j = 0; j < d; ++j) {
        digits[j] = rest % resolution;
        rest /= resolution;
        if (digits[j] < comp_lo[id][j]) comp_lo[id][j] = digits[j];
        if (digits[j] > comp_hi[id][j]) comp_hi[id][j] = digits[j];
      }
      std::uint64_t stride = 1;
      for (int j = 0; j < d; ++j) {
        if (digits[j] > 0) {
          const std::uint64_t nb = cur - stride;
          if (value[nb] < delta && component[nb] < 0) {
            component[nb] = id;
            stack.push_back(nb);
          }
        }
        if (digits[j] + 1 < static_cast<std::uint64_t>(resolution)) {
          const std::uint64_t nb = cur + stride;
          if (value[nb] < delta && component[nb] < 0) {
            component[nb] = id;
            stack.push_back(nb);
          }
        }
        stride *= static_cast<std::uint64_t>(resolution);
      }
    }
  }

  AssumptionReport report;
  report.scan_resolution = resolution;
  report.scan_min = scan_min;

  int zero_clusters = 0;
  std::int32_t zero_id = -1;
  for (std::int32_t c = 0; c < n_components; ++c)
    if (comp_min[c] <= zero_tol) {
      ++zero_clusters;
      zero_id = c;
    }
  report.zero_cluster_count = zero_clusters;
  report.unique_min_zero = (scan_min <= zero_tol) && (zero_clusters == 1);
  if (zero_clusters > 1)
    report.worst_violation = std::max(report.worst_violation, double(zero_clusters - 1));
  if (scan_min > zero_tol) report.worst_violation = std::max(report.worst_violation, 1.0);

  // Gap check: every weak local minimum (value <= all axis neighbors) must
  // either sit above delta or belong to the unique near-zero cluster.
  bool gap_ok = true;
  for (std::uint64_t i = 0; i < n_cells; ++i) {
    if (value[i] > delta) continue;
    if (component[i] >= 0 && comp_min[component[i]] <= zero_tol) continue;
    bool weak_min = true;
    std::uint64_t rest = i, stride = 1;
    for (int j = 0; j < d && weak_min; ++j) {
      const std::uint64_t digit = rest % resolution;
      rest /= resolution;
      if (digit > 0 && value[i - stride] < value[i]) weak_min = false;
      if (digit + 1 < static_cast<std::uint64_t>(resolution) && value[i + stride] < value[i])
        weak_min = false;
      stride *= static_cast<std::uint64_t>(resolution);
    }
    if (weak_min) {
      gap_ok = false;
      report.worst_violation =
          std::max(report.worst_violation, (delta - value[i]) / delta);
    }
  }
  report.gap_holds = gap_ok;

  // Basin width: extent of the near-zero cluster per dimension, measured in
  // whole cells, compared against the claimed width with a one-cell guard.
  bool basin_ok = (zero_id >= 0);
  report.measured_basin.assign(d, 0.0);
  if (zero_id >= 0) {
    for (int j = 0; j < d; ++j) {
      const double measured =
          static_cast<double>(comp_hi[zero_id][j] - comp_lo[zero_id][j] + 1) * dx;
      report.measured_basin[j] = measured;
      const double claimed = spec.basin_size()[j];
      const double hi_edge = 2.0 * claimed - dx;
      const double lo_edge = claimed / 2.0 + dx;
      // Degenerate guard bands (claimed within a cell or two of zero) fall
      // back to the plain strict factor-two test.
      const bool ok = (hi_edge > lo_edge) ? (measured > lo_edge && measured < hi_edge)
                                          : (measured > claimed / 2.0 && measured < 2.0 * claimed);
      if (!ok) {
        basin_ok = false;
        const double ratio = measured / claimed;
        report.worst_violation =
            std::max(report.worst_violation, std::abs(std::log2(std::max(ratio, 1e-12))));
      }
    }
  } else {
    report.worst_violation = std::max(report.worst_violation, 1.0);
  }
  report.basin_size_consistent = basin_ok;
  return report;
}

}  // namespace ensopt
