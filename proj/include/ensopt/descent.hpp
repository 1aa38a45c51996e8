#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ensopt/objective.hpp"

namespace ensopt {

struct DescentConfig {
  double fd_step = 1e-6;
  double f_tol = 1e-9;
  double x_tol = 1e-10;
  std::uint64_t max_iters = 1000;
  double initial_step = 0.1;
};

enum class StopReason { f_tol, x_tol, max_iters, boundary, plateau };

struct DescentResult {
  Point point;
  double f_value = 0.0;
  std::uint64_t iters = 0;
  std::uint64_t evals_used = 0;
  StopReason terminated_by = StopReason::f_tol;
  std::vector<double> accepted_values;  // strictly decreasing, diagnostics only
};

// Central differences per coordinate, one-sided where the stencil would leave
// [0,1]^d (the step shrinks to the available room if even one side does not
// fit). Exactly 2d solver evaluations.
inline std::vector<double> finite_diff_gradient(const ObjectiveSpec& spec, const Point& p,
                                                double fd_step) {
  if (!(fd_step > 0.0)) throw std::invalid_argument("descent: fd step must be positive");
  spec.check_point(p);
  const int d = spec.dimension();
  std::vector<double> grad(d, 0.0);
  Point probe = p;
  for (int j = 0; j < d; ++j) {
    const double room_lo = p[j];
    const double room_hi = 1.0 - p[j];
    double h = fd_step;
    double f_plus, f_minus, span;
    if (h <= room_lo && h <= room_hi) {
      probe[j] = p[j] + h;
      f_plus = evaluate(spec, probe);
      probe[j] = p[j] - h;
      f_minus = evaluate(spec, probe);
      span = 2.0 * h;
    } else if (room_hi >= room_lo) {
      h = std::min(h, room_hi);
      probe[j] = p[j] + h;
      f_plus = evaluate(spec, probe);
      f_minus = evaluate(spec, p);
      span = h;
    } else {
      h = std::min(h, room_lo);
      f_plus = evaluate(spec, p);
      probe[j] = p[j] - h;
      f_minus = evaluate(spec, probe);
      span = h;
    }
    grad[j] = (f_plus - f_minus) / span;
    probe[j] = p[j];
  }
  return grad;
}

namespace detail {
inline Point project_to_box(Point p) {
  for (double& x : p) x = std::min(1.0, std::max(0.0, x));
  return p;
}
inline bool on_boundary(const Point& p) {
  for (double x : p)
    if (x == 0.0 || x == 1.0) return true;
  return false;
}
}  // namespace detail

// Local refinement from the found cell midpoint: steps of bounded length
// along the normalized negative gradient, halved until the value strictly
// decreases and regrown (capped at initial_step) after success. Normalizing
// the direction is the dilation that keeps steep, narrow basins from causing
// overshoot; the cap bounds the step regardless of gradient magnitude.
// Iterates are projected onto [0,1]^d, so boundary minima are reachable.
// A vanishing gradient (plateaus: derivatives are zero wherever defined)
// terminates immediately -- locating the basin is the search phase's job.
inline DescentResult refine(const ObjectiveSpec& spec, const Point& start,
                            const DescentConfig& config) {
  if (!(config.fd_step > 0.0 && config.f_tol > 0.0 && config.x_tol > 0.0 &&
        config.initial_step > 0.0))
    throw std::invalid_argument("descent: tolerances and steps must be positive");
  spec.check_point(start);
  constexpr double kPlateauGradNorm = 1e-12;

  const std::uint64_t evals_before = spec.eval_count();
  DescentResult result;
  result.point = start;
  result.f_value = evaluate(spec, start);
  result.accepted_values.push_back(result.f_value);
  if (result.f_value < config.f_tol) {
    result.terminated_by = StopReason::f_tol;
    result.evals_used = spec.eval_count() - evals_before;
    return result;
  }

  double step = config.initial_step;
  while (result.iters < config.max_iters) {
    const std::vector<double> grad = finite_diff_gradient(spec, result.point, config.fd_step);
    double norm = 0.0;
    for (double g : grad) norm += g * g;
    norm = std::sqrt(norm);
    if (norm < kPlateauGradNorm) {
      result.terminated_by = StopReason::plateau;
      break;
    }

    bool accepted = false;
    while (step >= config.x_tol) {
      Point candidate = result.point;
      for (int j = 0; j < spec.dimension(); ++j)
        candidate[j] -= step * grad[j] / norm;
      candidate = detail::project_to_box(std::move(candidate));
      if (candidate == result.point) {  // projection ate the whole step
        step /= 2.0;
        continue;
      }
      const double f_candidate = evaluate(spec, candidate);
      if (f_candidate < result.f_value) {
        result.point = std::move(candidate);
        result.f_value = f_candidate;
        result.accepted_values.push_back(f_candidate);
        accepted = true;
        break;
      }
      step /= 2.0;
    }
    if (!accepted) {
      result.terminated_by =
          detail::on_boundary(result.point) ? StopReason::boundary : StopReason::x_tol;
      result.evals_used = spec.eval_count() - evals_before;
      return result;
    }
    ++result.iters;
    if (result.f_value < config.f_tol) {
      result.terminated_by = StopReason::f_tol;
      result.evals_used = spec.eval_count() - evals_before;
      return result;
    }
    step = std::min(step * 1.5, config.initial_step);
  }
  if (result.iters >= config.max_iters) result.terminated_by = StopReason::max_iters;
  result.evals_used = spec.eval_count() - evals_before;
  return result;
}

}  // namespace ensopt
