#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>

#include "ensopt/objective.hpp"
#include "ensopt/random.hpp"

using namespace ensopt;

TEST_CASE("golf course evaluates to 0 inside the well and 1 outside") {
  auto spec = make_golf_course(1, {0.3}, 1.0 / 32);
  CHECK(evaluate(spec, {0.3}) == 0.0);
  CHECK(evaluate(spec, {0.9}) == 1.0);
  // well boundary is inclusive: half-width is 1/64
  CHECK(evaluate(spec, {0.3 + 1.0 / 64}) == 0.0);
  CHECK(evaluate(spec, {0.3 + 1.0 / 63.9}) == 1.0);
  CHECK(spec.eval_count() == 4);
}

TEST_CASE("golf course in d=2 uses the L-inf well") {
  auto spec = make_golf_course(2, {0.3, 0.7}, 1.0 / 16);
  CHECK(evaluate(spec, {0.3, 0.7}) == 0.0);
  CHECK(evaluate(spec, {0.3 + 1.0 / 32, 0.7}) == 0.0);
  CHECK(evaluate(spec, {0.3 + 1.0 / 32, 0.7 + 1.0 / 31}) == 1.0);
}

TEST_CASE("golf course zero set has measure epsilon^d (Monte Carlo, scan budget)") {
  const double eps = 1.0 / 16;
  auto spec = make_golf_course(2, {0.3, 0.7}, eps);
  std::mt19937_64 eng(12345);
  const std::uint64_t samples = 1000000;
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double x = uniform01(eng), y = uniform01(eng);
    if (evaluate_scan(spec, {x, y}) == 0.0) ++hits;
  }
  const double fraction = double(hits) / double(samples);
  CHECK(std::abs(fraction - eps * eps) < 1e-3);
  CHECK(spec.scan_count() == samples);
  CHECK(spec.eval_count() == 0);  // never charged to the solver budget
}

TEST_CASE("gaussian well: zero at the center, near 1 far away") {
  auto spec = make_gaussian_well(2, {0.5, 0.5}, 0.05);
  CHECK(evaluate(spec, {0.5, 0.5}) == 0.0);
  CHECK(evaluate(spec, {0.95, 0.95}) > 0.999999);
}

TEST_CASE("gaussian well basin width solves 1 - exp(-w^2/2s^2) = delta") {
  // analytic oracle: half-width sigma*sqrt(2 ln 2) for delta = 1/2
  auto spec = make_gaussian_well(1, {0.5}, 0.05, 0.5);
  const double half_width = spec.basin_size()[0] / 2.0;
  CHECK(half_width == doctest::Approx(0.05 * std::sqrt(2.0 * std::log(2.0))).epsilon(1e-12));
  CHECK(half_width == doctest::Approx(0.0588705).epsilon(1e-5));
  // the metadata is self-consistent: f at the basin edge equals delta
  const double at_edge = evaluate(spec, {0.5 + half_width});
  CHECK(at_edge == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("multiwell evaluates the deepest covering well") {
  auto spec = make_multiwell(1, {{0.25}, {0.7}}, {0.0, 0.6});
  CHECK(evaluate(spec, {0.25}) == 0.0);
  CHECK(evaluate(spec, {0.7}) == doctest::Approx(0.6));
  CHECK(evaluate(spec, {0.5}) == 1.0);  // between wells, clipped
}

TEST_CASE("construction preconditions are enforced") {
  CHECK_THROWS_AS(make_golf_course(1, {0.3}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_golf_course(1, {0.3}, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(make_golf_course(1, {0.001}, 1.0 / 32), std::invalid_argument);
  CHECK_THROWS_AS(make_gaussian_well(1, {0.5}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_gaussian_well(1, {0.0}, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(make_multiwell(1, {{0.2}, {0.8}}, {0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_multiwell(1, {{0.2}, {0.8}}, {0.6, 0.8}), std::invalid_argument);
  CHECK_THROWS_AS(make_multiwell(1, {{0.4}, {0.45}}, {0.0, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(make_multiwell(1, {{0.2}, {0.8}}, {0.0, 0.3}), std::invalid_argument);
}

TEST_CASE("evaluate rejects bad points and out-of-range evaluator output") {
  auto spec = make_golf_course(2, {0.3, 0.7}, 1.0 / 16);
  CHECK_THROWS_AS(evaluate(spec, {0.3}), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(spec, {0.3, 1.7}), std::out_of_range);
  ObjectiveSpec bad(1, [](const Point&) { return 1.5; }, 0.5, {0.5});
  CHECK_THROWS_AS(evaluate(bad, {0.5}), std::domain_error);
}

TEST_CASE("eval counter matches the number of calls under interleaving") {
  auto spec = make_gaussian_well(1, {0.5}, 0.1);
  auto copy = spec;  // copies share counters
  for (int i = 0; i < 7; ++i) evaluate(spec, {0.25});
  for (int i = 0; i < 5; ++i) evaluate_scan(spec, {0.25});
  for (int i = 0; i < 3; ++i) evaluate(copy, {0.75});
  CHECK(spec.eval_count() == 10);
  CHECK(spec.scan_count() == 5);
  CHECK(copy.eval_count() == 10);
}

TEST_CASE("counters are exact under concurrent evaluation") {
  auto spec = make_gaussian_well(1, {0.5}, 0.1);
  constexpr int n_threads = 4, per_thread = 2500;
  std::vector<std::thread> workers;
  for (int t = 0; t < n_threads; ++t)
    workers.emplace_back([&spec] {
      for (int i = 0; i < per_thread; ++i) evaluate(spec, {0.3});
    });
  for (auto& w : workers) w.join();
  CHECK(spec.eval_count() == n_threads * per_thread);
}

TEST_CASE("built-in objectives stay inside [0,1] on a million random points") {
  auto golf = make_golf_course(1, {0.3}, 1.0 / 32);
  auto gauss = make_gaussian_well(2, {0.4, 0.6}, 0.05);
  auto multi = make_multiwell(2, {{0.25, 0.25}, {0.75, 0.75}}, {0.0, 0.6});
  std::mt19937_64 eng(99);
  for (int i = 0; i < 1000000; ++i) {
    const double x = uniform01(eng), y = uniform01(eng);
    const double f1 = evaluate_scan(golf, {x});
    const double f2 = evaluate_scan(gauss, {x, y});
    const double f3 = evaluate_scan(multi, {x, y});
    if (!(f1 >= 0 && f1 <= 1 && f2 >= 0 && f2 <= 1 && f3 >= 0 && f3 <= 1)) {
      REQUIRE(false);
    }
  }
  CHECK(true);
}

TEST_CASE("assumption scan passes on a well-formed golf course") {
  auto spec = make_golf_course(1, {0.3}, 1.0 / 32, 0.5);
  const AssumptionReport report = validate_assumptions(spec, 256);
  CHECK(report.unique_min_zero);
  CHECK(report.gap_holds);
  CHECK(report.basin_size_consistent);
  CHECK(report.worst_violation == 0.0);
  CHECK(report.scan_resolution == 256);
  CHECK(spec.eval_count() == 0);  // scan budget only
  CHECK(spec.scan_count() == 256);
}

TEST_CASE("assumption scan flags a second zero well") {
  // hand-built violation: the factory itself refuses two zero depths
  auto two_wells = [](const Point& p) {
    const double d1 = std::abs(p[0] - 0.25), d2 = std::abs(p[0] - 0.75);
    return std::min(1.0, 50.0 * std::min(d1 * d1, d2 * d2));
  };
  ObjectiveSpec spec(1, two_wells, 0.5, {0.2});
  const AssumptionReport report = validate_assumptions(spec, 256);
  CHECK_FALSE(report.unique_min_zero);
  CHECK(report.zero_cluster_count == 2);
  CHECK(report.worst_violation > 0.0);
}

TEST_CASE("assumption scan flags a local minimum below the gap") {
  auto wells = [](const Point& p) {
    const double d1 = std::abs(p[0] - 0.25), d2 = std::abs(p[0] - 0.75);
    return std::min(1.0, std::min(50.0 * d1 * d1, 0.4 + 50.0 * d2 * d2));
  };
  ObjectiveSpec spec(1, wells, 0.5, {0.2});  // claims gap 0.5, actual gap 0.4
  const AssumptionReport report = validate_assumptions(spec, 256);
  CHECK(report.unique_min_zero);
  CHECK_FALSE(report.gap_holds);
}

TEST_CASE("assumption scan flags basin metadata off by a factor of two") {
  auto gauss = make_gaussian_well(1, {0.5}, 0.05, 0.5);
  // same evaluator, deliberately halved basin width in the metadata
  ObjectiveSpec halved(1, [gauss](const Point& p) { return evaluate_scan(gauss, p); }, 0.5,
                       {gauss.basin_size()[0] / 2.0});
  const AssumptionReport report = validate_assumptions(halved, 256);
  CHECK_FALSE(report.basin_size_consistent);
  CHECK(report.unique_min_zero);
  // measured extent of the sublevel set is the true width, not the claim
  CHECK(report.measured_basin[0] ==
        doctest::Approx(gauss.basin_size()[0]).epsilon(0.05));
}

TEST_CASE("assumption scan accepts correct gaussian metadata") {
  auto gauss = make_gaussian_well(1, {0.5}, 0.05, 0.5);
  const AssumptionReport report = validate_assumptions(gauss, 256);
  CHECK(report.unique_min_zero);
  CHECK(report.gap_holds);
  CHECK(report.basin_size_consistent);
}

TEST_CASE("assumption scan passes multiwell with depths {0, 0.6, 0.8}") {
  auto spec = make_multiwell(1, {{0.2}, {0.5}, {0.8}}, {0.0, 0.6, 0.8}, 0.5);
  const AssumptionReport report = validate_assumptions(spec, 256);
  CHECK(report.unique_min_zero);
  CHECK(report.gap_holds);
  CHECK(report.basin_size_consistent);
}
