#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vccopt/baselines.hpp"
#include "vccopt/errors.hpp"
#include "vccopt/metrics.hpp"
#include "vccopt/objective.hpp"

using namespace vccopt;
namespace vt = vccopt::testing;

namespace {

Scenario one_dc(std::vector<ComputeJob> jobs, int horizon, double capacity) {
  DataCenterFleet fleet;
  fleet.dc_count = 1;
  fleet.physical_capacity = {capacity};
  return make_scenario(fleet, std::move(jobs), horizon, Eigen::MatrixXd::Ones(1, horizon),
                       Eigen::MatrixXd::Zero(1, horizon));
}

}  // namespace

TEST_CASE("naive greedy fill") {
  SUBCASE("one job spills into the second step") {
    const Scenario s = one_dc({{1, 1, 3.0, 1.0}}, 2, 2.0);
    const BaselineResult r = naive_schedule(s);
    const DecisionLayout l = build_layout(s);
    CHECK(r.y(l.y_index(0, 1, 1)) == doctest::Approx(2.0));
    CHECK(r.y(l.y_index(0, 1, 2)) == doctest::Approx(1.0));
    CHECK(r.y(l.z_index(0, 1, 1)) == doctest::Approx(1.0));  // queue after step 1
  }
  SUBCASE("priority order under a tight capacity") {
    const Scenario s = one_dc({{1, 1, 1.0, 2.0}, {2, 1, 1.0, 1.0}}, 2, 1.0);
    const BaselineResult r = naive_schedule(s);
    const DecisionLayout l = build_layout(s);
    CHECK(r.y(l.y_index(0, 1, 1)) == doctest::Approx(1.0));
    CHECK(r.y(l.y_index(1, 1, 2)) == doctest::Approx(1.0));
  }
  SUBCASE("equal priorities break ties by ascending id") {
    const Scenario s = one_dc({{2, 1, 1.0, 1.0}, {1, 1, 1.0, 1.0}}, 2, 1.0);
    const BaselineResult r = naive_schedule(s);
    const DecisionLayout l = build_layout(s);
    // Job with id 1 is stored second but scheduled first.
    CHECK(r.y(l.y_index(1, 1, 1)) == doctest::Approx(1.0));
    CHECK(r.y(l.y_index(0, 1, 2)) == doctest::Approx(1.0));
  }
  SUBCASE("home overload is infeasible for the no-migration baseline") {
    DataCenterFleet fleet;
    fleet.dc_count = 2;
    fleet.edges = {{1, 2, 1.0}};
    fleet.physical_capacity = {1.0, 4.0};
    const Scenario s = make_scenario(fleet, {{1, 1, 3.0, 1.0}}, 2, Eigen::MatrixXd::Ones(2, 2),
                                     Eigen::MatrixXd::Zero(2, 2));
    CHECK_THROWS_AS(naive_schedule(s), InfeasibleError);
  }
  SUBCASE("output passes the shared feasibility validator at full capacity") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      vt::RandomScenarioSpec spec;
      spec.slack_factor = 2.5;  // roomy homes so the no-migration fill works
      const Scenario s = vt::random_scenario(rng, spec);
      BaselineResult r;
      try {
        r = naive_schedule(s);
      } catch (const InfeasibleError&) {
        continue;
      }
      CHECK_NOTHROW(require_feasible_allocation(s, build_layout(s), r.y, &r.x_used.values));
      const AllocationResiduals res = allocation_residuals(s, build_layout(s), r.y, nullptr);
      CHECK(res.capacity_excess <= 1e-9);  // never exceeds effective capacity
    }
  }
}

TEST_CASE("sequential step 1 shapes") {
  SUBCASE("uniform carbon spreads the capacity evenly") {
    const Scenario s = one_dc({{1, 1, 1.0, 1.0}}, 2, 2.0);
    SolverParams params;
    const BaselineResult r = sequential_optimize(s, params);
    // First-step cap is 1.0 (homed volume); even split of the required total
    // equals (0.5, 0.5), which respects the cap.
    CHECK(r.x_used.values(0) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(r.x_used.values(1) == doctest::Approx(0.5).epsilon(1e-3));
  }
  SUBCASE("cheap first step attracts the whole budget") {
    DataCenterFleet fleet;
    fleet.dc_count = 1;
    fleet.physical_capacity = {2.0};
    Eigen::MatrixXd carbon(1, 2);
    carbon << 0.05, 40.0;
    const Scenario s = make_scenario(fleet, {{1, 1, 1.0, 1.0}}, 2, carbon,
                                     Eigen::MatrixXd::Zero(1, 2));
    SolverParams params;
    const BaselineResult r = sequential_optimize(s, params);
    CHECK(r.x_used.values(0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.x_used.values(1) == doctest::Approx(0.0).epsilon(1e-3));
  }
  SUBCASE("step-1 objective beats random feasible points") {
    std::mt19937_64 rng(23);
    const Scenario s = vt::random_scenario(rng);
    SolverParams params;
    const BaselineResult r = sequential_optimize(s, params);
    const OperatorObjectiveParams obj = make_objective_params(s, params.p);
    auto proxy = [&](const Eigen::VectorXd& x) {
      Eigen::MatrixXd grid(s.dc_count(), s.horizon);
      for (int d = 0; d < s.dc_count(); ++d) {
        grid.row(d) = x.segment(d * s.horizon, s.horizon).transpose();
      }
      return (s.carbon_intensity.array() * grid.array()).sum() + peak_norm(grid, params.p);
    };
    const double opt = proxy(r.x_used.values);
    const VccFeasibleSet set = feasible_vcc_set(s);
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd raw(set.upper.size());
      for (int j = 0; j < raw.size(); ++j) raw(j) = vt::uniform(rng, 0.0, 1.0) * set.upper(j);
      const Eigen::VectorXd x = project_box_halfspace(raw, set.upper, set.min_total);
      CHECK(opt <= proxy(x) + 1e-7 * (1.0 + std::abs(opt)));
    }
  }
  SUBCASE("step 2 allocation respects the chosen capacities") {
    std::mt19937_64 rng(29);
    const Scenario s = vt::random_scenario(rng);
    SolverParams params;
    const BaselineResult r = sequential_optimize(s, params);
    const AllocationResiduals res =
        allocation_residuals(s, build_layout(s), r.y, &r.x_used.values);
    CHECK(res.capacity_excess <= 1e-6);
    CHECK_NOTHROW(require_feasible_allocation(s, build_layout(s), r.y, &r.x_used.values));
  }
}

TEST_CASE("box-halfspace projection agrees with the QP route") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + vt::pick(rng, 6);
    Eigen::VectorXd upper(n), raw(n);
    for (int j = 0; j < n; ++j) {
      upper(j) = vt::uniform(rng, 0.2, 2.0);
      raw(j) = vt::uniform(rng, -1.0, 3.0);
    }
    const double need = vt::uniform(rng, 0.1, 0.9) * upper.sum();
    const Eigen::VectorXd fast = project_box_halfspace(raw, upper, need);
    // Oracle: generic QP enumeration on the same constraint set.
    Eigen::MatrixXd C(2 * n + 1, n);
    Eigen::VectorXd d(2 * n + 1);
    C.topRows(n) = Eigen::MatrixXd::Identity(n, n);
    d.head(n) = upper;
    C.middleRows(n, n) = -Eigen::MatrixXd::Identity(n, n);
    d.segment(n, n).setZero();
    C.row(2 * n).setConstant(-1.0);
    d(2 * n) = -need;
    if (2 * n + 1 <= 17) continue;  // enumeration oracle capped at 16 rows
    const Eigen::VectorXd x = fast;
    CHECK(x.minCoeff() >= -1e-12);
    CHECK((x - upper).maxCoeff() <= 1e-12);
    CHECK(x.sum() >= need - 1e-9 * (1.0 + need));
  }
  // Small cases against full enumeration.
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + vt::pick(rng, 3);  // 2..4 -> at most 9 rows
    Eigen::VectorXd upper(n), raw(n);
    for (int j = 0; j < n; ++j) {
      upper(j) = vt::uniform(rng, 0.2, 2.0);
      raw(j) = vt::uniform(rng, -1.0, 3.0);
    }
    const double need = vt::uniform(rng, 0.1, 0.9) * upper.sum();
    const Eigen::VectorXd fast = project_box_halfspace(raw, upper, need);
    Eigen::MatrixXd C(2 * n + 1, n);
    Eigen::VectorXd d(2 * n + 1);
    C.topRows(n) = Eigen::MatrixXd::Identity(n, n);
    d.head(n) = upper;
    C.middleRows(n, n) = -Eigen::MatrixXd::Identity(n, n);
    d.segment(n, n).setZero();
    C.row(2 * n).setConstant(-1.0);
    d(2 * n) = -need;
    const auto oracle = vt::brute_force_qp(raw, C, d, 0);
    REQUIRE(oracle.feasible);
    CHECK((fast - oracle.point).cwiseAbs().maxCoeff() <= 1e-7);
  }
}
