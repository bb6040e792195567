#pragma once

#include <Eigen/Dense>
#include <string>

#include "vccopt/bilevel.hpp"
#include "vccopt/metrics.hpp"
#include "vccopt/scenario.hpp"

namespace vccopt {

struct BaselineResult {
  std::string label;  // "naive" | "sequential"
  VccVector x_used;
  Eigen::VectorXd y;  // stacked allocation, same layout as the game
  MetricsBundle metrics;
};

/// Priority-ordered greedy fill at full effective capacity: jobs sorted by
/// descending priority (ties by ascending id) fill the earliest steps at
/// their home DC; no migration, overflow queues to later steps. Throws
/// InfeasibleError when a job cannot be absorbed at home over the horizon.
BaselineResult naive_schedule(const Scenario& scenario);

/// Scheduler-agnostic two-step scheme: first choose capacities minimizing
///   sum_{d,t} rho[d][t] x[d][t] + sum_d (sum_t x[d][t]^p)^(1/p)
/// over the feasible capacity set (treating the capacities themselves as
/// worst-case loads, with no migration term), then let the teams allocate
/// under the fixed result.
BaselineResult sequential_optimize(const Scenario& scenario, const SolverParams& params);

/// Exact Euclidean projection onto { 0 <= x <= upper, sum(x) >= min_total }
/// via the scalar dual: x(mu) = clamp(x_raw + mu, 0, upper) with mu the
/// smallest nonnegative root of sum(x(mu)) = min_total. Used by the
/// sequential baseline's inner loop and as an independent cross-check of the
/// QP-based projection.
Eigen::VectorXd project_box_halfspace(const Eigen::VectorXd& x_raw, const Eigen::VectorXd& upper,
                                      double min_total);

}  // namespace vccopt
