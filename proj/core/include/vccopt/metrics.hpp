#pragma once

#include <Eigen/Dense>

#include "vccopt/game.hpp"
#include "vccopt/scenario.hpp"

namespace vccopt {

/// Evaluation metrics of one allocation. waiting is the priority-weighted
/// time cost sum_i tau^i * sum_{d,t} (t/T) y^i[d][t]; fairness is the
/// population standard deviation of the per-job time cost normalized by
/// volume.
struct MetricsBundle {
  double carbon_total = 0.0;
  double carbon_per_volume = 0.0;
  double peak_price = 0.0;
  double migration_cost = 0.0;
  double waiting_total = 0.0;
  double fairness = 0.0;
};

/// Validates the allocation against the operational constraints (throws
/// InfeasibleError "InfeasibleAllocation" when any residual exceeds 1e-6 at
/// problem scale) and computes the metric bundle. Deterministic and
/// idempotent: identical inputs give bit-identical outputs.
MetricsBundle compute_metrics(const Scenario& scenario, const DecisionLayout& layout,
                              const Eigen::VectorXd& y, int peak_exponent = 6);

/// The feasibility check used by compute_metrics, exposed for reuse.
void require_feasible_allocation(const Scenario& scenario, const DecisionLayout& layout,
                                 const Eigen::VectorXd& y, const Eigen::VectorXd* x = nullptr);

}  // namespace vccopt
