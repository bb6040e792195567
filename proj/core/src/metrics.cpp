#include "vccopt/metrics.hpp"

#include <cmath>

#include "vccopt/errors.hpp"
#include "vccopt/objective.hpp"

namespace vccopt {

void require_feasible_allocation(const Scenario& s, const DecisionLayout& l,
                                 const Eigen::VectorXd& y, const Eigen::VectorXd* x) {
  const AllocationResiduals r = allocation_residuals(s, l, y, x);
  const double vol_scale = 1.0 + s.total_volume();
  const double cap_scale = 1.0 + s.effective_capacity.maxCoeff();
  if (r.volume_rel > 1e-6 || r.queue_rel > 1e-6 || r.nonneg > 1e-6 * vol_scale ||
      r.arrival_abs > 1e-6 * vol_scale || r.first_step_abs > 1e-6 * vol_scale ||
      r.capacity_excess > 1e-6 * cap_scale) {
    throw InfeasibleError(
        "InfeasibleAllocation: residuals exceed tolerance (volume " + std::to_string(r.volume_rel) +
        ", queue " + std::to_string(r.queue_rel) + ", nonneg " + std::to_string(r.nonneg) +
        ", arrival " + std::to_string(r.arrival_abs) + ", capacity " +
        std::to_string(r.capacity_excess) + ")");
  }
}

MetricsBundle compute_metrics(const Scenario& s, const DecisionLayout& l, const Eigen::VectorXd& y,
                              int peak_exponent) {
  require_feasible_allocation(s, l, y);

  MetricsBundle m;
  const Eigen::MatrixXd loads = aggregate_loads(l, y);
  m.carbon_total = (s.carbon_intensity.array() * loads.array()).sum();
  const double total_volume = s.total_volume();
  m.carbon_per_volume = total_volume > 0.0 ? m.carbon_total / total_volume : 0.0;
  m.peak_price = peak_norm(loads, peak_exponent);
  m.migration_cost = migration_cost(s, l, y);

  const int n = l.jobs;
  Eigen::VectorXd normalized(n);
  for (int i = 0; i < n; ++i) {
    const ComputeJob& cj = s.jobs[static_cast<std::size_t>(i)];
    double time_cost = 0.0;
    for (int d = 1; d <= l.dcs; ++d) {
      for (int t = 1; t <= l.horizon; ++t) {
        time_cost += cj.priority * (static_cast<double>(t) / l.horizon) * y(l.y_index(i, d, t));
      }
    }
    m.waiting_total += time_cost;
    normalized(i) = time_cost / cj.volume;
  }
  if (n > 0) {
    const double mean = normalized.mean();
    m.fairness = std::sqrt((normalized.array() - mean).square().sum() / n);
  }
  return m;
}

}  // namespace vccopt
