#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "vccopt/errors.hpp"
#include "vccopt/game.hpp"
#include "vccopt/objective.hpp"
#include "vccopt/scenario.hpp"
#include "vccopt/sensitivity.hpp"

namespace vccopt {

/// A virtual capacity curve: one nonnegative bound per (DC, step), flattened
/// in x_index order.
struct VccVector {
  int dcs = 0;
  int horizon = 0;
  Eigen::VectorXd values;  // length dcs * horizon

  double at(DcId d, int t) const { return values((d - 1) * horizon + (t - 1)); }
};

/// The operator's feasible set: box [0, upper] intersected with the
/// demand-coverage halfspace sum(x) >= min_total. The upper bound folds in
/// both the effective capacities and the first-step caps (the capacity
/// offered at step 1 may not exceed the volume homed at that DC, since
/// nothing can have migrated yet).
struct VccFeasibleSet {
  Eigen::VectorXd upper;
  double min_total = 0.0;
};

VccFeasibleSet feasible_vcc_set(const Scenario& scenario);

/// Euclidean projection onto the feasible set, solved as a small QP.
/// Idempotent. Throws InfeasibleError ("EmptyX") when even the full upper
/// bound cannot cover the demand.
VccVector project_onto_vcc_set(const Eigen::VectorXd& x_raw, const Scenario& scenario);

/// Chain-rule assembly of the reduced gradient:
///   grad = grad_x + sensitivity^T grad_y.
Eigen::VectorXd hypergradient(const Eigen::VectorXd& grad_x, const Eigen::VectorXd& grad_y,
                              const Eigen::MatrixXd& sensitivity_full);

enum class StepMode { diminishing, constant };

/// Solver configuration; every field has the documented default and can be
/// overridden from a params file.
struct SolverParams {
  double alpha0 = 0.0;  // 0 means auto: 0.1 * max(upper) / (1 + ||grad^0||_inf)
  double decay = 0.51;
  StepMode step_mode = StepMode::diminishing;
  int k_max = 500;
  double tol_x = 1e-5;
  double lambda_tol = 1e-7;
  int p = 6;
  double xi = 0.0;
  double uniform_weight = 1.0;
  double epsilon = kDefaultEpsilon;
};

struct TraceRecord {
  int k = 0;
  Eigen::VectorXd x;
  double phi_e = 0.0;
  double grad_norm = 0.0;  // infinity norm of the projected-step gradient
  double alpha = 0.0;
  double step_norm = 0.0;  // ||x^{k+1} - x^k||_inf
  int qp_iterations = 0;
  double wall_time_s = 0.0;
};

struct SolverTrace {
  std::vector<TraceRecord> records;
  std::string final_status;  // "converged" | "max_iterations"
};

struct BilevelResult {
  VccVector x;
  EquilibriumResult equilibrium;
  SolverTrace trace;
  double phi_e = 0.0;
};

/// Projected hypergradient descent on phi_e(x) = phi(x, y*(x)):
/// each iteration takes a projected gradient step using the current
/// equilibrium and sensitivity, re-solves the equilibrium at the new
/// capacities and refreshes the sensitivity. Stops when the iterate stalls
/// (||x^{k+1} - x^k||_inf <= tol_x * (1 + ||x^k||_inf)) or after k_max
/// iterations, and returns the best iterate seen. k_max = 0 returns the
/// initial point and its equilibrium.
BilevelResult run_bilevel(const Scenario& scenario, const SolverParams& params);

/// Raised when phi_e turns non-finite; carries the partial trace.
class NonFiniteObjective : public SolverFailure {
 public:
  NonFiniteObjective(const std::string& what, SolverTrace trace)
      : SolverFailure(what), trace_(std::move(trace)) {}
  const SolverTrace& trace() const { return trace_; }

 private:
  SolverTrace trace_;
};

}  // namespace vccopt
