#pragma once

#include <Eigen/Dense>

#include "vccopt/game.hpp"
#include "vccopt/scenario.hpp"

namespace vccopt {

/// Weights of the operator objective
///   phi = phi_carbon + phi_peak + xi * phi_migration + uniform_weight * 0.5 * 1^T x.
struct OperatorObjectiveParams {
  Eigen::MatrixXd rho;        // D x T carbon intensity
  int p = 6;                  // even integer >= 2, peak-norm exponent
  double xi = 0.0;            // migration weight
  double uniform_weight = 1.0;
};

OperatorObjectiveParams make_objective_params(const Scenario& scenario, int p = 6, double xi = 0.0,
                                              double uniform_weight = 1.0);

/// sum_d (sum_t max(L,0)^p)^(1/p), evaluated with per-DC scaling so large
/// loads do not overflow.
double peak_norm(const Eigen::MatrixXd& loads, int p);

/// Gradient of peak_norm with respect to each load entry; defined as 0 at
/// all-zero DCs (the one-sided limit).
Eigen::MatrixXd peak_norm_gradient(const Eigen::MatrixXd& loads, int p);

/// Priority-weighted migration cost sum_i sum_t sum_d z^i[d][t] * tau^i *
/// price(home^i -> d). The home queue contributes nothing (price 0).
double migration_cost(const Scenario& scenario, const DecisionLayout& layout,
                      const Eigen::VectorXd& y);

/// Value and both partial gradients of the operator objective. Only the
/// uniform term depends on x directly, so grad_x is constant; grad_y stacks
/// the carbon, peak and migration derivatives on the matching coordinates.
struct PhiEval {
  double value = 0.0;
  double carbon = 0.0;
  double peak = 0.0;
  double migration = 0.0;  // unweighted; value includes xi * migration
  double uniform = 0.0;
  Eigen::VectorXd grad_x;
  Eigen::VectorXd grad_y;
};

PhiEval phi(const Scenario& scenario, const DecisionLayout& layout, const Eigen::VectorXd& x,
            const Eigen::VectorXd& y, const OperatorObjectiveParams& params);

}  // namespace vccopt
