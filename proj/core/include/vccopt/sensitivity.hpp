#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vccopt/game.hpp"

namespace vccopt {

/// Jacobian of the equilibrium map with respect to the capacity vector x,
/// obtained by differentiating the KKT system of the reduced program on the
/// active rows a:
///     epsilon * dy_tilde + G_tilde_a^T dlambda_a = 0
///     G_tilde_a dy_tilde - H_a dx = 0
/// which resolves to the minimum-norm solution of the second block. Columns
/// of x that appear in no active row are exactly zero. `degenerate` is set
/// when weakly active rows (near-zero slack and near-zero multiplier) were
/// excluded, or when the active rows are rank deficient and the least-squares
/// fallback was used.
struct SensitivityResult {
  Eigen::MatrixXd jacobian_reduced;  // n_reduced x n_x
  Eigen::MatrixXd jacobian_full;     // n_y x n_x, = F_T * jacobian_reduced
  std::vector<int> active_rows;
  bool degenerate = false;
};

struct SensitivityOptions {
  double lambda_tol = 1e-7;  // relative multiplier threshold for activity
  double slack_tol = 1e-7;   // relative slack threshold for weak-activity screening
};

/// Requires eq.qp_status == solved (throws NotSolvedError otherwise). One
/// factorization of the active rows is reused for all n_x directions. Pure
/// function of its arguments.
SensitivityResult compute_sensitivity(const GameMatrices& matrices, const EquilibriumResult& eq,
                                      const Eigen::VectorXd& x,
                                      const SensitivityOptions& opts = {});

/// Central finite differences of the equilibrium map, column by column:
///   (y*(x + h e_j) - y*(x - h e_j)) / (2h).
/// Propagates InfeasibleError when a probe point leaves the feasible range.
/// Intended as a test oracle; it never calls compute_sensitivity.
Eigen::MatrixXd finite_difference_jacobian(const GameMatrices& matrices, const Eigen::VectorXd& x,
                                           double h);

}  // namespace vccopt
