#pragma once

#include <Eigen/Dense>

namespace vccopt {

/// Orthonormal nullspace basis and minimum-norm particular solution of an
/// equality system A y = b. Redundant (linearly dependent) rows are dropped
/// by a rank-revealing decomposition; an inconsistent system throws
/// InfeasibleError ("InfeasibleEqualities").
struct NullspaceFactorization {
  Eigen::MatrixXd basis;       // n x (n - rank), columns orthonormal, A * basis = 0
  Eigen::VectorXd particular;  // minimum-norm solution of A y = b
  int rank = 0;
  int dropped_rows = 0;        // rows(A) - rank
};

/// Rank tolerance is rank_tol_factor times the largest singular value.
NullspaceFactorization eliminate_equalities(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                            double rank_tol_factor = 1e-10);

}  // namespace vccopt
