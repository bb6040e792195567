#pragma once

#include <Eigen/Dense>
#include <vector>

namespace vccopt {

struct ProjectionOptions {
  /// Feasibility tolerance, relative to 1 + the infinity norm of the bounds.
  double feas_tol = 1e-9;
  /// A candidate row is treated as linearly dependent on the working set
  /// when its residual after orthogonalization falls below dep_tol times its
  /// norm.
  double dep_tol = 1e-12;
  /// 0 means choose automatically from the problem size.
  int max_iterations = 0;
  /// Inequality row indices used to seed the working set. Purely a speed
  /// hint: the result does not depend on it.
  std::vector<int> warm_start;
};

struct ProjectionResult {
  Eigen::VectorXd point;        // argmin 0.5*||u - target||^2 over the polyhedron
  Eigen::VectorXd multipliers;  // one per constraint row; >= 0 on inequality rows
  std::vector<int> working_set; // rows active at the solution, in insertion order
  int iterations = 0;
};

/// Projects `target` onto { u : C u (=|<=) d }. The first `n_equalities`
/// rows of `constraints` are equalities, the rest are <= inequalities.
///
/// Dual active-set method: starting from the unconstrained minimizer, the
/// most violated constraint is driven to feasibility while dual feasibility
/// is maintained, using an incrementally updated QR factorization of the
/// working-set rows. Large `target` vectors are handled by doubly
/// re-orthogonalized residual computations, so the returned point is
/// accurate at the scale of the solution, not of the target.
///
/// Throws InfeasibleError when the polyhedron is certified empty and
/// SolverFailure when the iteration budget is exhausted.
ProjectionResult project_onto_polyhedron(const Eigen::VectorXd& target,
                                         const Eigen::MatrixXd& constraints,
                                         const Eigen::VectorXd& bounds, int n_equalities = 0,
                                         const ProjectionOptions& opts = {});

}  // namespace vccopt
