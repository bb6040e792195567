#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "vccopt/scenario.hpp"

namespace vccopt {

/// Default weight of the quadratic anchoring term in the team objectives.
inline constexpr double kDefaultEpsilon = 2e-8;

/// Index bookkeeping for the stacked decision vector. Each job owns a block
/// of D*T allocation coordinates y[d][t] followed by D*(T-1) migration
/// coordinates z[d][t] (there is one fewer migration step than time steps;
/// the z coordinate at the job's home DC is its queue). `job` is 0-based,
/// `d` and `t` are 1-based.
struct DecisionLayout {
  int jobs = 0;     // I
  int dcs = 0;      // D
  int horizon = 0;  // T

  int y_per_job() const { return dcs * horizon; }
  int z_per_job() const { return dcs * (horizon - 1); }
  int per_job() const { return dcs * (2 * horizon - 1); }
  int n_y() const { return jobs * per_job(); }
  int n_x() const { return dcs * horizon; }

  int y_index(int job, DcId d, int t) const {
    return job * per_job() + (d - 1) * horizon + (t - 1);
  }
  int z_index(int job, DcId d, int t) const {
    return job * per_job() + y_per_job() + (d - 1) * (horizon - 1) + (t - 1);
  }
  int x_index(DcId d, int t) const { return (d - 1) * horizon + (t - 1); }
};

DecisionLayout build_layout(const Scenario& scenario);

/// The assembled lower-level game in stacked form,
///   equalities  A y = b
///   inequalities G y <= h + H x
///   linear cost  q
/// together with the variable-elimination data: an orthonormal nullspace
/// basis F_T of A, the minimum-norm particular solution y_dagger (which
/// doubles as the anchoring profile), and the reduced constraint data
/// G_tilde = G F_T, h_tilde = h - G y_dagger.
struct GameMatrices {
  DecisionLayout layout;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Eigen::MatrixXd H;
  Eigen::VectorXd q;
  Eigen::MatrixXd F_T;
  Eigen::VectorXd y_dagger;
  Eigen::MatrixXd G_tilde;
  Eigen::VectorXd h_tilde;
  double epsilon = kDefaultEpsilon;
  int dropped_equality_rows = 0;

  int n_reduced() const { return static_cast<int>(F_T.cols()); }
};

/// Equality rows for one job or for all jobs. Per job the rows are, in
/// order: total volume; first-step pins y[d][1] = 0 for foreign DCs (data
/// starts at the home DC); arrival rows y[d][t+1] = z[d][t] for foreign DCs;
/// queue rows balancing the unprocessed remainder at the home DC.
void assemble_equalities(const Scenario& scenario, const DecisionLayout& layout,
                         Eigen::MatrixXd* A, Eigen::VectorXd* b);

/// Inequality rows: nonnegativity of every coordinate (H rows zero), then
/// one aggregate capacity row per (d, t) with h = 0 and H carrying a single
/// 1 in the column of x[d][t].
void assemble_inequalities(const Scenario& scenario, const DecisionLayout& layout,
                           Eigen::MatrixXd* G, Eigen::VectorXd* h, Eigen::MatrixXd* H);

/// Linear cost q: allocation coordinates pay priority * t/T, migration
/// coordinates pay priority times the frozen path price (zero for the home
/// queue).
Eigen::VectorXd assemble_cost(const Scenario& scenario, const DecisionLayout& layout);

struct Elimination {
  Eigen::MatrixXd F_T;
  Eigen::VectorXd y_dagger;
  Eigen::MatrixXd G_tilde;
  Eigen::VectorXd h_tilde;
  int dropped_rows = 0;
};

/// Variable elimination for a general equality system (rank-revealing;
/// dependent rows dropped, inconsistent systems throw InfeasibleError).
Elimination eliminate(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                      const Eigen::MatrixXd& G, const Eigen::VectorXd& h);

/// Assembles everything for a scenario. The elimination is performed per
/// job block (the equalities never couple jobs), which yields the same
/// invariants as a monolithic factorization at a fraction of the cost.
GameMatrices assemble_game(const Scenario& scenario, double epsilon = kDefaultEpsilon);

enum class QpStatus { unsolved, solved, infeasible };

/// The unique variational equilibrium for a given capacity vector x, in both
/// reduced and stacked coordinates, with multipliers for the rows of
/// G_tilde. Multipliers are scaled so that stationarity reads
///   epsilon * y_tilde + F_T^T q + G_tilde^T lambda = 0.
struct EquilibriumResult {
  Eigen::VectorXd y_star;
  Eigen::VectorXd y_tilde_star;
  Eigen::VectorXd lambda;
  std::vector<int> active_set;
  QpStatus qp_status = QpStatus::unsolved;
  double objective_value = 0.0;  // potential: q^T y + eps/2 ||y - y_dagger||^2
  int qp_iterations = 0;
};

struct SolveOptions {
  double lambda_tol = 1e-7;
  /// Active set of a previous solve; a speed hint only.
  const EquilibriumResult* warm_start = nullptr;
};

/// Solves the reduced equilibrium program
///   min ||F_T y_tilde + q/epsilon||^2  s.t.  G_tilde y_tilde <= h_tilde + H x
/// and lifts the minimizer back to the stacked space. Throws InfeasibleError
/// when x makes the constraint set empty and SolverFailure on iteration
/// exhaustion. Reentrant; concurrent solves on the same matrices are fine.
EquilibriumResult solve_game(const GameMatrices& matrices, const Eigen::VectorXd& x,
                             const SolveOptions& opts = {});

/// Worst-case residuals of an allocation against the operational
/// constraints; used by the baselines, the metrics validator and tests.
struct AllocationResiduals {
  double volume_rel = 0.0;     // max_i |sum y^i - v^i| / v^i
  double arrival_abs = 0.0;    // max |y[d][t+1] - z[d][t]| over foreign d
  double first_step_abs = 0.0; // max |y[d][1]| over foreign d
  double queue_rel = 0.0;      // max_i queue-balance residual / v^i
  double nonneg = 0.0;         // max(0, -min coordinate)
  double capacity_excess = 0.0;// max over (d,t) of load - bound, vs effective capacity or x
};

AllocationResiduals allocation_residuals(const Scenario& scenario, const DecisionLayout& layout,
                                         const Eigen::VectorXd& y,
                                         const Eigen::VectorXd* x = nullptr);

/// Per-DC-per-step loads L[d][t] = sum_i y^i[d][t].
Eigen::MatrixXd aggregate_loads(const DecisionLayout& layout, const Eigen::VectorXd& y);

/// Text dump of the assembled matrices and optionally a solution, one
/// "matrix NAME rows cols" / "vector NAME size" header per object followed
/// by 1-based coordinate triplets (entries with value 0 are omitted).
void dump_game_matrices(const GameMatrices& matrices, std::ostream& os,
                        const EquilibriumResult* solution = nullptr);

}  // namespace vccopt
