#include "vccopt/sensitivity.hpp"

#include <Eigen/QR>

#include "vccopt/errors.hpp"

namespace vccopt {

SensitivityResult compute_sensitivity(const GameMatrices& m, const EquilibriumResult& eq,
                                      const Eigen::VectorXd& x, const SensitivityOptions& opts) {
  if (eq.qp_status != QpStatus::solved) {
    throw NotSolvedError("compute_sensitivity: equilibrium is not solved");
  }
  const int n_red = m.n_reduced();
  const int n_x = m.layout.n_x();

  SensitivityResult out;
  out.active_rows = eq.active_set;
  out.jacobian_reduced = Eigen::MatrixXd::Zero(n_red, n_x);

  // Weak-activity screen: rows that sit on the boundary with a vanishing
  // multiplier are treated as inactive but flagged, since the one-sided
  // derivative may differ there.
  if (n_red > 0 && eq.lambda.size() > 0) {
    const Eigen::VectorXd slack = m.h_tilde + m.H * x - m.G_tilde * eq.y_tilde_star;
    const double sscale = 1.0 + m.h_tilde.cwiseAbs().maxCoeff();
    const double lscale = 1.0 + eq.lambda.cwiseAbs().maxCoeff();
    std::vector<char> is_active(static_cast<std::size_t>(eq.lambda.size()), 0);
    for (int r : eq.active_set) is_active[static_cast<std::size_t>(r)] = 1;
    for (int r = 0; r < eq.lambda.size(); ++r) {
      if (is_active[static_cast<std::size_t>(r)]) continue;
      if (std::abs(slack(r)) <= opts.slack_tol * sscale &&
          eq.lambda(r) <= opts.lambda_tol * lscale) {
        out.degenerate = true;
        break;
      }
    }
  }

  const int n_a = static_cast<int>(out.active_rows.size());
  if (n_a > 0 && n_red > 0) {
    Eigen::MatrixXd Ga(n_a, n_red);
    Eigen::MatrixXd Ha(n_a, n_x);
    for (int k = 0; k < n_a; ++k) {
      Ga.row(k) = m.G_tilde.row(out.active_rows[static_cast<std::size_t>(k)]);
      Ha.row(k) = m.H.row(out.active_rows[static_cast<std::size_t>(k)]);
    }
    // Full-row-rank fast path: the minimum-norm solution of Ga dy = Ha dx is
    // Ga^T (Ga Ga^T)^{-1} Ha. Falls back to a rank-revealing decomposition
    // when the Gram matrix is not safely positive definite or the residual
    // check fails.
    bool solved = false;
    if (n_a <= n_red) {
      const Eigen::MatrixXd gram = Ga * Ga.transpose();
      const Eigen::LLT<Eigen::MatrixXd> llt(gram);
      if (llt.info() == Eigen::Success) {
        const double dmax = llt.matrixLLT().diagonal().maxCoeff();
        const double dmin = llt.matrixLLT().diagonal().minCoeff();
        if (dmin > 1e-7 * dmax) {
          out.jacobian_reduced = Ga.transpose() * llt.solve(Ha);
          const double resid = (Ga * out.jacobian_reduced - Ha).cwiseAbs().maxCoeff();
          solved = resid <= 1e-9 * (1.0 + Ha.cwiseAbs().maxCoeff());
        }
      }
    }
    if (!solved) {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Ga);
      if (cod.rank() < n_a) out.degenerate = true;
      out.jacobian_reduced = cod.solve(Ha);  // minimum-norm (least squares if degenerate)
    }
  }
  out.jacobian_full = m.F_T * out.jacobian_reduced;
  return out;
}

Eigen::MatrixXd finite_difference_jacobian(const GameMatrices& m, const Eigen::VectorXd& x,
                                           double h) {
  const int n_x = m.layout.n_x();
  Eigen::MatrixXd jac(m.layout.n_y(), n_x);
  EquilibriumResult base = solve_game(m, x);
  SolveOptions opts;
  opts.warm_start = &base;
  for (int j = 0; j < n_x; ++j) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp(j) += h;
    xm(j) -= h;
    const EquilibriumResult yp = solve_game(m, xp, opts);
    const EquilibriumResult ym = solve_game(m, xm, opts);
    jac.col(j) = (yp.y_star - ym.y_star) / (2.0 * h);
  }
  return jac;
}

}  // namespace vccopt
