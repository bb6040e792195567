#include "vccopt/nullspace.hpp"

#include <Eigen/SVD>

#include "vccopt/errors.hpp"

namespace vccopt {

NullspaceFactorization eliminate_equalities(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                            double rank_tol_factor) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (b.size() != m) throw Error("eliminate_equalities: shape mismatch");

  NullspaceFactorization out;
  if (m == 0) {
    out.basis = Eigen::MatrixXd::Identity(n, n);
    out.particular = Eigen::VectorXd::Zero(n);
    return out;
  }

  // JacobiSVD rather than BDCSVD: the equality blocks carry many repeated
  // singular values, which Eigen 3.4's divide-and-conquer deflation handles
  // inaccurately (factorization residuals near 1e-5).
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double tol = rank_tol_factor * smax;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++rank;
  }

  out.rank = rank;
  out.dropped_rows = static_cast<int>(m) - rank;
  out.basis = svd.matrixV().rightCols(n - rank);

  if (rank == 0) {
    out.particular = Eigen::VectorXd::Zero(n);
  } else {
    const Eigen::VectorXd ub = svd.matrixU().leftCols(rank).transpose() * b;
    out.particular =
        svd.matrixV().leftCols(rank) * (ub.array() / sv.head(rank).array()).matrix();
  }

  const double resid = (A * out.particular - b).norm();
  if (resid > 1e-8 * (1.0 + b.norm())) {
    throw InfeasibleError("InfeasibleEqualities: A y = b is inconsistent (residual " +
                          std::to_string(resid) + ")");
  }
  return out;
}

}  // namespace vccopt
