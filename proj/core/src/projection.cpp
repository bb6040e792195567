#include "vccopt/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vccopt/errors.hpp"

namespace vccopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Thin QR factorization C_W^T = Q R of the working-set rows, updated as
// rows enter and leave. Q is n x m with orthonormal columns, R is m x m
// upper triangular; column k corresponds to rows[k].
struct WorkingSetQR {
  const Eigen::MatrixXd& C;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  std::vector<int> rows;
  int m = 0;

  WorkingSetQR(const Eigen::MatrixXd& constraints, int n)
      : C(constraints), Q(n, n), R(n, n) {}

  int n() const { return static_cast<int>(Q.rows()); }

  // Projects v onto the orthogonal complement of span(Q), re-orthogonalizing
  // once so components along Q are removed down to machine precision even
  // when ||v|| dwarfs the result. Also accumulates coeffs = Q^T v.
  Eigen::VectorXd deflate(const Eigen::VectorXd& v, Eigen::VectorXd* coeffs) const {
    if (m == 0) {
      if (coeffs) coeffs->resize(0);
      return v;
    }
    const auto Qm = Q.leftCols(m);
    Eigen::VectorXd w1 = Qm.transpose() * v;
    Eigen::VectorXd r = v - Qm * w1;
    Eigen::VectorXd w2 = Qm.transpose() * r;
    r -= Qm * w2;
    if (coeffs) *coeffs = w1 + w2;
    return r;
  }

  bool append(int row, double dep_tol) {
    if (m >= n()) return false;
    const Eigen::VectorXd c = C.row(row).transpose();
    Eigen::VectorXd w;
    Eigen::VectorXd r = deflate(c, &w);
    const double rho = r.norm();
    if (rho <= dep_tol * std::max(1.0, c.norm())) return false;
    Q.col(m) = r / rho;
    if (m > 0) R.col(m).head(m) = w;
    R(m, m) = rho;
    rows.push_back(row);
    ++m;
    return true;
  }

  void remove(int pos) {
    rows.erase(rows.begin() + pos);
    // Shift the trailing columns of R left; this leaves one subdiagonal
    // entry per shifted column, cleared with Givens rotations applied to R
    // (from the left) and to Q (from the right, transposed).
    for (int c = pos; c < m - 1; ++c) R.col(c).head(m) = R.col(c + 1).head(m);
    for (int c = pos; c < m - 1; ++c) {
      const double a = R(c, c);
      const double b = R(c + 1, c);
      const double r = std::hypot(a, b);
      if (r == 0.0) continue;
      const double cs = a / r;
      const double sn = b / r;
      for (int cc = c; cc < m - 1; ++cc) {
        const double x = R(c, cc);
        const double y = R(c + 1, cc);
        R(c, cc) = cs * x + sn * y;
        R(c + 1, cc) = -sn * x + cs * y;
      }
      for (int i = 0; i < n(); ++i) {
        const double x = Q(i, c);
        const double y = Q(i, c + 1);
        Q(i, c) = cs * x + sn * y;
        Q(i, c + 1) = -sn * x + cs * y;
      }
    }
    --m;
  }

  // Exact projection of `target` onto { u : C_W u = d_W } together with the
  // working-set multipliers (C_W^T lam = target - u).
  void solve(const Eigen::VectorXd& target, const Eigen::VectorXd& d_all, Eigen::VectorXd* u,
             Eigen::VectorXd* lam) const {
    if (m == 0) {
      *u = target;
      lam->resize(0);
      return;
    }
    Eigen::VectorXd coeffs;
    Eigen::VectorXd resid = deflate(target, &coeffs);
    Eigen::VectorXd d_w(m);
    for (int k = 0; k < m; ++k) d_w(k) = d_all(rows[static_cast<std::size_t>(k)]);
    const auto Rm = R.topLeftCorner(m, m);
    Eigen::VectorXd w = Rm.transpose().triangularView<Eigen::Lower>().solve(d_w);
    *u = resid + Q.leftCols(m) * w;
    *lam = Rm.triangularView<Eigen::Upper>().solve(coeffs - w);
  }
};

}  // namespace

ProjectionResult project_onto_polyhedron(const Eigen::VectorXd& target,
                                         const Eigen::MatrixXd& constraints,
                                         const Eigen::VectorXd& bounds, int n_equalities,
                                         const ProjectionOptions& opts) {
  const int n = static_cast<int>(target.size());
  const int m_rows = static_cast<int>(constraints.rows());
  if (constraints.cols() != n || bounds.size() != m_rows) {
    throw Error("project_onto_polyhedron: shape mismatch");
  }
  if (n_equalities < 0 || n_equalities > m_rows) {
    throw Error("project_onto_polyhedron: bad equality count");
  }

  ProjectionResult out;
  if (m_rows == 0) {
    out.point = target;
    out.multipliers.resize(0);
    return out;
  }
  if (n == 0) {
    const double scale = 1.0 + bounds.cwiseAbs().maxCoeff();
    for (int j = 0; j < m_rows; ++j) {
      const double resid = -bounds(j);
      const bool bad = j < n_equalities ? std::abs(resid) > opts.feas_tol * scale
                                        : resid > opts.feas_tol * scale;
      if (bad) {
        throw InfeasibleError("projection: empty polyhedron in zero dimensions (row " +
                              std::to_string(j) + ")");
      }
    }
    out.point = target;
    out.multipliers = Eigen::VectorXd::Zero(m_rows);
    return out;
  }

  const double bscale = 1.0 + bounds.cwiseAbs().maxCoeff();
  const double vtol = opts.feas_tol * bscale;
  const int max_iter =
      opts.max_iterations > 0 ? opts.max_iterations : 100 * (m_rows + n) + 10000;

  // Violations cannot be resolved below the roundoff floor of evaluating
  // C u - d; the floor shrinks as the iterate walks in from a large target.
  double max_row_norm = 0.0;
  for (int j = 0; j < m_rows; ++j) {
    max_row_norm = std::max(max_row_norm, constraints.row(j).cwiseAbs().sum());
  }
  const auto viol_floor = [max_row_norm](const Eigen::VectorXd& u) {
    return 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + max_row_norm) *
           (1.0 + u.cwiseAbs().maxCoeff());
  };

  WorkingSetQR ws(constraints, n);
  Eigen::VectorXd u = target;
  Eigen::VectorXd lam;  // aligned with ws.rows
  std::vector<char> in_ws(static_cast<std::size_t>(m_rows), 0);

  auto is_equality = [&](int row) { return row < n_equalities; };

  auto refresh = [&]() { ws.solve(target, bounds, &u, &lam); };

  // Equality rows enter the working set first and never leave. Dependent
  // rows are skipped; consistency is checked after the solve.
  for (int j = 0; j < n_equalities; ++j) {
    if (ws.append(j, opts.dep_tol)) in_ws[static_cast<std::size_t>(j)] = 1;
  }
  refresh();
  for (int j = 0; j < n_equalities; ++j) {
    const double resid = std::abs(constraints.row(j) * u - bounds(j));
    const double tol = vtol + 1e-13 * constraints.row(j).norm() * (u.norm() + target.norm());
    if (resid > std::max(tol, 1e-7 * bscale)) {
      throw InfeasibleError("inconsistent equality constraints (row " + std::to_string(j) +
                            ", residual " + std::to_string(resid) + ")");
    }
  }

  // Warm-start hint: adopt previously active rows, then restore dual
  // feasibility by dropping negative multipliers.
  for (int j : opts.warm_start) {
    if (j < n_equalities || j >= m_rows) continue;
    if (in_ws[static_cast<std::size_t>(j)]) continue;
    if (ws.append(j, 1e-10)) in_ws[static_cast<std::size_t>(j)] = 1;
  }
  refresh();

  int iters = 0;
  auto drop_negative_duals = [&]() {
    for (;;) {
      int worst = -1;
      double worst_val = -1e-11 * (1.0 + (lam.size() ? lam.cwiseAbs().maxCoeff() : 0.0));
      for (int k = 0; k < ws.m; ++k) {
        const int row = ws.rows[static_cast<std::size_t>(k)];
        if (is_equality(row)) continue;
        if (lam(k) < worst_val) {
          worst_val = lam(k);
          worst = k;
        }
      }
      if (worst < 0) break;
      in_ws[static_cast<std::size_t>(ws.rows[static_cast<std::size_t>(worst)])] = 0;
      ws.remove(worst);
      refresh();
      if (++iters > max_iter) throw SolverFailure("projection: iteration budget exhausted");
    }
  };
  drop_negative_duals();

  // Rows certified to hold with equality on the whole polyhedron; they are
  // satisfied automatically and never enter the working set.
  std::vector<char> implied_tight(static_cast<std::size_t>(m_rows), 0);

  Eigen::VectorXd viol(m_rows);
  for (int attempt = 0; attempt < 40; ++attempt) {
    bool clean = true;
    for (;;) {
      if (++iters > max_iter) throw SolverFailure("projection: iteration budget exhausted");
      viol.noalias() = constraints * u - bounds;
      int s = -1;
      double vmax = vtol + viol_floor(u);
      for (int j = n_equalities; j < m_rows; ++j) {
        if (in_ws[static_cast<std::size_t>(j)] || implied_tight[static_cast<std::size_t>(j)]) continue;
        if (viol(j) > vmax) {
          vmax = viol(j);
          s = j;
        }
      }
      if (s < 0) break;

      // Drive constraint s to the boundary, dropping blocking rows as their
      // multipliers hit zero.
      const Eigen::VectorXd c_s = constraints.row(s).transpose();
      double lam_s = 0.0;
      int zero_steps = 0;
      for (;;) {
        if (++iters > max_iter) throw SolverFailure("projection: iteration budget exhausted");
        Eigen::VectorXd coeffs;
        Eigen::VectorXd z = ws.deflate(c_s, &coeffs);
        const double znorm2 = z.squaredNorm();
        const bool dependent = z.norm() <= opts.dep_tol * std::max(1.0, c_s.norm());
        Eigen::VectorXd r;
        if (ws.m > 0) {
          r = ws.R.topLeftCorner(ws.m, ws.m).triangularView<Eigen::Upper>().solve(coeffs);
        }

        double t1 = kInf;
        int blocking = -1;
        for (int k = 0; k < ws.m; ++k) {
          if (is_equality(ws.rows[static_cast<std::size_t>(k)])) continue;
          if (r(k) > 1e-13) {
            const double cand = lam(k) / r(k);
            if (cand < t1) {
              t1 = cand;
              blocking = k;
            }
          }
        }

        double t2 = kInf;
        if (!dependent) {
          const double gap = c_s.dot(u) - bounds(s);
          if (gap <= 0.0) {
            refresh();  // restore (u, lam) consistency before abandoning s
            break;
          }
          t2 = gap / znorm2;
        } else if (blocking < 0) {
          // Farkas bound: every feasible point has c_s^T y >= sum_k r_k d_k.
          double implied = 0.0;
          for (int k = 0; k < ws.m; ++k) implied += r(k) * bounds(ws.rows[static_cast<std::size_t>(k)]);
          if (implied - bounds(s) <= 10.0 * (vtol + viol_floor(u))) {
            implied_tight[static_cast<std::size_t>(s)] = 1;  // equality on the whole set
            refresh();
            break;
          }
          throw InfeasibleError(
              "projection: certified empty polyhedron (constraint " + std::to_string(s) +
              " is implied violated by " + std::to_string(implied - bounds(s)) + ")");
        }

        const double t = std::min(t1, t2);
        if (t == kInf) {
          throw InfeasibleError("projection: certified empty polyhedron (unbounded dual)");
        }
        if (t <= 0.0) {
          if (++zero_steps > ws.m + 8) {
            throw SolverFailure("projection: stalled on degenerate working set");
          }
        } else {
          zero_steps = 0;
        }
        if (!dependent && t > 0.0) u -= t * z;
        for (int k = 0; k < ws.m; ++k) lam(k) -= t * r(k);
        lam_s += t;

        if (t2 <= t1) {
          if (!ws.append(s, opts.dep_tol)) {
            throw SolverFailure("projection: failed to extend working set");
          }
          in_ws[static_cast<std::size_t>(s)] = 1;
          Eigen::VectorXd lam2(ws.m);
          lam2.head(ws.m - 1) = lam;
          lam2(ws.m - 1) = lam_s;
          lam = std::move(lam2);
          break;
        }
        in_ws[static_cast<std::size_t>(ws.rows[static_cast<std::size_t>(blocking)])] = 0;
        ws.remove(blocking);
        Eigen::VectorXd lam2(ws.m);
        for (int k = 0, kk = 0; k < ws.m + 1; ++k) {
          if (k == blocking) continue;
          lam2(kk++) = lam(k);
        }
        lam = std::move(lam2);
      }
    }

    // Re-derive the point and multipliers exactly from the final working set
    // and confirm the KKT system before returning.
    refresh();
    drop_negative_duals();
    viol.noalias() = constraints * u - bounds;
    const double final_tol = vtol + viol_floor(u);
    for (int j = n_equalities; j < m_rows; ++j) {
      if (in_ws[static_cast<std::size_t>(j)]) continue;
      const double allowed = implied_tight[static_cast<std::size_t>(j)] ? 10.0 * final_tol : final_tol;
      if (viol(j) > allowed) {
        clean = false;
        break;
      }
    }
    if (clean) {
      out.point = std::move(u);
      out.multipliers = Eigen::VectorXd::Zero(m_rows);
      for (int k = 0; k < ws.m; ++k) {
        double v = lam(k);
        if (!is_equality(ws.rows[static_cast<std::size_t>(k)])) v = std::max(v, 0.0);
        out.multipliers(ws.rows[static_cast<std::size_t>(k)]) = v;
      }
      out.working_set = ws.rows;
      out.iterations = iters;
      return out;
    }
  }
  throw SolverFailure("projection: could not reach a verified KKT point");
}

}  // namespace vccopt
