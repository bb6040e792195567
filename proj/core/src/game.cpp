#include "vccopt/game.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "vccopt/errors.hpp"
#include "vccopt/io.hpp"
#include "vccopt/nullspace.hpp"
#include "vccopt/projection.hpp"

namespace vccopt {

DecisionLayout build_layout(const Scenario& scenario) {
  DecisionLayout layout;
  layout.jobs = scenario.job_count();
  layout.dcs = scenario.dc_count();
  layout.horizon = scenario.horizon;
  return layout;
}

namespace {

int equality_rows_per_job(const DecisionLayout& l) {
  const int d = l.dcs;
  const int t = l.horizon;
  return 1 + (d - 1) + (d - 1) * (t - 1) + (t - 1);
}

// Equality block of one job over its own per_job() columns. Row order:
// total volume, first-step pins, arrival rows (d-major), queue rows. The
// coefficient pattern depends only on the home DC; the right-hand side is
// linear in the volume.
void home_equalities(const DecisionLayout& l, int home, double volume, Eigen::MatrixXd* A,
                     Eigen::VectorXd* b) {
  const int d = l.dcs;
  const int t = l.horizon;
  const int rows = equality_rows_per_job(l);
  A->setZero(rows, l.per_job());
  b->setZero(rows);

  auto yl = [&](int dc, int tt) { return (dc - 1) * t + (tt - 1); };
  auto zl = [&](int dc, int tt) { return d * t + (dc - 1) * (t - 1) + (tt - 1); };

  int r = 0;
  for (int dc = 1; dc <= d; ++dc) {
    for (int tt = 1; tt <= t; ++tt) (*A)(r, yl(dc, tt)) = 1.0;
  }
  (*b)(r) = volume;
  ++r;

  for (int dc = 1; dc <= d; ++dc) {
    if (dc == home) continue;
    (*A)(r, yl(dc, 1)) = 1.0;
    ++r;
  }

  for (int dc = 1; dc <= d; ++dc) {
    if (dc == home) continue;
    for (int tt = 1; tt <= t - 1; ++tt) {
      (*A)(r, yl(dc, tt + 1)) = 1.0;
      (*A)(r, zl(dc, tt)) = -1.0;
      ++r;
    }
  }

  for (int tt = 1; tt <= t - 1; ++tt) {
    for (int l2 = 1; l2 <= tt; ++l2) {
      (*A)(r, yl(home, l2)) = 1.0;
      for (int dc = 1; dc <= d; ++dc) {
        if (dc == home) continue;
        (*A)(r, zl(dc, l2)) = 1.0;
      }
    }
    (*A)(r, zl(home, tt)) = 1.0;
    (*b)(r) = volume;
    ++r;
  }
}

}  // namespace

void assemble_equalities(const Scenario& s, const DecisionLayout& l, Eigen::MatrixXd* A,
                         Eigen::VectorXd* b) {
  const int rows_per_job = equality_rows_per_job(l);
  A->setZero(l.jobs * rows_per_job, l.n_y());
  b->setZero(l.jobs * rows_per_job);
  Eigen::MatrixXd Ai;
  Eigen::VectorXd bi;
  for (int i = 0; i < l.jobs; ++i) {
    const ComputeJob& cj = s.jobs[static_cast<std::size_t>(i)];
    home_equalities(l, cj.home_dc, cj.volume, &Ai, &bi);
    A->block(i * rows_per_job, i * l.per_job(), rows_per_job, l.per_job()) = Ai;
    b->segment(i * rows_per_job, rows_per_job) = bi;
  }
}

void assemble_inequalities(const Scenario& s, const DecisionLayout& l, Eigen::MatrixXd* G,
                           Eigen::VectorXd* h, Eigen::MatrixXd* H) {
  (void)s;
  const int ny = l.n_y();
  const int nx = l.n_x();
  const int rows = ny + nx;
  G->setZero(rows, ny);
  h->setZero(rows);
  H->setZero(rows, nx);
  G->topLeftCorner(ny, ny) = -Eigen::MatrixXd::Identity(ny, ny);
  for (int d = 1; d <= l.dcs; ++d) {
    for (int t = 1; t <= l.horizon; ++t) {
      const int r = ny + l.x_index(d, t);
      for (int i = 0; i < l.jobs; ++i) (*G)(r, l.y_index(i, d, t)) = 1.0;
      (*H)(r, l.x_index(d, t)) = 1.0;
    }
  }
}

Eigen::VectorXd assemble_cost(const Scenario& s, const DecisionLayout& l) {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(l.n_y());
  for (int i = 0; i < l.jobs; ++i) {
    const ComputeJob& cj = s.jobs[static_cast<std::size_t>(i)];
    for (int d = 1; d <= l.dcs; ++d) {
      for (int t = 1; t <= l.horizon; ++t) {
        q(l.y_index(i, d, t)) = cj.priority * (static_cast<double>(t) / l.horizon);
      }
      for (int t = 1; t <= l.horizon - 1; ++t) {
        q(l.z_index(i, d, t)) = cj.priority * s.migration_price(i, d);
      }
    }
  }
  return q;
}

Elimination eliminate(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                      const Eigen::MatrixXd& G, const Eigen::VectorXd& h) {
  const NullspaceFactorization f = eliminate_equalities(A, b);
  Elimination e;
  e.F_T = f.basis;
  e.y_dagger = f.particular;
  e.G_tilde = G * f.basis;
  e.h_tilde = h - G * f.particular;
  e.dropped_rows = f.dropped_rows;
  return e;
}

GameMatrices assemble_game(const Scenario& s, double epsilon) {
  GameMatrices m;
  m.layout = build_layout(s);
  m.epsilon = epsilon;
  assemble_equalities(s, m.layout, &m.A, &m.b);
  assemble_inequalities(s, m.layout, &m.G, &m.h, &m.H);
  m.q = assemble_cost(s, m.layout);

  // Per-job elimination; the equality blocks are decoupled, so the stacked
  // basis stays orthonormal. Blocks sharing a home DC are identical up to
  // the volume scale of the right-hand side, so one factorization per home
  // suffices (the minimum-norm solution is linear in b).
  const int per_job = m.layout.per_job();
  std::map<int, NullspaceFactorization> per_home;
  Eigen::MatrixXd Ai;
  Eigen::VectorXd bi;
  int n_red = 0;
  for (int i = 0; i < m.layout.jobs; ++i) {
    const int home = s.jobs[static_cast<std::size_t>(i)].home_dc;
    auto it = per_home.find(home);
    if (it == per_home.end()) {
      home_equalities(m.layout, home, 1.0, &Ai, &bi);
      it = per_home.emplace(home, eliminate_equalities(Ai, bi)).first;
    }
    n_red += static_cast<int>(it->second.basis.cols());
    m.dropped_equality_rows += it->second.dropped_rows;
  }
  m.F_T.setZero(m.layout.n_y(), n_red);
  m.y_dagger.setZero(m.layout.n_y());
  int col = 0;
  for (int i = 0; i < m.layout.jobs; ++i) {
    const ComputeJob& cj = s.jobs[static_cast<std::size_t>(i)];
    const NullspaceFactorization& f = per_home.at(cj.home_dc);
    m.F_T.block(i * per_job, col, per_job, f.basis.cols()) = f.basis;
    m.y_dagger.segment(i * per_job, per_job) = cj.volume * f.particular;
    col += static_cast<int>(f.basis.cols());
  }
  m.G_tilde = m.G * m.F_T;
  m.h_tilde = m.h - m.G * m.y_dagger;
  return m;
}

EquilibriumResult solve_game(const GameMatrices& m, const Eigen::VectorXd& x,
                             const SolveOptions& opts) {
  if (x.size() != m.layout.n_x()) throw Error("solve_game: x has wrong length");
  EquilibriumResult res;
  const Eigen::VectorXd d = m.h_tilde + m.H * x;

  if (m.n_reduced() == 0) {
    const double worst = d.size() ? (-d).maxCoeff() : 0.0;
    if (worst > 1e-9 * (1.0 + d.cwiseAbs().maxCoeff())) {
      throw InfeasibleError("solve_game: constraint set is empty (fixed point violates bounds by " +
                            std::to_string(worst) + ")");
    }
    res.y_tilde_star.resize(0);
    res.y_star = m.y_dagger;
    res.lambda = Eigen::VectorXd::Zero(d.size());
    res.qp_status = QpStatus::solved;
    res.objective_value = m.q.dot(res.y_star);
    return res;
  }

  const Eigen::VectorXd target = -(m.F_T.transpose() * m.q) / m.epsilon;
  ProjectionOptions popt;
  if (opts.warm_start && opts.warm_start->qp_status == QpStatus::solved) {
    popt.warm_start = opts.warm_start->active_set;
  }
  const ProjectionResult proj = project_onto_polyhedron(target, m.G_tilde, d, 0, popt);

  res.y_tilde_star = proj.point;
  res.y_star = m.F_T * res.y_tilde_star + m.y_dagger;
  res.lambda = m.epsilon * proj.multipliers;
  const double lmax = res.lambda.size() ? res.lambda.cwiseAbs().maxCoeff() : 0.0;
  const double thr = opts.lambda_tol * (1.0 + lmax);
  for (int r = 0; r < res.lambda.size(); ++r) {
    if (res.lambda(r) > thr) res.active_set.push_back(r);
  }
  res.qp_status = QpStatus::solved;
  res.qp_iterations = proj.iterations;
  res.objective_value =
      m.q.dot(res.y_star) + 0.5 * m.epsilon * res.y_tilde_star.squaredNorm();
  return res;
}

Eigen::MatrixXd aggregate_loads(const DecisionLayout& l, const Eigen::VectorXd& y) {
  Eigen::MatrixXd loads = Eigen::MatrixXd::Zero(l.dcs, l.horizon);
  for (int i = 0; i < l.jobs; ++i) {
    for (int d = 1; d <= l.dcs; ++d) {
      for (int t = 1; t <= l.horizon; ++t) {
        loads(d - 1, t - 1) += y(l.y_index(i, d, t));
      }
    }
  }
  return loads;
}

AllocationResiduals allocation_residuals(const Scenario& s, const DecisionLayout& l,
                                         const Eigen::VectorXd& y, const Eigen::VectorXd* x) {
  if (y.size() != l.n_y()) throw Error("allocation_residuals: y has wrong length");
  AllocationResiduals r;
  r.nonneg = std::max(0.0, -y.minCoeff());
  for (int i = 0; i < l.jobs; ++i) {
    const ComputeJob& cj = s.jobs[static_cast<std::size_t>(i)];
    double total = 0.0;
    for (int d = 1; d <= l.dcs; ++d) {
      for (int t = 1; t <= l.horizon; ++t) total += y(l.y_index(i, d, t));
    }
    r.volume_rel = std::max(r.volume_rel, std::abs(total - cj.volume) / cj.volume);
    for (int d = 1; d <= l.dcs; ++d) {
      if (d == cj.home_dc) continue;
      r.first_step_abs = std::max(r.first_step_abs, std::abs(y(l.y_index(i, d, 1))));
      for (int t = 1; t <= l.horizon - 1; ++t) {
        r.arrival_abs = std::max(
            r.arrival_abs, std::abs(y(l.y_index(i, d, t + 1)) - y(l.z_index(i, d, t))));
      }
    }
    double processed_or_sent = 0.0;
    for (int t = 1; t <= l.horizon - 1; ++t) {
      processed_or_sent += y(l.y_index(i, cj.home_dc, t));
      for (int d = 1; d <= l.dcs; ++d) {
        if (d != cj.home_dc) processed_or_sent += y(l.z_index(i, d, t));
      }
      const double queue = y(l.z_index(i, cj.home_dc, t));
      r.queue_rel =
          std::max(r.queue_rel, std::abs(cj.volume - processed_or_sent - queue) / cj.volume);
    }
  }
  const Eigen::MatrixXd loads = aggregate_loads(l, y);
  for (int d = 0; d < l.dcs; ++d) {
    for (int t = 0; t < l.horizon; ++t) {
      const double bound =
          x ? (*x)(l.x_index(d + 1, t + 1)) : s.effective_capacity(d, t);
      r.capacity_excess = std::max(r.capacity_excess, loads(d, t) - bound);
    }
  }
  return r;
}

namespace {

void dump_matrix(std::ostream& os, const char* name, const Eigen::MatrixXd& m) {
  os << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) {
        os << (i + 1) << ' ' << (j + 1) << ' ' << format_double(m(i, j)) << '\n';
      }
    }
  }
  os << "end\n";
}

void dump_vector(std::ostream& os, const char* name, const Eigen::VectorXd& v) {
  os << "vector " << name << ' ' << v.size() << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) != 0.0) os << (i + 1) << ' ' << format_double(v(i)) << '\n';
  }
  os << "end\n";
}

}  // namespace

void dump_game_matrices(const GameMatrices& m, std::ostream& os, const EquilibriumResult* sol) {
  os << "game dump v1\n";
  os << "scalar epsilon " << format_double(m.epsilon) << '\n';
  dump_matrix(os, "A", m.A);
  dump_vector(os, "b", m.b);
  dump_matrix(os, "G", m.G);
  dump_vector(os, "h", m.h);
  dump_matrix(os, "H", m.H);
  dump_vector(os, "q", m.q);
  dump_vector(os, "y_dagger", m.y_dagger);
  if (sol && sol->qp_status == QpStatus::solved) {
    dump_vector(os, "y_star", sol->y_star);
    dump_vector(os, "lambda", sol->lambda);
  }
}

}  // namespace vccopt
