#include "hfvc/solver.hpp"

#include <chrono>

namespace hfvc {

namespace {

double elapsed_us(std::chrono::steady_clock::time_point from,
                  std::chrono::steady_clock::time_point to) {
  return std::chrono::duration<double, std::micro>(to - from).count();
}

}  // namespace

const char* solve_status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::kSolved:
      return "solved";
    case SolveStatus::kInfeasibleGoal:
      return "infeasible_goal";
    case SolveStatus::kGuardInfeasible:
      return "guard_infeasible";
  }
  return "unknown";
}

const char* infeasible_reason_name(InfeasibleReason reason) {
  switch (reason) {
    case InfeasibleReason::kNecessaryCondition:
      return "necessary_condition";
    case InfeasibleReason::kRankCondition:
      return "rank_condition";
    case InfeasibleReason::kKDeficient:
      return "K_deficient";
    case InfeasibleReason::kNoSpecialSolution:
      return "no_special_solution";
  }
  return "unknown";
}

double crashing_index(const Mat& j, const Mat& c, RankTol tol) {
  if (c.rows() == 0) {
    throw std::invalid_argument("crashing_index: no velocity-control rows");
  }
  if (j.rows() > 0 && j.cols() != c.cols()) {
    throw std::invalid_argument("crashing_index: column mismatch");
  }
  Mat c_hat = c;
  for (Eigen::Index r = 0; r < c_hat.rows(); ++r) {
    const double norm = c_hat.row(r).norm();
    if (norm <= 0.0) {
      throw std::invalid_argument("crashing_index: zero row in c");
    }
    c_hat.row(r) /= norm;
  }
  return cond2(vstack(row_basis(j, tol), c_hat), tol);
}

Mat free_robot_motions(const Mat& j, const DofPartition& dof, RankTol tol) {
  const int n = dof.n();
  if (j.cols() != n) {
    throw std::invalid_argument("free_robot_motions: j must have one column per dof");
  }
  Mat reachable = null_rows(j, tol);
  reachable.leftCols(dof.n_u).setZero();
  Mat basis = row_basis(reachable, tol);
  basis.leftCols(dof.n_u).setZero();
  return basis;
}

VelocityStage solve_velocity(const Mat& j, const Mat& g, const Vec& b_g,
                             const DofPartition& dof,
                             const SolveOptions& opts) {
  const int n = dof.n();
  if (j.cols() != n || (g.rows() > 0 && g.cols() != n)) {
    throw std::invalid_argument("solve_velocity: column counts must equal the dof count");
  }
  if (b_g.size() != g.rows()) {
    throw std::invalid_argument("solve_velocity: goal right-hand side size mismatch");
  }
  const RankTol tol = opts.rank_tol;

  VelocityStage out;
  const Mat ubar = free_robot_motions(j, dof, tol);
  const Mat jg = vstack(j, g);
  const int needed = rank(jg, tol) - rank(j, tol);

  if (static_cast<int>(ubar.rows()) < needed) {
    out.reason = InfeasibleReason::kNecessaryCondition;
    return out;
  }

  if (opts.mode == VelocityDimMode::kMaximal) {
    out.n_av = static_cast<int>(ubar.rows());
    out.c = ubar;
    const Mat jc = vstack(j, out.c);
    if (rank(jc, tol) != rank(vstack(jc, g), tol)) {
      out.reason = InfeasibleReason::kRankCondition;
      return out;
    }
  } else {
    out.n_av = needed;
    if (needed > 0) {
      // Rows of c must span the directions of the contact null space that the
      // goal observes. Coefficients orthogonal to the goal-invariant
      // directions provide exactly that.
      const Mat goal_invariant = null_rows(jg, tol);
      const Mat k = null_rows(goal_invariant * ubar.transpose(), tol);
      if (static_cast<int>(k.rows()) < needed) {
        out.reason = InfeasibleReason::kKDeficient;
        return out;
      }
      out.c = k.topRows(needed) * ubar;
    } else {
      out.c = Mat(0, n);
    }
  }

  Vec rhs = Vec::Zero(jg.rows());
  rhs.tail(g.rows()) = b_g;
  Vec v_star;
  try {
    v_star = min_norm_solve(jg, rhs, tol);
  } catch (const InconsistentSystem&) {
    out.reason = InfeasibleReason::kNoSpecialSolution;
    return out;
  }
  out.w_av = out.c.rows() > 0 ? Vec(out.c * v_star) : Vec();
  out.feasible = true;
  return out;
}

AxisCompletion complete_axes(const Mat& c, const DofPartition& dof,
                             RankTol tol) {
  const int n = dof.n();
  if (c.rows() > 0 && c.cols() != n) {
    throw std::invalid_argument("complete_axes: c must have one column per dof");
  }
  if (c.rows() > dof.n_a) {
    throw std::invalid_argument("complete_axes: more rows than actuated dofs");
  }
  const Mat r_c = c.rows() > 0 ? Mat(c.rightCols(dof.n_a)) : Mat(0, dof.n_a);

  AxisCompletion out;
  out.n_af = dof.n_a - static_cast<int>(c.rows());
  out.r_a = vstack(null_rows(r_c, tol), r_c);
  out.t = Mat::Identity(n, n);
  out.t.bottomRightCorner(dof.n_a, dof.n_a) = out.r_a;
  return out;
}

ForceStage solve_force(const SystemModel& model, const Mat& t, int n_af,
                       const QpOptions& qp_opts) {
  const int n = model.dof.n();
  const int n_a = model.dof.n_a;
  const int ld = model.lambda_dim;
  if (t.rows() != n || t.cols() != n) {
    throw std::invalid_argument("solve_force: t must be n by n");
  }
  if (n_af < 0 || n_af > n_a) {
    throw std::invalid_argument("solve_force: n_af out of range");
  }
  const Mat r_a = t.bottomRightCorner(n_a, n_a);

  QpProblem qp;
  const int dim = ld + n_a;
  qp.h = 2.0 * Mat::Identity(dim, dim);
  qp.g = Vec::Zero(dim);

  // Quasi-static balance: jf' lambda + [0; r_a' eta_a] = -f_ext.
  qp.a_eq = Mat::Zero(n, dim);
  qp.a_eq.leftCols(ld) = model.jf.transpose();
  qp.a_eq.bottomRightCorner(n_a, n_a) = r_a.transpose();
  qp.b_eq = -model.f_ext;

  // Guard rows act on [lambda; actuated force]; substitute the transformed
  // force variable.
  const Mat& guard = model.guard.lambda_mat;
  if (guard.cols() != dim) {
    throw std::invalid_argument("solve_force: guard column count mismatch");
  }
  qp.a_in = Mat(guard.rows(), dim);
  qp.a_in.leftCols(ld) = guard.leftCols(ld);
  qp.a_in.rightCols(n_a) = guard.rightCols(n_a) * r_a.transpose();
  qp.b_in = model.guard.b_lambda;

  const QpSolution sol = qp_solve(qp, qp_opts);
  ForceStage out;
  if (sol.status == QpStatus::kMaxIter) {
    throw std::runtime_error("solve_force: force balance QP did not converge");
  }
  if (sol.status != QpStatus::kOptimal) {
    return out;
  }
  out.feasible = true;
  out.lambda = sol.x.head(ld);
  out.eta_a = sol.x.tail(n_a);
  out.eta_af = out.eta_a.head(n_af);
  return out;
}

Solution solve(const SystemModel& model, const SolveOptions& opts) {
  if (!(opts.ill_conditioned_threshold > 1.0)) {
    throw std::invalid_argument("solve: ill_conditioned_threshold must exceed 1");
  }

  Solution sol;
  const auto t0 = std::chrono::steady_clock::now();
  const VelocityStage vel =
      solve_velocity(model.j, model.g, model.b_g, model.dof, opts);
  if (!vel.feasible) {
    sol.status = SolveStatus::kInfeasibleGoal;
    sol.reason = vel.reason;
    sol.timings.velocity_us = elapsed_us(t0, std::chrono::steady_clock::now());
    return sol;
  }
  const AxisCompletion axes = complete_axes(vel.c, model.dof, opts.rank_tol);
  sol.timings.velocity_us = elapsed_us(t0, std::chrono::steady_clock::now());

  sol.n_av = vel.n_av;
  sol.n_af = axes.n_af;
  sol.c = vel.c;
  sol.r_a = axes.r_a;
  sol.t = axes.t;
  sol.w_av = vel.w_av;
  sol.crashing_index =
      vel.n_av == 0 ? 1.0 : crashing_index(model.j, vel.c, opts.rank_tol);

  const auto t1 = std::chrono::steady_clock::now();
  const ForceStage force = solve_force(model, axes.t, axes.n_af);
  sol.timings.force_us = elapsed_us(t1, std::chrono::steady_clock::now());

  if (!force.feasible) {
    sol.status = SolveStatus::kGuardInfeasible;
    return sol;
  }
  sol.status = SolveStatus::kSolved;
  sol.eta_af = force.eta_af;
  sol.lambda = force.lambda;
  sol.eta_a = force.eta_a;
  return sol;
}

}  // namespace hfvc
