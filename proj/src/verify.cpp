#include "hfvc/verify.hpp"

#include <cmath>
#include <stdexcept>

namespace hfvc {

namespace {

double orthonormality_defect(const Mat& m) {
  if (m.rows() == 0) return 0.0;
  Mat gram = m * m.transpose();
  gram.diagonal().array() -= 1.0;
  return gram.cwiseAbs().maxCoeff();
}

}  // namespace

bool SolutionCheck::passes() const {
  return structure_ok && unactuated_leak == 0.0 &&
         c_orthonormality <= 1e-10 && r_a_orthonormality <= 1e-10 &&
         t_orthonormality <= 1e-10 && goal_null_residual <= 1e-8 &&
         goal_special_residual <= 1e-6 && newton_residual <= 1e-6 &&
         guard_slack_min >= -1e-6;
}

SolutionCheck check_solution(const SystemModel& model, const Solution& sol,
                             const RankTol& tol) {
  if (sol.status != SolveStatus::kSolved) {
    throw std::invalid_argument("check_solution: solution status is not solved");
  }
  const int n = model.dof.n();
  const int n_u = model.dof.n_u;
  const int n_a = model.dof.n_a;
  const int ld = model.lambda_dim;

  SolutionCheck out;

  out.structure_ok =
      sol.n_av >= 0 && sol.n_af >= 0 && sol.n_av + sol.n_af == n_a &&
      sol.c.rows() == sol.n_av && (sol.n_av == 0 || sol.c.cols() == n) &&
      sol.r_a.rows() == n_a && sol.r_a.cols() == n_a && sol.t.rows() == n &&
      sol.t.cols() == n && sol.w_av.size() == sol.n_av &&
      sol.eta_af.size() == sol.n_af && sol.eta_a.size() == n_a &&
      sol.lambda.size() == ld;
  if (out.structure_ok && sol.n_av > 0) {
    out.structure_ok = sol.t.bottomRows(sol.n_av) == sol.c;
  }
  if (out.structure_ok) {
    out.structure_ok = sol.eta_af == sol.eta_a.head(sol.n_af);
  }
  if (!out.structure_ok) return out;

  out.c_orthonormality = orthonormality_defect(sol.c);
  out.r_a_orthonormality = orthonormality_defect(sol.r_a);
  out.t_orthonormality = orthonormality_defect(sol.t);
  if (sol.n_av > 0 && n_u > 0) {
    out.unactuated_leak = sol.c.leftCols(n_u).cwiseAbs().maxCoeff();
  }

  const Mat jc = vstack(model.j, sol.c);
  if (model.g.rows() > 0) {
    const Mat free_dirs = null_rows(jc, tol);
    if (free_dirs.rows() > 0) {
      out.goal_null_residual = (model.g * free_dirs.transpose()).norm();
    }
  }

  Vec rhs = Vec::Zero(jc.rows());
  rhs.tail(sol.n_av) = sol.w_av;
  try {
    Vec v = jc.rows() > 0 ? min_norm_solve(jc, rhs, tol) : Vec::Zero(n);
    if (model.g.rows() > 0) {
      out.goal_special_residual = (model.g * v - model.b_g).norm();
    }
  } catch (const InconsistentSystem&) {
    out.goal_special_residual = kInf;
  }

  Vec gen_force = Vec::Zero(n);
  gen_force.tail(n_a) = sol.r_a.transpose() * sol.eta_a;
  Vec newton = gen_force + model.f_ext;
  if (ld > 0) {
    newton += model.jf.transpose() * sol.lambda;
  }
  out.newton_residual = newton.size() > 0 ? newton.cwiseAbs().maxCoeff() : 0.0;

  if (model.guard.lambda_mat.rows() > 0) {
    Vec x(ld + n_a);
    x.head(ld) = sol.lambda;
    x.tail(n_a) = sol.r_a.transpose() * sol.eta_a;
    const Vec slack = model.guard.b_lambda - model.guard.lambda_mat * x;
    out.guard_slack_min = slack.minCoeff();
  }

  return out;
}

}  // namespace hfvc
