#include "hfvc/qp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <vector>

namespace hfvc {

namespace {

void validate(const QpProblem& p) {
  const Eigen::Index n = p.h.rows();
  if (p.h.cols() != n || p.g.size() != n) {
    throw std::invalid_argument("qp_solve: H/g dimension mismatch");
  }
  if (p.a_eq.rows() != p.b_eq.size() || (p.a_eq.rows() > 0 && p.a_eq.cols() != n)) {
    throw std::invalid_argument("qp_solve: equality dimension mismatch");
  }
  if (p.a_in.rows() != p.b_in.size() || (p.a_in.rows() > 0 && p.a_in.cols() != n)) {
    throw std::invalid_argument("qp_solve: inequality dimension mismatch");
  }
  ensure_finite(p.h, "qp_solve H");
  if (!p.g.allFinite()) throw std::invalid_argument("qp_solve: non-finite g");
  if ((p.h - p.h.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + p.h.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("qp_solve: H not symmetric");
  }
}

double objective_of(const QpProblem& p, const Vec& x) {
  return 0.5 * x.dot(p.h * x) + p.g.dot(x);
}

// Fills the KKT certificate fields of `sol` from the problem data.
void certify(const QpProblem& p, QpSolution& sol) {
  const Vec& x = sol.x;
  double primal = 0.0;
  if (p.a_eq.rows() > 0) {
    primal = (p.a_eq * x - p.b_eq).cwiseAbs().maxCoeff();
  }
  Vec slack;
  if (p.a_in.rows() > 0) {
    slack = p.a_in * x - p.b_in;
    primal = std::max(primal, slack.maxCoeff());
  }
  sol.primal_residual = std::max(primal, 0.0);

  Vec grad = p.h * x + p.g;
  if (p.a_eq.rows() > 0) grad += p.a_eq.transpose() * sol.eq_multipliers;
  if (p.a_in.rows() > 0) grad += p.a_in.transpose() * sol.in_multipliers;
  sol.stationarity_residual = grad.size() > 0 ? grad.cwiseAbs().maxCoeff() : 0.0;

  double comp = 0.0;
  for (Eigen::Index i = 0; i < p.a_in.rows(); ++i) {
    comp = std::max(comp, std::abs(sol.in_multipliers(i) * slack(i)));
  }
  sol.comp_slack_residual = comp;
  sol.objective = objective_of(p, x);
}

// Recovers equality multipliers from stationarity by least squares. The
// gradient residual lies in the row space of A_eq whenever the reduced
// problem was solved to optimality, so the fit is exact up to roundoff.
Vec recover_eq_multipliers(const QpProblem& p, const Vec& x, const Vec& mu) {
  if (p.a_eq.rows() == 0) return Vec(0);
  Vec rhs = -(p.h * x + p.g);
  if (p.a_in.rows() > 0) rhs -= p.a_in.transpose() * mu;
  Eigen::JacobiSVD<Mat> dec(p.a_eq.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  dec.setThreshold(1e-12);
  return dec.solve(rhs);
}

}  // namespace

QpSolution qp_solve(const QpProblem& p, const QpOptions& opts) {
  validate(p);
  const Eigen::Index n = p.h.rows();
  const Eigen::Index m_in = p.a_in.rows();

  QpSolution sol;
  sol.eq_multipliers = Vec::Zero(p.a_eq.rows());
  sol.in_multipliers = Vec::Zero(m_in);

  // Eliminate equalities: x = x_p + Z y with Z an orthonormal basis of
  // NULL(A_eq).
  Vec x_p = Vec::Zero(n);
  Mat z = Mat::Identity(n, n);
  if (p.a_eq.rows() > 0) {
    try {
      x_p = min_norm_solve(p.a_eq, p.b_eq);
    } catch (const InconsistentSystem& e) {
      sol.status = QpStatus::kInfeasible;
      sol.infeasibility_gap = e.residual;
      sol.x = Vec::Zero(n);
      certify(p, sol);
      return sol;
    }
    z = null_rows(p.a_eq).transpose();  // n x p, orthonormal columns
  }
  const Eigen::Index dim = z.cols();

  // Reduced data. Inequalities are kept internally in the form
  // nrm_i . y >= beta_i.
  Mat h_r = z.transpose() * p.h * z;
  Vec g_r = z.transpose() * (p.g + p.h * x_p);
  Mat nrm(dim, m_in);
  Vec beta(m_in);
  if (m_in > 0) {
    nrm = -(p.a_in * z).transpose();
    beta = -(p.b_in - p.a_in * x_p);
  }

  Vec y = Vec::Zero(dim);
  Eigen::LLT<Mat> hll;
  if (dim > 0) {
    hll.compute(h_r);
    if (hll.info() != Eigen::Success) {
      throw std::invalid_argument(
          "qp_solve: cost not positive definite on the equality null space");
    }
    y = hll.solve(-g_r);
  }

  const double viol_tol = 1e-11 * (1.0 + (m_in > 0 ? p.b_in.cwiseAbs().maxCoeff() : 0.0));
  std::vector<int> active;   // indices into the inequality rows
  std::vector<double> u;     // multipliers for `active`, kept >= 0

  auto finish = [&](QpStatus st) {
    sol.status = st;
    sol.x = x_p + z * y;
    for (size_t j = 0; j < active.size(); ++j) sol.in_multipliers(active[j]) = u[j];
    sol.eq_multipliers = recover_eq_multipliers(p, sol.x, sol.in_multipliers);
    certify(p, sol);
    return sol;
  };

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // Most violated inactive constraint.
    int pick = -1;
    double worst = -viol_tol;
    for (Eigen::Index i = 0; i < m_in; ++i) {
      if (std::find(active.begin(), active.end(), static_cast<int>(i)) != active.end()) continue;
      const double s = nrm.col(i).dot(y) - beta(i);
      if (s < worst) {
        worst = s;
        pick = static_cast<int>(i);
      }
    }
    if (pick < 0) return finish(QpStatus::kOptimal);

    const Vec nplus = nrm.col(pick);
    double s_p = nplus.dot(y) - beta(pick);
    double u_p = 0.0;

    while (true) {
      // Step directions with the current active set: z_dir in primal space,
      // r in dual space.
      const Eigen::Index k = static_cast<Eigen::Index>(active.size());
      Vec hin = hll.solve(nplus);
      Vec r(k);
      Vec z_dir = hin;
      if (k > 0) {
        Mat nmat(dim, k);
        for (Eigen::Index j = 0; j < k; ++j) nmat.col(j) = nrm.col(active[j]);
        Mat w = hll.solve(nmat);
        Eigen::LDLT<Mat> s_fac(nmat.transpose() * w);
        r = s_fac.solve(nmat.transpose() * hin);
        z_dir = hin - w * r;
      }
      const double ztn = z_dir.dot(nplus);
      const bool z_zero = !(ztn > 1e-12 * (1.0 + std::abs(hin.dot(nplus))));

      // Blocking constraint for the dual step.
      double t1 = kInf;
      int drop = -1;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (r(j) > 1e-14) {
          const double ratio = u[j] / r(j);
          if (ratio < t1 - 1e-15) {
            t1 = ratio;
            drop = static_cast<int>(j);
          }
        }
      }

      if (z_zero) {
        if (drop < 0) {
          // No feasible point exists: with multipliers r <= 0 on the active
          // set, every point satisfying it keeps constraint `pick` short of
          // its bound by at least -s_p.
          sol.infeasibility_gap = -s_p;
          return finish(QpStatus::kInfeasible);
        }
        for (Eigen::Index j = 0; j < k; ++j) u[j] -= t1 * r(j);
        u_p += t1;
        active.erase(active.begin() + drop);
        u.erase(u.begin() + drop);
        continue;
      }

      const double t2 = -s_p / ztn;
      const double t = std::min(t1, t2);
      y += t * z_dir;
      for (Eigen::Index j = 0; j < k; ++j) u[j] -= t * r(j);
      u_p += t;
      s_p = nplus.dot(y) - beta(pick);

      if (t2 <= t1) {
        active.push_back(pick);
        u.push_back(u_p);
        break;  // full step taken, constraint now active
      }
      active.erase(active.begin() + drop);
      u.erase(u.begin() + drop);
      if (s_p >= -viol_tol) break;  // satisfied along the way
    }
  }
  return finish(QpStatus::kMaxIter);
}

}  // namespace hfvc
