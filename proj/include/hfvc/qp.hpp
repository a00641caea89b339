// Dense convex QP solver:
//
//   minimize   1/2 x^T H x + g^T x
//   subject to A_eq x = b_eq,  A_in x <= b_in
//
// Equalities are eliminated exactly through an orthonormal null-space
// parametrization, then a dual active-set iteration (Goldfarb-Idnani style,
// with factorizations recomputed per step since problems are tiny) handles
// the inequalities. The solution carries its own KKT certificate so callers
// and tests can audit optimality without re-deriving anything.
#pragma once

#include "hfvc/linalg.hpp"

namespace hfvc {

struct QpProblem {
  Mat h;     // symmetric, positive definite on the equality null space
  Vec g;
  Mat a_eq;  // may have zero rows
  Vec b_eq;
  Mat a_in;  // convention: a_in * x <= b_in; may have zero rows
  Vec b_in;
};

enum class QpStatus { kOptimal, kInfeasible, kMaxIter };

struct QpSolution {
  QpStatus status = QpStatus::kInfeasible;
  Vec x;
  Vec eq_multipliers;
  Vec in_multipliers;   // >= 0 at optimality
  double objective = 0.0;

  // KKT certificate, evaluated on the returned iterate.
  double primal_residual = 0.0;       // max equality/inequality violation
  double stationarity_residual = 0.0; // |Hx + g + A_eq' nu + A_in' mu|_inf
  double comp_slack_residual = 0.0;   // max_i |mu_i (A_in x - b_in)_i|

  // When infeasible: a lower bound > 0 on how much some constraint must be
  // violated by any point satisfying the others.
  double infeasibility_gap = 0.0;
};

struct QpOptions {
  int max_iter = 200;
};

/// Solves the QP. Throws std::invalid_argument on malformed input
/// (dimension mismatch, non-finite entries, asymmetric H, or H not positive
/// definite on the equality null space).
QpSolution qp_solve(const QpProblem& p, const QpOptions& opts = {});

}  // namespace hfvc
