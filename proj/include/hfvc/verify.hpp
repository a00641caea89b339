#pragma once

// Post-hoc checks for a solved hybrid control problem. Everything here is
// recomputed from the model and the returned solution, independently of how
// the solver produced them, so tests and the benchmark can use these numbers
// as an acceptance gate.

#include "hfvc/linalg.hpp"
#include "hfvc/model.hpp"
#include "hfvc/solver.hpp"

namespace hfvc {

struct SolutionCheck {
  // max |C C^T - I|, |R_a R_a^T - I|, |T T^T - I|; zero for empty factors.
  double c_orthonormality = 0.0;
  double r_a_orthonormality = 0.0;
  double t_orthonormality = 0.0;

  // max |entry| of the unactuated columns of C. Exactly zero by construction.
  double unactuated_leak = 0.0;

  // ||G N^T|| with N = null_rows([J; C]): motions left free by the contacts
  // and the velocity controls must not move the goal.
  double goal_null_residual = 0.0;

  // ||G v - b_G|| at the min-norm v solving [J; C] v = [0; w_av]: executing
  // the commanded velocities achieves the goal rate. +inf if that system is
  // inconsistent.
  double goal_special_residual = 0.0;

  // ||Jf^T lambda + [0; R_a^T eta_a] + F||_inf: quasi-static force balance.
  double newton_residual = 0.0;

  // min over guard rows of b - A x at the returned forces; +inf if no rows.
  double guard_slack_min = kInf;

  // Shape bookkeeping: dimensions agree, n_av + n_af = n_a, and the bottom
  // n_av rows of T equal C bit for bit.
  bool structure_ok = false;

  // True when every residual is inside the library-wide tolerances
  // (orthonormality 1e-10, goal rows 1e-8 / 1e-6, forces 1e-6).
  bool passes() const;
};

// Recompute all checks for a solution with status kSolved. Throws
// std::invalid_argument for any other status.
SolutionCheck check_solution(const SystemModel& model, const Solution& sol,
                             const RankTol& tol = {});

}  // namespace hfvc
