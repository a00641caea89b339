// Hybrid force-velocity control synthesis.
//
// Given an assembled SystemModel, solve() picks the best-conditioned split of
// the actuated degrees of freedom into velocity-controlled and
// force-controlled directions, computes the commanded velocity magnitudes
// from the goal, and computes force magnitudes plus contact forces from
// quasi-static balance under the guard inequalities.
//
// The solve runs in two stages:
//   velocity: free_robot_motions -> solve_velocity -> complete_axes
//   force:    solve_force (an equality/inequality QP over [lambda; eta_a])
// Per-stage wall-clock times are recorded; the conditioning diagnostic
// (crashing_index) is computed outside the timed spans.
#pragma once

#include "hfvc/linalg.hpp"
#include "hfvc/model.hpp"
#include "hfvc/qp.hpp"

namespace hfvc {

enum class VelocityDimMode { kMinimal, kMaximal };

struct SolveOptions {
  // Minimal keeps only as many velocity directions as the goal needs;
  // maximal converts every free robot direction to velocity control.
  VelocityDimMode mode = VelocityDimMode::kMinimal;
  RankTol rank_tol;
  // Solutions whose crashing index exceeds this are counted as
  // ill conditioned by the benchmark. Must be > 1.
  double ill_conditioned_threshold = 100.0;
};

enum class SolveStatus { kSolved, kInfeasibleGoal, kGuardInfeasible };

enum class InfeasibleReason {
  kNecessaryCondition,  // fewer free robot directions than the goal needs
  kRankCondition,       // chosen axes cannot reproduce the goal rows
  kKDeficient,          // coefficient null space too small for n_av rows
  kNoSpecialSolution,   // goal velocities conflict with the contacts
};

const char* solve_status_name(SolveStatus status);
const char* infeasible_reason_name(InfeasibleReason reason);

struct SolveTimings {
  double velocity_us = 0.0;
  double force_us = 0.0;
};

/// Result of solve(). Velocity-stage fields are valid unless the status is
/// kInfeasibleGoal; force-stage fields (eta_af, lambda, eta_a) only when
/// kSolved. With n_av = 0 the goal is already enforced by the contacts:
/// c and w_av are empty and the crashing index is reported as 1.
struct Solution {
  SolveStatus status = SolveStatus::kInfeasibleGoal;
  InfeasibleReason reason = InfeasibleReason::kNecessaryCondition;
  int n_av = 0;
  int n_af = 0;
  Mat c;       // n_av x n velocity-control rows; unactuated columns exactly 0
  Mat r_a;     // n_a x n_a actuated-axis rotation; last n_av rows from c
  Mat t;       // diag(identity_u, r_a)
  Vec w_av;    // commanded velocities along the rows of c
  Vec eta_af;  // commanded force magnitudes, first n_af transformed axes
  Vec lambda;  // contact-force components at the commanded state
  Vec eta_a;   // all transformed actuated force magnitudes
  double crashing_index = 1.0;
  SolveTimings timings;
};

/// Conditioning of a velocity-control choice against the contact constraints:
/// cond2 of [row basis of j; rows of c scaled to unit norm], +infinity when
/// the stack loses rank. Throws std::invalid_argument when c is empty or has
/// a zero row.
double crashing_index(const Mat& j, const Mat& c, RankTol tol = {});

/// Orthonormal rows spanning the actuated velocities reachable without
/// breaking any contact: row basis of null_rows(j) with the unactuated
/// columns zeroed. May have zero rows. j must have dof.n() columns.
Mat free_robot_motions(const Mat& j, const DofPartition& dof, RankTol tol = {});

struct VelocityStage {
  bool feasible = false;
  InfeasibleReason reason = InfeasibleReason::kNecessaryCondition;
  int n_av = 0;
  Mat c;
  Vec w_av;
};

/// Choose the velocity-controlled directions and their magnitudes. Failures
/// are typed: the free-direction count test runs first, then the mode
/// specific rank tests, and the goal/contact consistency check last.
VelocityStage solve_velocity(const Mat& j, const Mat& g, const Vec& b_g,
                             const DofPartition& dof,
                             const SolveOptions& opts = {});

struct AxisCompletion {
  int n_af = 0;
  Mat r_a;
  Mat t;
};

/// Complete the actuated rows of c to the unitary r_a (force axes stacked
/// above the velocity axes) and embed it into the full transform t.
AxisCompletion complete_axes(const Mat& c, const DofPartition& dof,
                             RankTol tol = {});

struct ForceStage {
  bool feasible = false;
  Vec eta_af;
  Vec lambda;
  Vec eta_a;
};

/// Minimum-magnitude contact forces and actuated force commands under
/// quasi-static balance (jf' lambda + applied force + f_ext = 0) and the
/// guard inequalities. Infeasibility means the contact set cannot be
/// maintained. Throws std::runtime_error if the QP fails to converge.
ForceStage solve_force(const SystemModel& model, const Mat& t, int n_af,
                       const QpOptions& qp_opts = {});

/// Run both stages on the model and collect timings and diagnostics.
Solution solve(const SystemModel& model, const SolveOptions& opts = {});

}  // namespace hfvc
