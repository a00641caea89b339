#pragma once

// Block-tilting scenario: a cube resting on a table is rolled about one of
// its bottom edges by a point hand pressing on the top face. The object pose
// is tracked as position plus a scalar-first unit quaternion; generalized
// velocities are the object body twist (linear first) stacked with the world
// hand velocity. Per step the scenario builds the contact model at the exact
// pose on the tilt arc and runs the hybrid solver.

#include <cmath>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "hfvc/model.hpp"
#include "hfvc/solver.hpp"

namespace hfvc {

/// Pose variables q = [p_object; quat_object; p_hand], dimension 10.
struct TiltState {
  Eigen::Vector3d p_object = Eigen::Vector3d::Zero();
  Eigen::Vector4d quat_object = Eigen::Vector4d(1.0, 0.0, 0.0, 0.0);
  Eigen::Vector3d p_hand = Eigen::Vector3d::Zero();
};

/// Geometry and physics of the tilt. Defaults describe a 75 mm cube with its
/// pivot edge on the world y axis, rolled 45 degrees in 50 steps; the hand
/// contact sits at the center of the top face. The axis is the world-frame
/// rotation direction; contacts on that axis stay put while the cube rolls.
struct TiltParams {
  double edge = 0.075;
  Eigen::Vector3d table_contact_a = Eigen::Vector3d(0.0, -0.0375, 0.0);
  Eigen::Vector3d table_contact_b = Eigen::Vector3d(0.0, 0.0375, 0.0);
  Eigen::Vector3d hand_contact_object = Eigen::Vector3d(0.0, 0.0, 0.0375);
  Eigen::Vector3d object_start = Eigen::Vector3d(0.0375, 0.0, 0.0375);
  Eigen::Vector3d axis = Eigen::Vector3d(0.0, -1.0, 0.0);
  double rate = 0.5;  // tilt angular speed, rad/s
  double total_angle = M_PI / 4.0;
  int steps = 50;
  double object_weight = 2.5;  // N, straight down at the object origin
  Eigen::Vector3d hand_gravity = Eigen::Vector3d::Zero();
  double mu_hand = 0.8;
  double mu_table = 0.6;
  double n_min = 0.5;
  int ridge_count = 8;
};

/// Rotation matrix of a scalar-first unit quaternion.
Mat quat_to_rotation(const Eigen::Vector4d& quat);

/// Map from object-frame angular velocity to quaternion rates:
/// quat_dot = quat_rate_map(quat) * omega_body. Throws when the quaternion
/// norm strays from 1 beyond 1e-8.
Mat quat_rate_map(const Eigen::Vector4d& quat);

/// 10x9 map from generalized velocity [body twist; hand velocity] to pose
/// rates: blockdiag(rotation, quat_rate_map, identity).
Mat velocity_map(const TiltState& state);

/// Goal rows G = [I6 0] plus the commanded object body twist: the world
/// twist of rotation at `rate` about the axis through the table contacts,
/// carried into the object frame by the inverse-pose adjoint.
void goal_body_twist(const TiltParams& params, const TiltState& state, Mat* g,
                     Vec* b_g);

/// Exact pose after rolling by theta from the start configuration.
TiltState tilt_state_at(const TiltParams& params, double theta);

/// Contact model at one pose: J over the 9 generalized velocities from the
/// three sticking point contacts (two pivot corners, one hand contact), with
/// matching raw force rows so lambda holds world-frame contact forces on the
/// object. Guards put the table friction cones in world axes and the hand
/// cone in object axes (the touched face rotates with the object), each with
/// the normal-force floor. Throws when params are invalid or the state's
/// contact points have drifted beyond 1e-6.
SystemModel tilt_model(const TiltParams& params, const TiltState& state);

struct TiltStep {
  int step = 0;
  double theta = 0.0;
  TiltState state;
  Solution solution;
  // |y component| / norm of the commanded actuated force; 0 when the
  // command is zero.
  double force_y_fraction = 0.0;
};

struct TiltTrajectory {
  std::vector<TiltStep> steps;
  bool completed = false;  // true when every planned step solved
};

/// Roll through the full arc, solving each step at the exact pose. Stops at
/// the first step that fails to solve; that step is the last record.
TiltTrajectory run_tilt(const TiltParams& params,
                        const SolveOptions& opts = {});

/// Per-step CSV: step,theta,status,n_av,n_af,crashing_index,w_av,eta_af_0,
/// eta_af_1,force_y_fraction. Missing magnitudes print as nan.
void write_tilt_csv(const TiltTrajectory& trajectory, std::ostream& out);

}  // namespace hfvc
