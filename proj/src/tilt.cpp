#include "hfvc/tilt.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <Eigen/Geometry>

namespace hfvc {
namespace {

constexpr double kQuatTol = 1e-8;
constexpr double kContactTol = 1e-6;

Mat skew(const Eigen::Vector3d& v) {
  Mat s = Mat::Zero(3, 3);
  s(0, 1) = -v.z();
  s(0, 2) = v.y();
  s(1, 0) = v.z();
  s(1, 2) = -v.x();
  s(2, 0) = -v.y();
  s(2, 1) = v.x();
  return s;
}

void validate_params(const TiltParams& p) {
  if (!(p.edge > 0.0)) throw std::invalid_argument("tilt: edge must be positive");
  if (p.steps < 1) throw std::invalid_argument("tilt: steps must be at least 1");
  if (!(p.rate == p.rate) || !std::isfinite(p.rate))
    throw std::invalid_argument("tilt: rate must be finite");
  if (!(p.total_angle >= 0.0))
    throw std::invalid_argument("tilt: total angle must be nonnegative");
  if (p.mu_hand < 0.0 || p.mu_table < 0.0)
    throw std::invalid_argument("tilt: friction coefficients must be nonnegative");
  if (p.n_min < 0.0) throw std::invalid_argument("tilt: n_min must be nonnegative");
  if (p.ridge_count < 3) throw std::invalid_argument("tilt: ridge count must be at least 3");
  if (p.object_weight < 0.0)
    throw std::invalid_argument("tilt: object weight must be nonnegative");
  const double axis_norm = p.axis.norm();
  if (std::abs(axis_norm - 1.0) > 1e-6)
    throw std::invalid_argument("tilt: rotation axis must be a unit vector");
  // The pivot contacts must sit on the rotation line through the origin,
  // otherwise they would not stay put while the object rolls.
  for (const Eigen::Vector3d& c : {p.table_contact_a, p.table_contact_b}) {
    if (c.cross(p.axis).norm() > 1e-9 * std::max(1.0, c.norm()))
      throw std::invalid_argument("tilt: table contacts must lie on the rotation axis");
  }
}

void check_quat(const Eigen::Vector4d& quat) {
  if (std::abs(quat.norm() - 1.0) > kQuatTol)
    throw std::invalid_argument("tilt: quaternion must have unit norm");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

Mat quat_to_rotation(const Eigen::Vector4d& quat) {
  check_quat(quat);
  const Eigen::Quaterniond q(quat(0), quat(1), quat(2), quat(3));
  return q.normalized().toRotationMatrix();
}

Mat quat_rate_map(const Eigen::Vector4d& quat) {
  check_quat(quat);
  const double w = quat(0);
  const Eigen::Vector3d v = quat.tail<3>();
  Mat e = Mat::Zero(4, 3);
  e.row(0) = -v.transpose();
  e.block(1, 0, 3, 3) = w * Mat::Identity(3, 3) + skew(v);
  return 0.5 * e;
}

Mat velocity_map(const TiltState& state) {
  Mat omega = Mat::Zero(10, 9);
  omega.block(0, 0, 3, 3) = quat_to_rotation(state.quat_object);
  omega.block(3, 3, 4, 3) = quat_rate_map(state.quat_object);
  omega.block(7, 6, 3, 3) = Mat::Identity(3, 3);
  return omega;
}

void goal_body_twist(const TiltParams& params, const TiltState& state, Mat* g,
                     Vec* b_g) {
  validate_params(params);
  const Mat r = quat_to_rotation(state.quat_object);
  const Eigen::Vector3d omega_w = params.axis * params.rate;
  // World twist of the tilt rotation, linear part taken at the world origin.
  const Eigen::Vector3d v_w = -omega_w.cross(params.table_contact_a);
  const Eigen::Vector3d p = state.p_object;
  const Eigen::Vector3d v_body = r.transpose() * (v_w - p.cross(omega_w));
  const Eigen::Vector3d omega_body = r.transpose() * omega_w;
  *g = Mat::Zero(6, 9);
  g->block(0, 0, 6, 6) = Mat::Identity(6, 6);
  *b_g = Vec(6);
  b_g->head(3) = v_body;
  b_g->tail(3) = omega_body;
}

TiltState tilt_state_at(const TiltParams& params, double theta) {
  validate_params(params);
  const Eigen::Matrix3d r =
      Eigen::AngleAxisd(theta, params.axis.normalized()).toRotationMatrix();
  const Eigen::Quaterniond q(r);
  TiltState state;
  state.p_object = r * params.object_start;
  state.quat_object = Eigen::Vector4d(q.w(), q.x(), q.y(), q.z());
  state.quat_object.normalize();
  state.p_hand = state.p_object + r * params.hand_contact_object;
  return state;
}

SystemModel tilt_model(const TiltParams& params, const TiltState& state) {
  validate_params(params);
  check_quat(state.quat_object);
  const Mat r = quat_to_rotation(state.quat_object);

  // Material contact points in the object frame: the two pivot corners are
  // fixed by the start configuration, the hand point is a parameter.
  const Eigen::Vector3d corner_a = params.table_contact_a - params.object_start;
  const Eigen::Vector3d corner_b = params.table_contact_b - params.object_start;
  const Eigen::Vector3d world_targets[3] = {params.table_contact_a,
                                            params.table_contact_b, state.p_hand};
  const Eigen::Vector3d object_points[3] = {corner_a, corner_b,
                                            params.hand_contact_object};
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d world = state.p_object + r * object_points[i];
    if ((world - world_targets[i]).norm() > kContactTol)
      throw std::invalid_argument("tilt: state is inconsistent with the contact geometry");
  }

  SystemModel model;
  model.dof = DofPartition{6, 3};
  model.lambda_dim = 9;

  // One sticking point contact per block of three rows; lambda holds the
  // world-frame force each contact applies to the object. Velocity rows live
  // in j with unit scale, force rows in jf at physical scale.
  Mat jf = Mat::Zero(9, 9);
  for (int i = 0; i < 3; ++i) {
    jf.block(3 * i, 0, 3, 3) = r;
    jf.block(3 * i, 3, 3, 3) = -r * skew(object_points[i]);
  }
  jf.block(6, 6, 3, 3) = -Mat::Identity(3, 3);  // hand side of its contact
  model.jf = jf;
  model.j = jf;
  for (int i = 0; i < model.j.rows(); ++i) {
    const double n = model.j.row(i).norm();
    model.j.row(i) /= n;
  }

  goal_body_twist(params, state, &model.g, &model.b_g);

  model.f_ext = Vec::Zero(9);
  model.f_ext.head(3) = r.transpose() * Eigen::Vector3d(0, 0, -params.object_weight);
  model.f_ext.tail(3) = params.hand_gravity;

  // Guards over [lambda; actuated force]: per contact a polyhedral friction
  // cone and a floor on the normal force. Table cones act on world
  // components (normal +z); the hand cone acts on object-frame components
  // (the pressed face has object-frame normal +z, force pushes against it).
  const int ridge = params.ridge_count;
  const int rows_per_contact = ridge + 1;
  Mat guard = Mat::Zero(3 * rows_per_contact, 12);
  Vec b = Vec::Zero(3 * rows_per_contact);
  int row = 0;
  for (int c = 0; c < 2; ++c) {
    const int col = 3 * c;
    for (int i = 0; i < ridge; ++i) {
      const double phi = 2.0 * M_PI * i / ridge;
      guard(row, col + 0) = std::sin(phi);
      guard(row, col + 1) = std::cos(phi);
      guard(row, col + 2) = -params.mu_table;
      ++row;
    }
    guard(row, col + 2) = -1.0;
    b(row) = -params.n_min;
    ++row;
  }
  for (int i = 0; i < ridge; ++i) {
    const double phi = 2.0 * M_PI * i / ridge;
    const Eigen::Vector3d d(std::sin(phi), std::cos(phi), params.mu_hand);
    guard.block(row, 6, 1, 3) = (r * d).transpose();
    ++row;
  }
  guard.block(row, 6, 1, 3) = r.col(2).transpose();
  b(row) = -params.n_min;

  model.guard.lambda_mat = guard;
  model.guard.b_lambda = b;
  model.guard.n_min = params.n_min;
  model.goal_redundant = goal_redundant(model.j, model.g);
  return model;
}

TiltTrajectory run_tilt(const TiltParams& params, const SolveOptions& opts) {
  validate_params(params);
  TiltTrajectory trajectory;
  trajectory.steps.reserve(params.steps);
  for (int k = 0; k < params.steps; ++k) {
    const double theta =
        params.steps > 1 ? params.total_angle * k / (params.steps - 1) : 0.0;
    TiltStep record;
    record.step = k;
    record.theta = theta;
    record.state = tilt_state_at(params, theta);
    const SystemModel model = tilt_model(params, record.state);
    record.solution = solve(model, opts);
    if (record.solution.status == SolveStatus::kSolved &&
        record.solution.eta_a.size() > 0) {
      const Vec force = record.solution.r_a.transpose() * record.solution.eta_a;
      const double norm = force.norm();
      record.force_y_fraction = norm > 0.0 ? std::abs(force(1)) / norm : 0.0;
    }
    const bool ok = record.solution.status == SolveStatus::kSolved;
    trajectory.steps.push_back(std::move(record));
    if (!ok) return trajectory;
  }
  trajectory.completed = true;
  return trajectory;
}

void write_tilt_csv(const TiltTrajectory& trajectory, std::ostream& out) {
  out << "step,theta,status,n_av,n_af,crashing_index,w_av,eta_af_0,eta_af_1,"
         "force_y_fraction\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const TiltStep& s : trajectory.steps) {
    const Solution& sol = s.solution;
    out << s.step << ',' << fmt(s.theta) << ','
        << solve_status_name(sol.status) << ',' << sol.n_av << ',' << sol.n_af
        << ',' << fmt(sol.crashing_index) << ','
        << fmt(sol.w_av.size() > 0 ? sol.w_av(0) : nan) << ','
        << fmt(sol.eta_af.size() > 0 ? sol.eta_af(0) : nan) << ','
        << fmt(sol.eta_af.size() > 1 ? sol.eta_af(1) : nan) << ','
        << fmt(s.force_y_fraction) << '\n';
  }
}

}  // namespace hfvc
