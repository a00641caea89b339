// Quasi-static contact model assembly.
//
// A scene is a list of rigid bodies plus point contacts between them. From it
// we build the velocity-constraint matrix J (J v = 0), the force-transmission
// matrix Jf (Jf^T lambda = generalized contact force), the goal constraint
// (G v = b_g), the external generalized force, and the guard inequalities that
// keep contact forces inside their friction cones and above a normal-force
// floor.
//
// Generalized coordinates stack the unactuated bodies first, then the actuated
// ones, each group in declaration order. Per body the coordinates are:
//   planar         [vx, vy, omega]           3 dof
//   spatial        [vx, vy, vz, wx, wy, wz]  6 dof
//   planar_point   [vx, vy]                  2 dof
//   spatial_point  [vx, vy, vz]              3 dof
//   environment    (none)                    0 dof
// Linear/angular velocities are taken about the world origin, so a body point
// at p moves with v + omega x p.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hfvc/linalg.hpp"

namespace hfvc {

enum class BodyKind { kPlanar, kSpatial, kPlanarPoint, kSpatialPoint, kEnvironment };

/// Generalized-velocity dimension of one body of the given kind.
int body_dof(BodyKind kind);

struct Body {
  std::string name;
  BodyKind kind = BodyKind::kEnvironment;
  bool actuated = false;
};

enum class ContactMode { kSticking, kSliding };

/// One point contact. The normal is a unit vector pointing from body_b toward
/// body_a, i.e. along the normal force that body_b exerts on body_a. For a
/// sliding contact, slide_direction is the unit tangent along which body_a
/// moves relative to body_b.
struct ContactPoint {
  Vec position;
  Vec normal;
  ContactMode mode = ContactMode::kSticking;
  Vec slide_direction;
  double mu = 0.0;
  std::string body_a;
  std::string body_b;
};

/// Inequality rows `lambda_mat [contact forces; actuated forces] <= b` that a
/// physically valid force solution must satisfy. Rows never mix contacts: per
/// sticking contact a polyhedral friction cone plus the normal-force floor,
/// per sliding contact the floor alone. The trailing actuated-force columns
/// are zero here but kept so the rows apply directly to stacked force
/// variables.
struct GuardConditions {
  Mat lambda_mat;
  Vec b_lambda;
  double n_min = 0.0;
};

struct DofPartition {
  int n_u = 0;
  int n_a = 0;

  int n() const { return n_u + n_a; }
};

/// Column layout of the generalized coordinate vector (unactuated bodies
/// first, then actuated, declaration order inside each group).
struct BodyLayout {
  DofPartition partition;
  std::vector<int> offset;  // first column of each body, parallel to `bodies`
  std::vector<int> dof;     // column count of each body
  int ambient = 3;          // world dimension: 2 or 3
};

/// Immutable after construction; share freely across threads.
struct SystemModel {
  DofPartition dof;
  Mat j;    // velocity constraints, rows scaled to unit norm
  Mat jf;   // force transmission, rows in physical units
  Mat g;    // goal rows
  Vec b_g;  // goal right-hand side
  Vec f_ext;
  GuardConditions guard;
  int lambda_dim = 0;
  // Set when rank([J; G]) < rank(J) + rows(G): some goal rows are already
  // implied by (or conflict with) the contact constraints.
  bool goal_redundant = false;
};

/// Orthonormal component directions of a contact as rows, tangents first and
/// the normal last: 2x2 [t; n] in the plane, 3x3 [t1; t2; n] in space with
/// t1 x t2 = n. Deterministic in the normal alone.
Mat contact_frame(const Vec& normal);

/// Column offsets per body. Throws std::invalid_argument on duplicate names
/// or on a scene mixing planar and spatial bodies.
BodyLayout body_layout(const std::vector<Body>& bodies);

/// Velocity Jacobian of the world point `p` rigidly attached to a body of
/// `kind`: maps the body's generalized velocity to the point velocity.
Mat point_jacobian(BodyKind kind, const Vec& p);

struct ContactJacobians {
  Mat j;           // one row per constrained direction, unit-norm rows
  Mat jf;          // matching rows in raw physical scale
  int lambda_dim;  // rows of jf == number of contact-force components
};

/// Build J and Jf over all contacts. A sticking contact contributes one row
/// per frame direction; a sliding contact contributes the normal row only,
/// with the kinetic-friction wrench (normal - mu * slide_direction) folded
/// into its jf row. Contacts between two environment bodies, unknown body
/// names, malformed normals or directions, and negative mu are rejected with
/// std::invalid_argument.
ContactJacobians assemble_jacobians(const std::vector<Body>& bodies,
                                    const std::vector<ContactPoint>& contacts);

/// Guard rows for the given contacts, in contact order, over contact-local
/// force components (tangential first, normal last, matching
/// assemble_jacobians). Sticking contacts in the plane get the two half-plane
/// rows |lambda_t| <= mu * lambda_n; spatial ones get a ridge_count-sided
/// polyhedral cone. Every contact gets the floor row lambda_n >= n_min.
/// The matrix is padded with n_a zero columns for the actuated forces.
/// Requires ridge_count >= 3, n_min >= 0, mu >= 0.
GuardConditions build_guards(const std::vector<ContactPoint>& contacts,
                             double n_min, int ridge_count, int n_a);

/// True when some goal row is linearly dependent on the contact constraints,
/// i.e. rank([J; G]) < rank(J) + rows(G).
bool goal_redundant(const Mat& j, const Mat& g, RankTol tol = {});

/// Assemble the full model. `goal_rows` may have zero rows; `f_ext` may be
/// empty (treated as zero) or of length n. Requires at least one actuated
/// degree of freedom. Goal redundancy is recorded, not rejected.
SystemModel build_model(const std::vector<Body>& bodies,
                        const std::vector<ContactPoint>& contacts,
                        const Mat& goal_rows, const Vec& goal_rhs,
                        const Vec& f_ext, double n_min = 0.5,
                        int ridge_count = 8, RankTol tol = {});

}  // namespace hfvc
