#include "hfvc/model.hpp"

#include <cmath>
#include <unordered_map>

namespace hfvc {

namespace {

constexpr double kUnitTol = 1e-12;
constexpr double kOrthoTol = 1e-10;

bool is_planar(BodyKind kind) {
  return kind == BodyKind::kPlanar || kind == BodyKind::kPlanarPoint;
}

bool is_spatial(BodyKind kind) {
  return kind == BodyKind::kSpatial || kind == BodyKind::kSpatialPoint;
}

void check_unit(const Vec& v, const char* what) {
  ensure_finite(v, what);
  if (std::abs(v.norm() - 1.0) > kUnitTol) {
    throw std::invalid_argument(std::string(what) + ": not a unit vector");
  }
}

// Contact-force component count: one per constrained direction.
int contact_lambda_dim(const ContactPoint& c) {
  if (c.mode == ContactMode::kSliding) return 1;
  return static_cast<int>(c.normal.size());
}

void validate_contact(const ContactPoint& c, int ambient) {
  if (c.position.size() != ambient || c.normal.size() != ambient) {
    throw std::invalid_argument("contact: position/normal dimension " +
                                std::to_string(c.position.size()) + "/" +
                                std::to_string(c.normal.size()) +
                                " does not match the scene dimension " +
                                std::to_string(ambient));
  }
  ensure_finite(c.position, "contact position");
  check_unit(c.normal, "contact normal");
  if (!(c.mu >= 0.0) || !std::isfinite(c.mu)) {
    throw std::invalid_argument("contact: mu must be finite and >= 0");
  }
  if (c.mode == ContactMode::kSliding) {
    if (c.slide_direction.size() != ambient) {
      throw std::invalid_argument("contact: slide direction dimension mismatch");
    }
    check_unit(c.slide_direction, "slide direction");
    if (std::abs(c.slide_direction.dot(c.normal)) > kOrthoTol) {
      throw std::invalid_argument("contact: slide direction not tangent to the surface");
    }
  }
}

}  // namespace

int body_dof(BodyKind kind) {
  switch (kind) {
    case BodyKind::kPlanar:
      return 3;
    case BodyKind::kSpatial:
      return 6;
    case BodyKind::kPlanarPoint:
      return 2;
    case BodyKind::kSpatialPoint:
      return 3;
    case BodyKind::kEnvironment:
      return 0;
  }
  throw std::logic_error("body_dof: unknown kind");
}

Mat contact_frame(const Vec& normal) {
  check_unit(normal, "contact_frame normal");
  if (normal.size() == 2) {
    Mat frame(2, 2);
    frame << -normal(1), normal(0),  // tangent: normal rotated +90 degrees
        normal(0), normal(1);
    return frame;
  }
  if (normal.size() == 3) {
    // Seed with the coordinate axis least aligned with the normal so the
    // tangents are a continuous, reproducible function of it.
    int least = 0;
    for (int k = 1; k < 3; ++k) {
      if (std::abs(normal(k)) < std::abs(normal(least))) least = k;
    }
    Eigen::Vector3d n = normal;
    Eigen::Vector3d t1 = Eigen::Vector3d::Unit(least).cross(n).normalized();
    Eigen::Vector3d t2 = n.cross(t1);
    Mat frame(3, 3);
    frame.row(0) = t1;
    frame.row(1) = t2;
    frame.row(2) = n;
    return frame;
  }
  throw std::invalid_argument("contact_frame: normal must have size 2 or 3");
}

BodyLayout body_layout(const std::vector<Body>& bodies) {
  BodyLayout layout;
  layout.offset.assign(bodies.size(), 0);
  layout.dof.assign(bodies.size(), 0);

  bool planar = false;
  bool spatial = false;
  std::unordered_map<std::string, int> seen;
  for (size_t i = 0; i < bodies.size(); ++i) {
    const Body& b = bodies[i];
    if (!seen.emplace(b.name, static_cast<int>(i)).second) {
      throw std::invalid_argument("duplicate body name '" + b.name + "'");
    }
    if (b.kind == BodyKind::kEnvironment && b.actuated) {
      throw std::invalid_argument("environment body '" + b.name + "' cannot be actuated");
    }
    planar = planar || is_planar(b.kind);
    spatial = spatial || is_spatial(b.kind);
    layout.dof[i] = body_dof(b.kind);
  }
  if (planar && spatial) {
    throw std::invalid_argument("scene mixes planar and spatial bodies");
  }
  layout.ambient = planar ? 2 : 3;

  int col = 0;
  for (int pass = 0; pass < 2; ++pass) {
    const bool want_actuated = pass == 1;
    for (size_t i = 0; i < bodies.size(); ++i) {
      if (bodies[i].actuated != want_actuated) continue;
      layout.offset[i] = col;
      col += layout.dof[i];
      if (want_actuated) {
        layout.partition.n_a += layout.dof[i];
      } else {
        layout.partition.n_u += layout.dof[i];
      }
    }
  }
  return layout;
}

Mat point_jacobian(BodyKind kind, const Vec& p) {
  ensure_finite(p, "point_jacobian");
  switch (kind) {
    case BodyKind::kPlanar: {
      if (p.size() != 2) throw std::invalid_argument("point_jacobian: planar point must have size 2");
      Mat jp(2, 3);
      jp << 1.0, 0.0, -p(1), 0.0, 1.0, p(0);
      return jp;
    }
    case BodyKind::kSpatial: {
      if (p.size() != 3) throw std::invalid_argument("point_jacobian: spatial point must have size 3");
      Mat jp(3, 6);
      jp.leftCols(3) = Mat::Identity(3, 3);
      jp.rightCols(3) = -skew(p);
      return jp;
    }
    case BodyKind::kPlanarPoint:
      if (p.size() != 2) throw std::invalid_argument("point_jacobian: planar point must have size 2");
      return Mat::Identity(2, 2);
    case BodyKind::kSpatialPoint:
      if (p.size() != 3) throw std::invalid_argument("point_jacobian: spatial point must have size 3");
      return Mat::Identity(3, 3);
    case BodyKind::kEnvironment:
      return Mat(p.size(), 0);
  }
  throw std::logic_error("point_jacobian: unknown kind");
}

ContactJacobians assemble_jacobians(const std::vector<Body>& bodies,
                                    const std::vector<ContactPoint>& contacts) {
  const BodyLayout layout = body_layout(bodies);
  std::unordered_map<std::string, int> index;
  for (size_t i = 0; i < bodies.size(); ++i) index[bodies[i].name] = static_cast<int>(i);

  const int n = layout.partition.n();
  int total_rows = 0;
  for (const ContactPoint& c : contacts) total_rows += contact_lambda_dim(c);

  ContactJacobians out;
  out.j = Mat::Zero(total_rows, n);
  out.jf = Mat::Zero(total_rows, n);
  out.lambda_dim = total_rows;

  int row = 0;
  for (const ContactPoint& c : contacts) {
    const auto ia = index.find(c.body_a);
    const auto ib = index.find(c.body_b);
    if (ia == index.end() || ib == index.end()) {
      throw std::invalid_argument("contact references undeclared body '" +
                                  (ia == index.end() ? c.body_a : c.body_b) + "'");
    }
    if (ia->second == ib->second) {
      throw std::invalid_argument("contact pairs body '" + c.body_a + "' with itself");
    }
    const Body& ba = bodies[ia->second];
    const Body& bb = bodies[ib->second];
    if (ba.kind == BodyKind::kEnvironment && bb.kind == BodyKind::kEnvironment) {
      throw std::invalid_argument("contact between two environment bodies constrains nothing");
    }
    validate_contact(c, layout.ambient);

    // Relative point velocity of body_a with respect to body_b, as a map on
    // the full generalized velocity.
    Mat rel = Mat::Zero(layout.ambient, n);
    rel.middleCols(layout.offset[ia->second], layout.dof[ia->second]) =
        point_jacobian(ba.kind, c.position);
    rel.middleCols(layout.offset[ib->second], layout.dof[ib->second]) -=
        point_jacobian(bb.kind, c.position);

    if (c.mode == ContactMode::kSticking) {
      const Mat frame = contact_frame(c.normal);
      for (int k = 0; k < frame.rows(); ++k) {
        const Vec raw = (frame.row(k) * rel).transpose();
        const double norm = raw.norm();
        if (norm < kUnitTol) {
          throw std::invalid_argument("contact produces a degenerate constraint row");
        }
        out.j.row(row) = raw.transpose() / norm;
        out.jf.row(row) = raw.transpose();
        ++row;
      }
    } else {
      const Vec raw_n = (c.normal.transpose() * rel).transpose();
      const double norm = raw_n.norm();
      if (norm < kUnitTol) {
        throw std::invalid_argument("contact produces a degenerate constraint row");
      }
      out.j.row(row) = raw_n.transpose() / norm;
      // Kinetic friction opposes the slide, so a unit normal force transmits
      // the combined direction (normal - mu * slide) to the pair.
      const Vec eff = c.normal - c.mu * c.slide_direction;
      out.jf.row(row) = eff.transpose() * rel;
      ++row;
    }
  }
  return out;
}

GuardConditions build_guards(const std::vector<ContactPoint>& contacts,
                             double n_min, int ridge_count, int n_a) {
  if (!(n_min >= 0.0) || !std::isfinite(n_min)) {
    throw std::invalid_argument("build_guards: n_min must be finite and >= 0");
  }
  if (ridge_count < 3) {
    throw std::invalid_argument("build_guards: ridge_count must be at least 3");
  }
  if (n_a < 0) {
    throw std::invalid_argument("build_guards: negative actuated dimension");
  }

  int lambda_dim = 0;
  int rows = 0;
  for (const ContactPoint& c : contacts) {
    const int ambient = static_cast<int>(c.normal.size());
    if (ambient != 2 && ambient != 3) {
      throw std::invalid_argument("build_guards: contact normal must have size 2 or 3");
    }
    if (!(c.mu >= 0.0) || !std::isfinite(c.mu)) {
      throw std::invalid_argument("build_guards: mu must be finite and >= 0");
    }
    lambda_dim += contact_lambda_dim(c);
    if (c.mode == ContactMode::kSticking) {
      rows += (ambient == 2 ? 2 : ridge_count) + 1;
    } else {
      rows += 1;
    }
  }

  GuardConditions guard;
  guard.n_min = n_min;
  guard.lambda_mat = Mat::Zero(rows, lambda_dim + n_a);
  guard.b_lambda = Vec::Zero(rows);

  int row = 0;
  int col = 0;
  for (const ContactPoint& c : contacts) {
    const int ambient = static_cast<int>(c.normal.size());
    if (c.mode == ContactMode::kSticking) {
      if (ambient == 2) {
        // |lambda_t| <= mu * lambda_n as two half planes over [t, n].
        guard.lambda_mat(row, col) = 1.0;
        guard.lambda_mat(row, col + 1) = -c.mu;
        guard.lambda_mat(row + 1, col) = -1.0;
        guard.lambda_mat(row + 1, col + 1) = -c.mu;
        row += 2;
      } else {
        // Polyhedral cone over [t1, t2, n]: d_i . (t1, t2) <= mu * n for
        // ridge directions evenly spaced in the tangent plane.
        for (int i = 0; i < ridge_count; ++i) {
          const double phi = 2.0 * M_PI * i / ridge_count;
          guard.lambda_mat(row, col) = std::sin(phi);
          guard.lambda_mat(row, col + 1) = std::cos(phi);
          guard.lambda_mat(row, col + 2) = -c.mu;
          ++row;
        }
      }
      // Normal-force floor on the last (normal) component.
      guard.lambda_mat(row, col + ambient - 1) = -1.0;
      guard.b_lambda(row) = -n_min;
      ++row;
      col += ambient;
    } else {
      guard.lambda_mat(row, col) = -1.0;
      guard.b_lambda(row) = -n_min;
      ++row;
      col += 1;
    }
  }
  return guard;
}

bool goal_redundant(const Mat& j, const Mat& g, RankTol tol) {
  if (g.rows() == 0) return false;
  return rank(vstack(j, g), tol) < rank(j, tol) + static_cast<int>(g.rows());
}

SystemModel build_model(const std::vector<Body>& bodies,
                        const std::vector<ContactPoint>& contacts,
                        const Mat& goal_rows, const Vec& goal_rhs,
                        const Vec& f_ext, double n_min, int ridge_count,
                        RankTol tol) {
  const BodyLayout layout = body_layout(bodies);
  const int n = layout.partition.n();
  if (layout.partition.n_a < 1) {
    throw std::invalid_argument("build_model: scene has no actuated degrees of freedom");
  }

  SystemModel model;
  model.dof = layout.partition;

  ContactJacobians jac = assemble_jacobians(bodies, contacts);
  model.j = std::move(jac.j);
  model.jf = std::move(jac.jf);
  model.lambda_dim = jac.lambda_dim;

  if (goal_rows.rows() > 0 && goal_rows.cols() != n) {
    throw std::invalid_argument("build_model: goal rows have wrong column count");
  }
  if (goal_rows.rows() > n) {
    throw std::invalid_argument("build_model: more goal rows than degrees of freedom");
  }
  if (goal_rhs.size() != goal_rows.rows()) {
    throw std::invalid_argument("build_model: goal right-hand side size mismatch");
  }
  ensure_finite(goal_rows, "goal rows");
  ensure_finite(goal_rhs, "goal rhs");
  model.g = goal_rows.rows() > 0 ? goal_rows : Mat(0, n);
  model.b_g = goal_rhs;

  if (f_ext.size() == 0) {
    model.f_ext = Vec::Zero(n);
  } else if (f_ext.size() == n) {
    ensure_finite(f_ext, "external force");
    model.f_ext = f_ext;
  } else {
    throw std::invalid_argument("build_model: external force size mismatch");
  }

  model.guard = build_guards(contacts, n_min, ridge_count, layout.partition.n_a);
  model.goal_redundant = goal_redundant(model.j, model.g, tol);
  return model;
}

}  // namespace hfvc
