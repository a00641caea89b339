#include "hfvc/scene.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace hfvc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& ptr, const std::string& message) {
  throw SceneError(ptr, message);
}

std::string item(const std::string& ptr, const std::string& key) {
  return ptr + "/" + key;
}

std::string item(const std::string& ptr, size_t index) {
  return ptr + "/" + std::to_string(index);
}

void expect_object(const json& v, const std::string& ptr,
                   std::initializer_list<const char*> allowed) {
  if (!v.is_object()) fail(ptr, "expected an object");
  for (const auto& [key, value] : v.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || key == k;
    if (!known) fail(item(ptr, key), "unknown field");
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& need(const json& obj, const std::string& ptr, const char* key) {
  const json* v = find(obj, key);
  if (v == nullptr) fail(ptr, std::string("missing required field '") + key + "'");
  return *v;
}

double as_number(const json& v, const std::string& ptr) {
  if (!v.is_number()) fail(ptr, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(ptr, "expected a finite number");
  return x;
}

int as_int(const json& v, const std::string& ptr) {
  if (!v.is_number_integer()) fail(ptr, "expected an integer");
  return v.get<int>();
}

bool as_bool(const json& v, const std::string& ptr) {
  if (!v.is_boolean()) fail(ptr, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& ptr) {
  if (!v.is_string()) fail(ptr, "expected a string");
  return v.get<std::string>();
}

Vec as_vector(const json& v, const std::string& ptr) {
  if (!v.is_array()) fail(ptr, "expected an array of numbers");
  Vec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out(i) = as_number(v[i], item(ptr, i));
  return out;
}

BodyKind parse_kind(const json& v, const std::string& ptr) {
  const std::string s = as_string(v, ptr);
  if (s == "planar") return BodyKind::kPlanar;
  if (s == "spatial") return BodyKind::kSpatial;
  if (s == "planar_point") return BodyKind::kPlanarPoint;
  if (s == "spatial_point") return BodyKind::kSpatialPoint;
  if (s == "environment") return BodyKind::kEnvironment;
  fail(ptr, "unknown body kind '" + s +
               "' (expected planar, spatial, planar_point, spatial_point, or "
               "environment)");
}

std::vector<Body> parse_bodies(const json& v) {
  if (!v.is_array() || v.empty()) fail("/bodies", "expected a non-empty array");
  std::vector<Body> bodies;
  std::unordered_set<std::string> names;
  for (size_t i = 0; i < v.size(); ++i) {
    const std::string ptr = item("/bodies", i);
    expect_object(v[i], ptr, {"name", "kind", "actuated"});
    Body b;
    b.name = as_string(need(v[i], ptr, "name"), item(ptr, "name"));
    if (b.name.empty()) fail(item(ptr, "name"), "body name cannot be empty");
    if (!names.insert(b.name).second) fail(item(ptr, "name"), "duplicate body name");
    b.kind = parse_kind(need(v[i], ptr, "kind"), item(ptr, "kind"));
    b.actuated = as_bool(need(v[i], ptr, "actuated"), item(ptr, "actuated"));
    if (b.actuated && b.kind == BodyKind::kEnvironment) {
      fail(item(ptr, "actuated"), "environment bodies cannot be actuated");
    }
    bodies.push_back(std::move(b));
  }
  return bodies;
}

// ambient is 2 or 3 once the bodies pin the world dimension, 0 when they
// leave it open (environment bodies only).
std::vector<ContactPoint> parse_contacts(const json& v,
                                         const std::vector<Body>& bodies,
                                         int ambient) {
  if (!v.is_array()) fail("/contacts", "expected an array");
  std::unordered_set<std::string> names;
  for (const Body& b : bodies) names.insert(b.name);

  std::vector<ContactPoint> contacts;
  for (size_t i = 0; i < v.size(); ++i) {
    const std::string ptr = item("/contacts", i);
    expect_object(v[i], ptr, {"position", "normal", "mode", "direction", "mu", "pair"});
    ContactPoint c;
    c.position = as_vector(need(v[i], ptr, "position"), item(ptr, "position"));
    c.normal = as_vector(need(v[i], ptr, "normal"), item(ptr, "normal"));
    if (c.position.size() != 2 && c.position.size() != 3) {
      fail(item(ptr, "position"), "expected 2 or 3 components");
    }
    if (ambient != 0 && c.position.size() != ambient) {
      fail(item(ptr, "position"),
           "expected " + std::to_string(ambient) +
               " components to match the scene's bodies");
    }
    if (c.normal.size() != c.position.size()) {
      fail(item(ptr, "normal"), "size differs from position");
    }
    if (std::abs(c.normal.norm() - 1.0) > 1e-12) {
      fail(item(ptr, "normal"), "expected a unit vector");
    }

    const std::string mode =
        as_string(need(v[i], ptr, "mode"), item(ptr, "mode"));
    const json* direction = find(v[i], "direction");
    if (mode == "sticking") {
      c.mode = ContactMode::kSticking;
      if (direction != nullptr) {
        fail(item(ptr, "direction"), "only sliding contacts take a direction");
      }
    } else if (mode == "sliding") {
      c.mode = ContactMode::kSliding;
      if (direction == nullptr) {
        fail(ptr, "sliding contact needs a 'direction'");
      }
      c.slide_direction = as_vector(*direction, item(ptr, "direction"));
      if (c.slide_direction.size() != c.normal.size()) {
        fail(item(ptr, "direction"), "size differs from normal");
      }
      if (std::abs(c.slide_direction.norm() - 1.0) > 1e-12) {
        fail(item(ptr, "direction"), "expected a unit vector");
      }
      if (std::abs(c.slide_direction.dot(c.normal)) > 1e-10) {
        fail(item(ptr, "direction"), "not tangent to the contact surface");
      }
    } else {
      fail(item(ptr, "mode"), "expected 'sticking' or 'sliding'");
    }

    c.mu = as_number(need(v[i], ptr, "mu"), item(ptr, "mu"));
    if (c.mu < 0.0) fail(item(ptr, "mu"), "friction coefficient cannot be negative");

    const json& pair = need(v[i], ptr, "pair");
    if (!pair.is_array() || pair.size() != 2) {
      fail(item(ptr, "pair"), "expected [body_a, body_b]");
    }
    c.body_a = as_string(pair[0], item(item(ptr, "pair"), size_t{0}));
    c.body_b = as_string(pair[1], item(item(ptr, "pair"), size_t{1}));
    for (const std::string& name : {c.body_a, c.body_b}) {
      if (names.find(name) == names.end()) {
        fail(item(ptr, "pair"), "unknown body '" + name + "'");
      }
    }
    if (c.body_a == c.body_b) fail(item(ptr, "pair"), "bodies must differ");
    contacts.push_back(std::move(c));
  }
  return contacts;
}

void parse_goal(const json& v, Scene& scene) {
  expect_object(v, "/goal", {"rows", "rhs"});
  const json& rows = need(v, "/goal", "rows");
  const json& rhs = need(v, "/goal", "rhs");
  if (!rows.is_array()) fail("/goal/rows", "expected an array of rows");
  scene.goal_rhs = as_vector(rhs, "/goal/rhs");
  if (scene.goal_rhs.size() != static_cast<Eigen::Index>(rows.size())) {
    fail("/goal/rhs", "length differs from the number of rows");
  }
  Eigen::Index cols = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    const Vec row = as_vector(rows[i], item("/goal/rows", i));
    if (i == 0) {
      cols = row.size();
      scene.goal_rows = Mat(rows.size(), cols);
    } else if (row.size() != cols) {
      fail(item("/goal/rows", i), "rows have inconsistent lengths");
    }
    scene.goal_rows.row(i) = row;
  }
  if (rows.empty()) scene.goal_rows = Mat(0, 0);
}

void parse_guard(const json& v, Scene& scene) {
  expect_object(v, "/guard", {"n_min", "ridge_count"});
  if (const json* n_min = find(v, "n_min")) {
    scene.n_min = as_number(*n_min, "/guard/n_min");
    if (scene.n_min < 0.0) fail("/guard/n_min", "cannot be negative");
  }
  if (const json* rc = find(v, "ridge_count")) {
    scene.ridge_count = as_int(*rc, "/guard/ridge_count");
    if (scene.ridge_count < 3) fail("/guard/ridge_count", "must be at least 3");
  }
}

}  // namespace

Scene parse_scene_text(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail("", std::string("not valid JSON: ") + e.what());
  }
  expect_object(root, "", {"schema_version", "bodies", "contacts", "goal",
                           "external_force", "guard"});
  const json& version = need(root, "", "schema_version");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    fail("/schema_version", "expected the integer 1");
  }

  Scene scene;
  scene.bodies = parse_bodies(need(root, "", "bodies"));

  int n = 0;
  bool planar = false;
  bool spatial = false;
  for (const Body& b : scene.bodies) {
    n += body_dof(b.kind);
    planar = planar || b.kind == BodyKind::kPlanar || b.kind == BodyKind::kPlanarPoint;
    spatial = spatial || b.kind == BodyKind::kSpatial || b.kind == BodyKind::kSpatialPoint;
  }
  if (planar && spatial) fail("/bodies", "scene mixes planar and spatial bodies");
  const int ambient = planar ? 2 : (spatial ? 3 : 0);

  if (const json* contacts = find(root, "contacts")) {
    scene.contacts = parse_contacts(*contacts, scene.bodies, ambient);
  }
  if (const json* goal = find(root, "goal")) parse_goal(*goal, scene);
  if (scene.goal_rows.rows() > 0 && scene.goal_rows.cols() != n) {
    fail("/goal/rows", "expected " + std::to_string(n) +
                           " columns, one per generalized velocity");
  }
  if (const json* f = find(root, "external_force")) {
    scene.external_force = as_vector(*f, "/external_force");
    if (scene.external_force.size() != n) {
      fail("/external_force", "expected " + std::to_string(n) + " entries");
    }
  }
  if (const json* guard = find(root, "guard")) parse_guard(*guard, scene);
  return scene;
}

Scene load_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("", "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scene_text(buffer.str());
}

SystemModel build_model(const Scene& scene, RankTol tol) {
  return build_model(scene.bodies, scene.contacts, scene.goal_rows,
                     scene.goal_rhs, scene.external_force, scene.n_min,
                     scene.ridge_count, tol);
}

}  // namespace hfvc
