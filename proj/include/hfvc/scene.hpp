// Declarative scene files.
//
// A scene document is a JSON object with "schema_version": 1 and the fields
// described in docs/scene_format.md. Parsing is strict: unknown keys, missing
// required fields, and values of the wrong shape are reported with the JSON
// pointer of the offending location.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hfvc/model.hpp"

namespace hfvc {

/// Scene document rejection; `pointer` locates the bad field ("/contacts/0/mu").
class SceneError : public std::runtime_error {
 public:
  SceneError(const std::string& ptr, const std::string& message)
      : std::runtime_error((ptr.empty() ? "/" : ptr) + ": " + message),
        pointer(ptr) {}
  std::string pointer;
};

struct Scene {
  std::vector<Body> bodies;
  std::vector<ContactPoint> contacts;
  Mat goal_rows;       // zero rows when the document has no goal
  Vec goal_rhs;
  Vec external_force;  // empty means zero
  double n_min = 0.5;
  int ridge_count = 8;
};

/// Parse and validate one scene document. Throws SceneError.
Scene parse_scene_text(const std::string& json_text);

/// parse_scene_text over the contents of the file at `path`.
Scene load_scene_file(const std::string& path);

/// Assemble the scene into a SystemModel (see model.hpp for the checks done
/// at this stage).
SystemModel build_model(const Scene& scene, RankTol tol = {});

}  // namespace hfvc
