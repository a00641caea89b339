#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "hfvc/scene.hpp"

using hfvc::Scene;
using hfvc::SceneError;

namespace {

const char* kGoodScene = R"({
  "schema_version": 1,
  "bodies": [
    {"name": "block", "kind": "planar", "actuated": false},
    {"name": "finger", "kind": "planar", "actuated": true},
    {"name": "ground", "kind": "environment", "actuated": false}
  ],
  "contacts": [
    {"position": [0.0, 0.0], "normal": [0.0, 1.0], "mode": "sticking",
     "mu": 0.5, "pair": ["block", "ground"]},
    {"position": [0.0, 0.2], "normal": [0.0, -1.0], "mode": "sliding",
     "direction": [1.0, 0.0], "mu": 0.3, "pair": ["finger", "block"]}
  ],
  "goal": {"rows": [[0.0, 0.0, 1.0, 0.0, 0.0, 0.0]], "rhs": [0.25]},
  "external_force": [0.0, -9.8, 0.0, 0.0, 0.0, 0.0],
  "guard": {"n_min": 0.25, "ridge_count": 8}
})";

// Expect a SceneError whose pointer matches exactly.
void expect_pointer(const std::string& text, const std::string& pointer) {
  try {
    hfvc::parse_scene_text(text);
    FAIL_CHECK(("expected a rejection at " + pointer));
  } catch (const SceneError& e) {
    CHECK(e.pointer == pointer);
  }
}

}  // namespace

TEST_SUITE_BEGIN("scene");

TEST_CASE("full document round trip") {
  const Scene scene = hfvc::parse_scene_text(kGoodScene);
  REQUIRE(scene.bodies.size() == 3);
  CHECK(scene.bodies[1].actuated);
  CHECK(scene.bodies[2].kind == hfvc::BodyKind::kEnvironment);
  REQUIRE(scene.contacts.size() == 2);
  CHECK(scene.contacts[0].mode == hfvc::ContactMode::kSticking);
  CHECK(scene.contacts[1].mode == hfvc::ContactMode::kSliding);
  CHECK(scene.contacts[1].slide_direction(0) == doctest::Approx(1.0));
  CHECK(scene.goal_rows.rows() == 1);
  CHECK(scene.goal_rhs(0) == doctest::Approx(0.25));
  CHECK(scene.external_force(1) == doctest::Approx(-9.8));
  CHECK(scene.n_min == doctest::Approx(0.25));
  CHECK(scene.ridge_count == 8);

  const hfvc::SystemModel model = hfvc::build_model(scene);
  CHECK(model.dof.n_u == 3);
  CHECK(model.dof.n_a == 3);
  CHECK(model.j.rows() == 3);  // sticking pair + sliding normal row
  CHECK(model.lambda_dim == 3);
  CHECK(model.guard.n_min == doctest::Approx(0.25));
}

TEST_CASE("defaults for optional sections") {
  const Scene scene = hfvc::parse_scene_text(R"({
    "schema_version": 1,
    "bodies": [{"name": "bot", "kind": "planar", "actuated": true}]
  })");
  CHECK(scene.contacts.empty());
  CHECK(scene.goal_rows.rows() == 0);
  CHECK(scene.external_force.size() == 0);
  CHECK(scene.n_min == doctest::Approx(0.5));
  CHECK(scene.ridge_count == 8);

  const hfvc::SystemModel model = hfvc::build_model(scene);
  CHECK(model.j.rows() == 0);
  CHECK(model.j.cols() == 3);
  CHECK(model.f_ext.norm() == 0.0);
}

TEST_CASE("schema violations carry json pointers") {
  expect_pointer("not json at all", "");
  expect_pointer("[1, 2]", "");
  expect_pointer(R"({"bodies": []})", "");  // missing schema_version
  expect_pointer(R"({"schema_version": 2, "bodies": []})", "/schema_version");
  expect_pointer(R"({"schema_version": 1})", "");
  expect_pointer(R"({"schema_version": 1, "bodies": []})", "/bodies");
  expect_pointer(R"({"schema_version": 1, "bodies": [], "extra": 0})", "/extra");

  expect_pointer(R"({"schema_version": 1,
    "bodies": [{"name": "a", "kind": "cube", "actuated": false}]})",
                 "/bodies/0/kind");
  expect_pointer(R"({"schema_version": 1,
    "bodies": [{"name": "a", "kind": "planar"}]})",
                 "/bodies/0");
  expect_pointer(R"({"schema_version": 1,
    "bodies": [{"name": "a", "kind": "planar", "actuated": false, "color": 1}]})",
                 "/bodies/0/color");
  expect_pointer(R"({"schema_version": 1,
    "bodies": [{"name": "a", "kind": "environment", "actuated": true}]})",
                 "/bodies/0/actuated");
  expect_pointer(R"({"schema_version": 1,
    "bodies": [{"name": "a", "kind": "planar", "actuated": false},
               {"name": "a", "kind": "planar", "actuated": true}]})",
                 "/bodies/1/name");
  expect_pointer(R"({"schema_version": 1,
    "bodies": [{"name": "a", "kind": "planar", "actuated": false},
               {"name": "b", "kind": "spatial", "actuated": true}]})",
                 "/bodies");
}

TEST_CASE("contact violations carry json pointers") {
  const std::string head = R"({"schema_version": 1,
    "bodies": [{"name": "a", "kind": "planar", "actuated": false},
               {"name": "b", "kind": "planar", "actuated": true}],
    "contacts": [)";
  const std::string tail = "]}";

  auto with_contact = [&](const std::string& c) { return head + c + tail; };

  expect_pointer(with_contact(R"({"position": [0, 0], "normal": [0, 1],
      "mode": "sticking", "mu": -0.5, "pair": ["a", "b"]})"),
                 "/contacts/0/mu");
  expect_pointer(with_contact(R"({"position": [0, 0], "normal": [0, 2],
      "mode": "sticking", "mu": 0.5, "pair": ["a", "b"]})"),
                 "/contacts/0/normal");
  expect_pointer(with_contact(R"({"position": [0, 0, 0], "normal": [0, 0, 1],
      "mode": "sticking", "mu": 0.5, "pair": ["a", "b"]})"),
                 "/contacts/0/position");
  expect_pointer(with_contact(R"({"position": [0, 0], "normal": [0, 1],
      "mode": "resting", "mu": 0.5, "pair": ["a", "b"]})"),
                 "/contacts/0/mode");
  expect_pointer(with_contact(R"({"position": [0, 0], "normal": [0, 1],
      "mode": "sliding", "mu": 0.5, "pair": ["a", "b"]})"),
                 "/contacts/0");
  expect_pointer(with_contact(R"({"position": [0, 0], "normal": [0, 1],
      "mode": "sliding", "direction": [0.6, 0.8], "mu": 0.5, "pair": ["a", "b"]})"),
                 "/contacts/0/direction");
  expect_pointer(with_contact(R"({"position": [0, 0], "normal": [0, 1],
      "mode": "sticking", "direction": [1, 0], "mu": 0.5, "pair": ["a", "b"]})"),
                 "/contacts/0/direction");
  expect_pointer(with_contact(R"({"position": [0, 0], "normal": [0, 1],
      "mode": "sticking", "mu": 0.5, "pair": ["a", "nope"]})"),
                 "/contacts/0/pair");
  expect_pointer(with_contact(R"({"position": [0, 0], "normal": [0, 1],
      "mode": "sticking", "mu": 0.5, "pair": ["a"]})"),
                 "/contacts/0/pair");
}

TEST_CASE("goal force and guard violations carry json pointers") {
  const std::string head = R"({"schema_version": 1,
    "bodies": [{"name": "b", "kind": "planar", "actuated": true}], )";

  expect_pointer(head + R"("goal": {"rows": [[1, 0, 0], [0, 1]], "rhs": [0, 0]}})",
                 "/goal/rows/1");
  expect_pointer(head + R"("goal": {"rows": [[1, 0]], "rhs": [0]}})", "/goal/rows");
  expect_pointer(head + R"("goal": {"rows": [[1, 0, 0]], "rhs": [0, 1]}})",
                 "/goal/rhs");
  expect_pointer(head + R"("goal": {"rows": [[1, 0, 0]]}})", "/goal");
  expect_pointer(head + R"("external_force": [1, 2]})", "/external_force");
  expect_pointer(head + R"("external_force": [1, "x", 2]})", "/external_force/1");
  expect_pointer(head + R"("guard": {"n_min": -1}})", "/guard/n_min");
  expect_pointer(head + R"("guard": {"ridge_count": 2}})", "/guard/ridge_count");
  expect_pointer(head + R"("guard": {"sides": 8}})", "/guard/sides");
}

TEST_CASE("scene files load from disk") {
  const std::string path = "scene_roundtrip_tmp.json";
  {
    std::ofstream out(path);
    out << kGoodScene;
  }
  const Scene scene = hfvc::load_scene_file(path);
  CHECK(scene.bodies.size() == 3);
  std::remove(path.c_str());

  CHECK_THROWS_AS(hfvc::load_scene_file("does_not_exist.json"), SceneError);
}

TEST_SUITE_END();
