#include "hfvc/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "hfvc/model.hpp"
#include "hfvc/qp.hpp"
#include "hfvc/rng.hpp"
#include "hfvc/verify.hpp"
#include "oracles.hpp"

using hfvc::DofPartition;
using hfvc::InfeasibleReason;
using hfvc::Mat;
using hfvc::SolveOptions;
using hfvc::SolveStatus;
using hfvc::SystemModel;
using hfvc::Vec;
using hfvc::VelocityDimMode;

namespace {

Mat rowmat(std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
  Mat m(r, c);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Vec colvec(std::initializer_list<double> vals) {
  Vec v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v(i++) = x;
  return v;
}

// Contact-free robot with an explicit goal; the force balance is trivially
// satisfiable, so solve() exercises the velocity path end to end.
SystemModel free_robot_model(int n_a, const Mat& g, const Vec& b_g) {
  SystemModel m;
  m.dof = {0, n_a};
  m.j = Mat(0, n_a);
  m.jf = Mat(0, n_a);
  m.g = g;
  m.b_g = b_g;
  m.f_ext = Vec::Zero(n_a);
  m.guard.lambda_mat = Mat(0, n_a);
  m.guard.b_lambda = Vec(0);
  m.lambda_dim = 0;
  return m;
}

// One vertical axis each for an unactuated block and an actuated pusher.
// Contact 0 sticks the block to the ground (force component lambda_g pushes
// the block up), contact 1 sticks the pusher on top of the block (lambda_h
// pushes the block down and the pusher up). Gravity pulls the block with w.
SystemModel press_model(double w, double floor) {
  SystemModel m;
  m.dof = {1, 1};
  const double s = 1.0 / std::sqrt(2.0);
  m.j = rowmat({{1.0, 0.0}, {-s, s}});
  m.jf = rowmat({{1.0, 0.0}, {-1.0, 1.0}});
  m.g = Mat(0, 2);
  m.b_g = Vec(0);
  m.f_ext = colvec({-w, 0.0});
  m.lambda_dim = 2;
  m.guard.lambda_mat = rowmat({{-1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}});
  m.guard.b_lambda = colvec({-floor, 0.0});
  m.guard.n_min = floor;
  return m;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("crashing index matches the closed form for two unit rows") {
  const Mat j = rowmat({{1.0, 0.0}});

  CHECK(hfvc::crashing_index(j, rowmat({{0.0, 1.0}})) == doctest::Approx(1.0));
  CHECK(std::isinf(hfvc::crashing_index(j, rowmat({{1.0, 0.0}}))));
  CHECK(std::isinf(hfvc::crashing_index(j, rowmat({{-0.25, 0.0}}))));

  for (double deg : {15.0, 30.0, 45.0, 60.0, 75.0}) {
    const double th = deg * M_PI / 180.0;
    const Mat c = rowmat({{std::cos(th), std::sin(th)}});
    const double got = hfvc::crashing_index(j, c);
    CHECK(std::abs(got - oracle::stacked_cond_2x2(th)) < 1e-9);
    // Row scaling must not matter.
    CHECK(hfvc::crashing_index(j, Mat(3.0 * c)) == doctest::Approx(got));
  }

  // Without contacts the index is the conditioning of c alone.
  CHECK(hfvc::crashing_index(Mat(0, 2), rowmat({{0.0, 2.0}})) ==
        doctest::Approx(1.0));
}

TEST_CASE("crashing index rejects degenerate inputs") {
  CHECK_THROWS_AS(hfvc::crashing_index(rowmat({{1.0, 0.0}}), Mat(0, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      hfvc::crashing_index(rowmat({{1.0, 0.0}}), rowmat({{0.0, 0.0}})),
      std::invalid_argument);
  CHECK_THROWS_AS(hfvc::crashing_index(rowmat({{1.0, 0.0, 0.0}}),
                                       rowmat({{1.0, 0.0}})),
                  std::invalid_argument);
}

TEST_CASE("crashing index is invariant under rotations of the control rows") {
  hfvc::Rng rng(11, 0, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat j = rng.normal_mat(2, 5);
    const Mat c = oracle::random_orthonormal_rows(rng, 2, 5);
    const Mat q = oracle::random_orthonormal_rows(rng, 2, 2);
    const double base = hfvc::crashing_index(j, c);
    const double rotated = hfvc::crashing_index(j, Mat(q * c));
    if (std::isinf(base)) {
      CHECK(std::isinf(rotated));
    } else {
      CHECK(std::abs(rotated - base) <= 1e-8 * std::max(1.0, base));
    }
  }
}

TEST_CASE("free robot motions span exactly the unpinned actuated directions") {
  const DofPartition free2{0, 2};
  const Mat all = hfvc::free_robot_motions(Mat(0, 2), free2);
  REQUIRE(all.rows() == 2);
  CHECK((all * all.transpose() - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-12);

  CHECK(hfvc::free_robot_motions(Mat::Identity(2, 2), free2).rows() == 0);

  const DofPartition split{1, 1};
  CHECK(hfvc::free_robot_motions(rowmat({{0.0, 1.0}}), split).rows() == 0);

  const Mat pinned_u = hfvc::free_robot_motions(rowmat({{1.0, 0.0}}), split);
  REQUIRE(pinned_u.rows() == 1);
  CHECK(pinned_u(0, 0) == 0.0);
  CHECK(std::abs(pinned_u(0, 1)) == doctest::Approx(1.0));

  // A coupling row leaves one joint motion whose unactuated part is zeroed.
  const double s = 1.0 / std::sqrt(2.0);
  const Mat coupled = hfvc::free_robot_motions(rowmat({{s, -s}}), split);
  REQUIRE(coupled.rows() == 1);
  CHECK(coupled(0, 0) == 0.0);
  CHECK(std::abs(coupled(0, 1)) == doctest::Approx(1.0));

  CHECK_THROWS_AS(hfvc::free_robot_motions(Mat(0, 3), split),
                  std::invalid_argument);
}

TEST_CASE("velocity stage solves a free reaching goal") {
  const DofPartition dof{0, 2};
  const Mat j(0, 2);
  const Mat g = rowmat({{1.0, 0.0}});
  const Vec b = colvec({2.0});

  SolveOptions minimal;
  const auto vs = hfvc::solve_velocity(j, g, b, dof, minimal);
  REQUIRE(vs.feasible);
  REQUIRE(vs.n_av == 1);
  REQUIRE(vs.c.rows() == 1);
  CHECK(std::abs(vs.c(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(vs.c(0, 1)) < 1e-12);
  REQUIRE(vs.w_av.size() == 1);
  CHECK(vs.w_av(0) == doctest::Approx(2.0 * vs.c(0, 0)));

  SolveOptions maximal;
  maximal.mode = VelocityDimMode::kMaximal;
  const auto vm = hfvc::solve_velocity(j, g, b, dof, maximal);
  REQUIRE(vm.feasible);
  CHECK(vm.n_av == 2);
  CHECK((vm.c * vm.c.transpose() - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-12);
  // v* = (2, 0), so the commanded speeds are its coordinates in the c basis.
  CHECK((vm.w_av - Vec(2.0 * vm.c.col(0))).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("velocity stage failure reasons are ordered and typed") {
  const DofPartition split{1, 1};
  const DofPartition free2{0, 2};

  for (VelocityDimMode mode :
       {VelocityDimMode::kMinimal, VelocityDimMode::kMaximal}) {
    SolveOptions opts;
    opts.mode = mode;

    // The robot is pinned but the goal asks the unactuated joint to move.
    const auto pinned = hfvc::solve_velocity(
        rowmat({{0.0, 1.0}}), rowmat({{1.0, 0.0}}), colvec({1.0}), split, opts);
    CHECK_FALSE(pinned.feasible);
    CHECK(pinned.reason == InfeasibleReason::kNecessaryCondition);

    // Everything is pinned; a nonzero goal rate conflicts with the contacts.
    const auto stuck =
        hfvc::solve_velocity(Mat::Identity(2, 2), rowmat({{1.0, 0.0}}),
                             colvec({1.0}), free2, opts);
    CHECK_FALSE(stuck.feasible);
    CHECK(stuck.reason == InfeasibleReason::kNoSpecialSolution);

    // A zero rate on the same pinned system is fine with no velocity control.
    const auto rest =
        hfvc::solve_velocity(Mat::Identity(2, 2), rowmat({{1.0, 0.0}}),
                             colvec({0.0}), free2, opts);
    REQUIRE(rest.feasible);
    CHECK(rest.n_av == 0);
    CHECK(rest.c.rows() == 0);
    CHECK(rest.w_av.size() == 0);
  }

  CHECK_THROWS_AS(
      hfvc::solve_velocity(Mat(0, 3), rowmat({{1.0, 0.0}}), colvec({1.0}),
                           free2, SolveOptions{}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      hfvc::solve_velocity(Mat(0, 2), rowmat({{1.0, 0.0}}), colvec({1.0, 2.0}),
                           free2, SolveOptions{}),
      std::invalid_argument);
}

TEST_CASE("coupled fixture distinguishes K deficiency from rank failure") {
  // A body rests on the ground at the origin while an actuated tip presses on
  // it from above along the line to p2. The only free motions rotate the body
  // about the ground point with the tip carried along, so the tip can steer
  // two directions but rotation about the press line itself needs none.
  const Eigen::Vector3d p2(0.3, 0.3, 1.0);
  std::vector<hfvc::Body> bodies{
      {"object", hfvc::BodyKind::kSpatial, false},
      {"tip", hfvc::BodyKind::kSpatialPoint, true},
      {"ground", hfvc::BodyKind::kEnvironment, false},
  };
  std::vector<hfvc::ContactPoint> contacts(2);
  contacts[0].position = colvec({0.0, 0.0, 0.0});
  contacts[0].normal = colvec({0.0, 0.0, 1.0});
  contacts[0].mu = 0.9;
  contacts[0].body_a = "object";
  contacts[0].body_b = "ground";
  contacts[1].position = p2;
  contacts[1].normal = -p2.normalized();
  contacts[1].mu = 0.8;
  contacts[1].body_a = "object";
  contacts[1].body_b = "tip";

  // Spinning about the press line moves neither contact point nor the tip.
  Mat g_spin = Mat::Zero(1, 9);
  g_spin.block(0, 3, 1, 3) = p2.normalized().transpose();
  const auto spin_model = hfvc::build_model(bodies, contacts, g_spin,
                                            colvec({0.7}), Vec(), 0.5, 8);
  CHECK_FALSE(spin_model.goal_redundant);

  SolveOptions minimal;
  const auto spin_min = hfvc::solve(spin_model, minimal);
  CHECK(spin_min.status == SolveStatus::kInfeasibleGoal);
  CHECK(spin_min.reason == InfeasibleReason::kKDeficient);
  CHECK(std::string(hfvc::infeasible_reason_name(spin_min.reason)) ==
        "K_deficient");

  SolveOptions maximal;
  maximal.mode = VelocityDimMode::kMaximal;
  const auto spin_max = hfvc::solve(spin_model, maximal);
  CHECK(spin_max.status == SolveStatus::kInfeasibleGoal);
  CHECK(spin_max.reason == InfeasibleReason::kRankCondition);
  CHECK(std::string(hfvc::infeasible_reason_name(spin_max.reason)) ==
        "rank_condition");

  // Lifting the midpoint of the press line is reachable by steering the tip.
  const Eigen::Vector3d com = 0.5 * p2;
  const Eigen::Vector3d lever = com.cross(Eigen::Vector3d::UnitZ());
  Mat g_lift = Mat::Zero(1, 9);
  g_lift(0, 2) = 1.0;
  g_lift.block(0, 3, 1, 3) = lever.transpose();
  const auto lift_model = hfvc::build_model(bodies, contacts, g_lift,
                                            colvec({0.4}), Vec(), 0.5, 8);

  const auto lift_min = hfvc::solve(lift_model, minimal);
  REQUIRE(lift_min.status == SolveStatus::kSolved);
  CHECK(lift_min.n_av == 1);
  CHECK(lift_min.n_af == 2);
  CHECK(std::isfinite(lift_min.crashing_index));
  CHECK(hfvc::check_solution(lift_model, lift_min).passes());

  const auto lift_max = hfvc::solve(lift_model, maximal);
  REQUIRE(lift_max.status == SolveStatus::kSolved);
  CHECK(lift_max.n_av == 2);
  CHECK(lift_max.n_af == 1);
  CHECK(hfvc::check_solution(lift_model, lift_max).passes());
}

TEST_CASE("tilting scene at the initial pose") {
  // A cube of side L rests on a table with one bottom edge on the world
  // y axis; a point hand presses down at the center of the top face. The one
  // free motion rolls the cube about that edge. The goal commands the full
  // object twist of that roll.
  const double kL = 0.075;
  const double kWeight = 2.5;
  const double rate = 0.3;

  std::vector<hfvc::Body> bodies{
      {"object", hfvc::BodyKind::kSpatial, false},
      {"hand", hfvc::BodyKind::kSpatialPoint, true},
      {"table", hfvc::BodyKind::kEnvironment, false},
  };
  std::vector<hfvc::ContactPoint> contacts(3);
  for (int i = 0; i < 2; ++i) {
    contacts[i].position = colvec({0.0, (i == 0 ? -0.5 : 0.5) * kL, 0.0});
    contacts[i].normal = colvec({0.0, 0.0, 1.0});
    contacts[i].mu = 0.6;
    contacts[i].body_a = "object";
    contacts[i].body_b = "table";
  }
  contacts[2].position = colvec({0.5 * kL, 0.0, kL});
  contacts[2].normal = colvec({0.0, 0.0, -1.0});
  contacts[2].mu = 0.8;
  contacts[2].body_a = "object";
  contacts[2].body_b = "hand";

  Mat g = Mat::Zero(6, 9);
  g.leftCols(6) = Mat::Identity(6, 6);
  Vec b_g = Vec::Zero(6);
  b_g(4) = -rate;

  // Gravity at the cube center, reduced to the world origin.
  Vec f_ext = Vec::Zero(9);
  f_ext(2) = -kWeight;
  f_ext(4) = kWeight * 0.5 * kL;

  const auto model =
      hfvc::build_model(bodies, contacts, g, b_g, f_ext, 0.5, 8);
  CHECK(model.goal_redundant);  // six goal rows, one reachable direction

  const Mat ubar = hfvc::free_robot_motions(model.j, model.dof);
  REQUIRE(ubar.rows() == 1);
  const Eigen::Vector3d roll_dir =
      Eigen::Vector3d(kL, 0.0, -0.5 * kL).normalized();
  CHECK(std::abs(ubar.row(0).tail(3).dot(roll_dir)) == doctest::Approx(1.0));

  const auto sol = hfvc::solve(model);
  REQUIRE(sol.status == SolveStatus::kSolved);
  CHECK(sol.n_av == 1);
  CHECK(sol.n_af == 2);
  CHECK(std::isfinite(sol.crashing_index));
  CHECK(sol.crashing_index >= 1.0);
  CHECK(hfvc::check_solution(model, sol).passes());

  // The hand rides the rolling edge: speed rate * |(L, 0, -L/2)|.
  REQUIRE(sol.w_av.size() == 1);
  CHECK(std::abs(sol.w_av(0)) ==
        doctest::Approx(rate * kL * std::sqrt(1.25)));

  // Contact-force layout: three components per contact, normal last. All
  // normals must sit on or above the floor.
  REQUIRE(sol.lambda.size() == 9);
  for (int contact = 0; contact < 3; ++contact) {
    CHECK(sol.lambda(3 * contact + 2) >= 0.5 - 1e-7);
  }
  CHECK(sol.timings.velocity_us >= 0.0);
  CHECK(sol.timings.force_us >= 0.0);
}

TEST_CASE("axis completion embeds the velocity rows unchanged") {
  const DofPartition dof{2, 3};
  const Mat c = rowmat({{0.0, 0.0, 1.0, 0.0, 0.0}});
  const auto ax = hfvc::complete_axes(c, dof);
  CHECK(ax.n_af == 2);
  REQUIRE(ax.r_a.rows() == 3);
  CHECK(ax.r_a.row(2) == c.row(0).tail(3));
  CHECK((ax.r_a * ax.r_a.transpose() - Mat::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK(std::abs(ax.r_a(0, 0)) < 1e-12);
  CHECK(std::abs(ax.r_a(1, 0)) < 1e-12);
  REQUIRE(ax.t.rows() == 5);
  CHECK(ax.t.topLeftCorner(2, 2) == Mat::Identity(2, 2));
  CHECK(ax.t.bottomRows(1) == c);
  CHECK((ax.t * ax.t.transpose() - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() <
        1e-12);

  // All actuated directions under velocity control.
  const DofPartition flat{0, 2};
  const Mat swap = rowmat({{0.0, 1.0}, {1.0, 0.0}});
  const auto full = hfvc::complete_axes(swap, flat);
  CHECK(full.n_af == 0);
  CHECK(full.r_a == swap);
  CHECK(full.t == swap);

  // No velocity control at all.
  const auto none = hfvc::complete_axes(Mat(0, 4), DofPartition{1, 3});
  CHECK(none.n_af == 3);
  CHECK(none.r_a == Mat::Identity(3, 3));
  CHECK(none.t == Mat::Identity(4, 4));

  CHECK_THROWS_AS(hfvc::complete_axes(Mat::Identity(2, 2), DofPartition{1, 1}),
                  std::invalid_argument);
}

TEST_CASE("force stage presses to the normal floor only when needed") {
  const Mat t2 = Mat::Identity(2, 2);

  // Heavy block: gravity alone keeps the ground contact above the floor, so
  // the cheapest valid press is no press at all.
  {
    const auto m = press_model(10.0, 0.5);
    const auto fs = hfvc::solve_force(m, t2, 1);
    REQUIRE(fs.feasible);
    CHECK(fs.lambda(0) == doctest::Approx(10.0));
    CHECK(fs.lambda(1) == doctest::Approx(0.0));
    REQUIRE(fs.eta_af.size() == 1);
    CHECK(fs.eta_af(0) == doctest::Approx(0.0));
  }

  // Light block: the press must make up the missing normal force, and the
  // hand feels the reaction.
  {
    const auto m = press_model(0.2, 0.5);
    const auto fs = hfvc::solve_force(m, t2, 1);
    REQUIRE(fs.feasible);
    CHECK(fs.lambda(0) == doctest::Approx(0.5));
    CHECK(fs.lambda(1) == doctest::Approx(0.3));
    CHECK(std::abs(fs.eta_af(0)) == doctest::Approx(0.3));

    // Exhaustive active-set reference over the same data.
    const int dim = 3;
    Mat a_eq = Mat::Zero(2, dim);
    a_eq.leftCols(2) = m.jf.transpose();
    a_eq(1, 2) = 1.0;
    const auto ref = oracle::qp_enumerate(
        Mat(2.0 * Mat::Identity(dim, dim)), Vec::Zero(dim), a_eq,
        Vec(-m.f_ext), m.guard.lambda_mat, m.guard.b_lambda);
    REQUIRE(ref.feasible);
    Vec got(3);
    got << fs.lambda(0), fs.lambda(1), fs.eta_a(0);
    CHECK((got - ref.x).cwiseAbs().maxCoeff() < 1e-6);
  }

  // An iteration budget of zero must surface as an error, not infeasibility.
  {
    hfvc::QpOptions qo;
    qo.max_iter = 0;
    CHECK_THROWS_AS(hfvc::solve_force(press_model(0.2, 0.5), t2, 1, qo),
                    std::runtime_error);
  }

  // A contradictory guard turns the whole solve into guard_infeasible.
  {
    auto m = press_model(10.0, 0.5);
    Mat guard = Mat::Zero(3, 3);
    guard.topRows(2) = m.guard.lambda_mat;
    guard(2, 0) = 1.0;  // lambda_g <= -1, impossible under the balance
    m.guard.lambda_mat = guard;
    Vec b = Vec(3);
    b << m.guard.b_lambda(0), m.guard.b_lambda(1), -1.0;
    m.guard.b_lambda = b;
    CHECK_FALSE(hfvc::solve_force(m, t2, 1).feasible);
    const auto sol = hfvc::solve(m);
    CHECK(sol.status == SolveStatus::kGuardInfeasible);
    CHECK(std::string(hfvc::solve_status_name(sol.status)) ==
          "guard_infeasible");
  }
}

TEST_CASE("full solve on a free robot yields unit conditioning") {
  const auto model = free_robot_model(2, rowmat({{1.0, 0.0}}), colvec({1.0}));
  const auto sol = hfvc::solve(model);
  REQUIRE(sol.status == SolveStatus::kSolved);
  CHECK(sol.n_av == 1);
  CHECK(sol.n_af == 1);
  CHECK(sol.crashing_index == doctest::Approx(1.0));
  CHECK(sol.lambda.size() == 0);
  REQUIRE(sol.eta_a.size() == 2);
  CHECK(sol.eta_a.cwiseAbs().maxCoeff() < 1e-9);

  const auto check = hfvc::check_solution(model, sol);
  CHECK(check.passes());
  CHECK(check.guard_slack_min == hfvc::kInf);
  CHECK(check.unactuated_leak == 0.0);

  CHECK(std::string(hfvc::solve_status_name(sol.status)) == "solved");
}

TEST_CASE("solution checker flags broken solutions") {
  const auto model = free_robot_model(2, rowmat({{1.0, 0.0}}), colvec({1.0}));
  auto sol = hfvc::solve(model);
  REQUIRE(sol.status == SolveStatus::kSolved);

  auto wrong_rate = sol;
  wrong_rate.w_av(0) += 0.5;
  CHECK(hfvc::check_solution(model, wrong_rate).goal_special_residual > 0.1);
  CHECK_FALSE(hfvc::check_solution(model, wrong_rate).passes());

  auto skewed = sol;
  skewed.c(0, 0) += 0.1;
  skewed.t.bottomRows(1) = skewed.c;
  CHECK(hfvc::check_solution(model, skewed).c_orthonormality > 1e-3);

  auto torn = sol;
  torn.t(1, 1) += 1.0;  // t no longer carries c in its bottom rows
  CHECK_FALSE(hfvc::check_solution(model, torn).structure_ok);

  auto unsolved = sol;
  unsolved.status = SolveStatus::kGuardInfeasible;
  CHECK_THROWS_AS(hfvc::check_solution(model, unsolved),
                  std::invalid_argument);
}

TEST_CASE("solve validates its options") {
  const auto model = free_robot_model(2, rowmat({{1.0, 0.0}}), colvec({1.0}));
  SolveOptions opts;
  opts.ill_conditioned_threshold = 1.0;
  CHECK_THROWS_AS(hfvc::solve(model, opts), std::invalid_argument);
}

TEST_CASE("status and reason names are stable") {
  CHECK(std::string(hfvc::solve_status_name(SolveStatus::kSolved)) ==
        "solved");
  CHECK(std::string(hfvc::solve_status_name(SolveStatus::kInfeasibleGoal)) ==
        "infeasible_goal");
  CHECK(std::string(hfvc::solve_status_name(SolveStatus::kGuardInfeasible)) ==
        "guard_infeasible");
  CHECK(std::string(hfvc::infeasible_reason_name(
            InfeasibleReason::kNecessaryCondition)) == "necessary_condition");
  CHECK(std::string(hfvc::infeasible_reason_name(
            InfeasibleReason::kRankCondition)) == "rank_condition");
  CHECK(std::string(hfvc::infeasible_reason_name(
            InfeasibleReason::kKDeficient)) == "K_deficient");
  CHECK(std::string(hfvc::infeasible_reason_name(
            InfeasibleReason::kNoSpecialSolution)) == "no_special_solution");
}

TEST_CASE("random problems keep every solved-solution invariant") {
  hfvc::Rng rng(77, 0, 0);
  int solved = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n_u = static_cast<int>(rng.uniform_int(0, 3));
    const int n_a = static_cast<int>(rng.uniform_int(1, 3));
    const DofPartition dof{n_u, n_a};
    const int n = dof.n();
    const int jr = static_cast<int>(rng.uniform_int(0, n));
    const Mat j = rng.normal_mat(jr, n);
    const int gr = static_cast<int>(rng.uniform_int(1, 2));
    const Mat g = rng.normal_mat(gr, n);

    // Target rate taken from an achievable motion so the goal stays
    // consistent with the contacts.
    const Mat nullspace = hfvc::null_rows(j);
    Vec v_target = Vec::Zero(n);
    if (nullspace.rows() > 0) {
      v_target = nullspace.transpose() * (nullspace * rng.normal_vec(n));
    }
    const Vec b_g = g * v_target;

    SystemModel model;
    model.dof = dof;
    model.j = j;
    model.jf = j;
    model.g = g;
    model.b_g = b_g;
    model.f_ext = Vec::Zero(n);
    model.lambda_dim = jr;
    model.guard.lambda_mat = Mat(0, jr + n_a);
    model.guard.b_lambda = Vec(0);

    const auto sol = hfvc::solve(model);
    if (sol.status != SolveStatus::kSolved) {
      CHECK(sol.status == SolveStatus::kInfeasibleGoal);
      continue;
    }
    ++solved;

    const Mat jg = hfvc::vstack(j, g);
    CHECK(sol.n_av == hfvc::rank(jg) - hfvc::rank(j));
    CHECK(hfvc::check_solution(model, sol).passes());
    CHECK(sol.crashing_index >= 1.0 - 1e-9);

    // The commanded speeds come from the min-norm special solution.
    Vec rhs = Vec::Zero(jg.rows());
    rhs.tail(gr) = b_g;
    const Vec v_star = hfvc::min_norm_solve(jg, rhs);
    if (sol.n_av > 0) {
      CHECK((sol.c * v_star - sol.w_av).cwiseAbs().maxCoeff() < 1e-9);
    }

    // No alternative control of the same dimension conditions better.
    if (sol.n_av > 0 && std::isfinite(sol.crashing_index)) {
      const Mat ubar = hfvc::free_robot_motions(j, dof);
      const Mat k_full =
          hfvc::null_rows(Mat(hfvc::null_rows(jg) * ubar.transpose()));
      REQUIRE(k_full.rows() >= sol.n_av);
      for (int alt = 0; alt < 50; ++alt) {
        const Mat mix = oracle::random_orthonormal_rows(
            rng, sol.n_av, static_cast<int>(k_full.rows()));
        const Mat c_alt = mix * k_full * ubar;
        const double alt_index = hfvc::crashing_index(j, c_alt);
        CHECK(sol.crashing_index <= alt_index + 1e-6);
      }
    }

    // Maximal mode on the same model keeps the invariants too.
    SolveOptions maximal;
    maximal.mode = VelocityDimMode::kMaximal;
    const auto max_sol = hfvc::solve(model, maximal);
    if (max_sol.status == SolveStatus::kSolved) {
      CHECK(max_sol.n_av ==
            hfvc::free_robot_motions(j, dof).rows());
      CHECK(hfvc::check_solution(model, max_sol).passes());
    }
  }
  // Seeded generation keeps this deterministic; most draws must solve.
  CHECK(solved >= 15);
}

}  // TEST_SUITE
