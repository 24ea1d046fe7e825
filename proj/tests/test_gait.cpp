#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "test_util.hpp"
#include "wair/gait.hpp"
#include "wair/kinematics.hpp"

using namespace wair;

TEST_SUITE("gait") {

TEST_CASE("standing still: zero step length freezes the reference") {
  GaitConfig gait;
  gait.step_length = 0.0;
  gait.step_height = 0.0;  // no march-in-place lift either
  const SlopePlane flat{0.0, Eigen::Vector3d::Zero()};
  const RobotParams robot;
  const GaitReference ref(gait, flat, robot);

  const HROMState s0 = ref.state(0.0);
  for (double t : {0.31, 0.77, 1.4, 1.93}) {
    const HROMState st = ref.state(t);
    CHECK((st.p_b - s0.p_b).norm() < 1e-12);
    // Stance anchors under the hips never move, so joints are constant too.
    CHECK((st.q_L - s0.q_L).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK(ref.body_velocity().norm() == 0.0);
}

TEST_CASE("body reference geometry on a slope") {
  GaitConfig gait;
  const double th = 30.0 * M_PI / 180.0;
  const SlopePlane slope{th, Eigen::Vector3d::Zero()};
  const RobotParams robot;
  const GaitReference ref(gait, slope, robot);
  const Eigen::Matrix3d F = slope_frame(slope);

  // Constant speed along the up-slope tangent.
  const Eigen::Vector3d v = ref.body_velocity();
  CHECK(v.norm() == doctest::Approx(gait.body_speed()).epsilon(1e-12));
  CHECK((v - gait.body_speed() * F.col(0)).norm() < 1e-12);

  // Constant height above the plane.
  for (double t : {0.0, 0.5, 1.3, 2.0}) {
    const double height = F.col(2).dot(ref.body_position(t));
    CHECK(height == doctest::Approx(gait.body_height).epsilon(1e-12));
  }
  // Slope-aligned orientation.
  CHECK((ref.body_rotation() - F).norm() < 1e-14);
}

TEST_CASE("stance schedule matches phase offsets and duty factor") {
  GaitConfig gait;  // duty 0.8, offsets LF 0, RF 0.5, LH 0.75, RH 0.25
  const SlopePlane flat{0.0, Eigen::Vector3d::Zero()};
  const RobotParams robot;
  const GaitReference ref(gait, flat, robot);

  // Swing windows are [offset, offset + 0.2) of the cycle.
  CHECK_FALSE(ref.in_stance(kLF, 0.1));   // phase 0.05 in [0, 0.2)
  CHECK(ref.in_stance(kLF, 0.5));
  CHECK_FALSE(ref.in_stance(kRF, 1.1));   // phase 0.55
  CHECK(ref.in_stance(kRF, 0.1));
  CHECK_FALSE(ref.in_stance(kLH, 1.6));   // phase 0.8
  CHECK_FALSE(ref.in_stance(kRH, 0.6));   // phase 0.3

  // A crawl keeps at least three feet down at all times; over a full cycle
  // each leg swings exactly a 1 - duty fraction.
  int swing_samples = 0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const double t = gait.cycle_time * i / n;
    int down = 0;
    for (int leg = 0; leg < kNumLegs; ++leg)
      if (ref.in_stance(leg, t)) ++down;
    CHECK(down >= 3);
    if (!ref.in_stance(kLF, t)) ++swing_samples;
  }
  CHECK(std::abs(swing_samples / double(n) - (1.0 - gait.duty_factor)) < 0.01);
}

TEST_CASE("swing feet lift to the configured apex and land softly") {
  GaitConfig gait;
  const double th = 20.0 * M_PI / 180.0;
  const SlopePlane slope{th, Eigen::Vector3d::Zero()};
  const RobotParams robot;
  const GaitReference ref(gait, slope, robot);
  const Eigen::Vector3d normal = slope_frame(slope).col(2);

  // LF swings over [0, 0.4) s of each cycle.
  double max_height = -1.0;
  for (int i = 0; i <= 400; ++i) {
    const double t = 0.4 * i / 400.0;
    const double h = normal.dot(ref.foot_target(kLF, t));
    CHECK(h >= -1e-9);  // never below the surface
    max_height = std::max(max_height, h);
  }
  CHECK(max_height == doctest::Approx(gait.step_height).epsilon(1e-6));

  // Zero velocity at lift-off and touchdown, nonzero mid-swing.
  CHECK(ref.foot_target_velocity(kLF, 0.0).norm() < 1e-9);
  CHECK(ref.foot_target_velocity(kLF, 0.4 - 1e-12).norm() < 1e-6);
  CHECK(ref.foot_target_velocity(kLF, 0.2).norm() > 0.1);

  // During stance the target is frozen on the plane.
  const Eigen::Vector3d hold = ref.foot_target(kLF, 0.5);
  CHECK((ref.foot_target(kLF, 1.5) - hold).norm() < 1e-12);
  CHECK(std::abs(normal.dot(hold)) < 1e-12);
  CHECK(ref.foot_target_velocity(kLF, 1.0).norm() == 0.0);
}

TEST_CASE("swing target velocity matches finite differences") {
  GaitConfig gait;
  const SlopePlane slope{0.3, Eigen::Vector3d::Zero()};
  const RobotParams robot;
  const GaitReference ref(gait, slope, robot);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (double t : {0.05, 0.31, 0.62, 1.12, 1.55}) {
      // FD straddling a stance/swing switch is meaningless; test only points
      // whose neighborhood stays in one regime.
      if (ref.in_stance(leg, t - 1e-5) != ref.in_stance(leg, t + 1e-5))
        continue;
      const Eigen::VectorXd fd = test::central_diff(
          [&](double s) -> Eigen::VectorXd { return ref.foot_target(leg, s); },
          t, 1e-6);
      CHECK(test::rel_err(Eigen::VectorXd(ref.foot_target_velocity(leg, t)),
                          fd) < 1e-5);
    }
  }
}

TEST_CASE("reference states close the kinematic loop") {
  GaitConfig gait;
  const double th = 45.0 * M_PI / 180.0;
  const SlopePlane slope{th, Eigen::Vector3d::Zero()};
  const RobotParams robot;
  const GaitReference ref(gait, slope, robot);

  for (double t : {0.0, 0.13, 0.5, 0.9, 1.37, 2.0}) {
    const HROMState s = ref.state(t);
    CHECK(orthonormality_error(s.R_b) < 1e-12);
    for (int leg = 0; leg < kNumLegs; ++leg) {
      // Forward kinematics on the IK joints lands on the generator's target.
      CHECK((foot_position(s, robot, leg) - ref.foot_target(leg, t)).norm() <
            1e-9);
      // Joint rates reproduce the target velocity through the leg jacobian.
      const Eigen::Vector3d v_joint =
          s.R_b * leg_jacobian_body(s.leg(leg)) * s.dq_L.segment<3>(3 * leg);
      const Eigen::Vector3d v_body =
          s.dp_b + s.R_b * skew(s.w_b) *
                       (robot.hip_offsets.col(leg) +
                        leg_vector_body(s.leg(leg)));
      CHECK((v_body + v_joint - ref.foot_target_velocity(leg, t)).norm() <
            1e-6);
    }
  }
}

TEST_CASE("ik failure reports the leg") {
  GaitConfig gait;
  gait.body_height = 2.0;  // far beyond r_max = 0.7
  const SlopePlane flat{0.0, Eigen::Vector3d::Zero()};
  const RobotParams robot;
  const GaitReference ref(gait, flat, robot);
  CHECK_THROWS_WITH_AS(ref.state(0.5), doctest::Contains("leg"),
                       std::runtime_error);
}

TEST_CASE("node sampling matches the continuous reference") {
  GaitConfig gait;
  const SlopePlane slope{0.2, Eigen::Vector3d::Zero()};
  const RobotParams robot;
  CollocationGrid grid;
  grid.N = 11;
  grid.t_f = 2.0;

  GaitSchedule schedule;
  std::vector<StateVec> X_r;
  generate_gait_reference(gait, slope, robot, grid, &schedule, &X_r);
  REQUIRE(static_cast<int>(X_r.size()) == grid.N);
  REQUIRE(static_cast<int>(schedule.stance.size()) == grid.N);
  REQUIRE(static_cast<int>(schedule.foot_targets.size()) == grid.N);

  const GaitReference ref(gait, slope, robot);
  for (int k = 0; k < grid.N; ++k) {
    const double t = grid.node_time(k);
    CHECK((X_r[k] - ref.state(t).flatten()).cwiseAbs().maxCoeff() < 1e-12);
    for (int leg = 0; leg < kNumLegs; ++leg) {
      CHECK(schedule.stance[k][leg] == ref.in_stance(leg, t));
      CHECK((schedule.foot_targets[k].col(leg) - ref.foot_target(leg, t))
                .norm() < 1e-12);
    }
  }
}

}  // TEST_SUITE
