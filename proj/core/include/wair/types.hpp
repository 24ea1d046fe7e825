#pragma once

#include <array>
#include <Eigen/Dense>

namespace wair {

inline constexpr int kNumLegs = 4;
inline constexpr int kJointsPerLeg = 3;   // [phi, gamma, r]
inline constexpr int kNumJoints = kNumLegs * kJointsPerLeg;
inline constexpr int kStateDim = 42;      // q_L, dq_L, r_b, p_b, w_b, dp_b
inline constexpr int kInputDim = 27;      // u_L, u_g, u_T

// Leg indices. Fixed order everywhere (joint vectors, forces, gait tables).
enum LegId : int { kLF = 0, kRF = 1, kLH = 2, kRH = 3 };

using StateVec = Eigen::Matrix<double, kStateDim, 1>;
using InputVec = Eigen::Matrix<double, kInputDim, 1>;
using JointVec = Eigen::Matrix<double, kNumJoints, 1>;

struct RobotParams {
  double mass = 7.6;  // kg, body + thrusters
  Eigen::Matrix3d inertia =
      Eigen::Vector3d(0.0981867, 0.0844185, 0.164599).asDiagonal();
  // Hip mount points in the body frame, one column per leg (LF RF LH RH).
  Eigen::Matrix<double, 3, kNumLegs> hip_offsets =
      (Eigen::Matrix<double, 3, kNumLegs>() <<
           0.15, 0.15, -0.15, -0.15,
           0.10, -0.10, 0.10, -0.10,
           0.0, 0.0, 0.0, 0.0).finished();
  Eigen::Vector3d gravity = Eigen::Vector3d(0.0, 0.0, -9.81);

  double r_min = 0.1;   // m, prismatic travel
  double r_max = 0.7;
  double joint_angle_limit = 1.2;  // rad, |phi| and |gamma| box
  double u_T_max = 78.48;          // N, total thrust magnitude cap
  double u_T_max_per_fan = 19.62;  // N, single ducted fan (4 fans total)
};

// Joint state of one leg: hip pitch (about body y), hip roll (about body x),
// prismatic extension r >= 0 pointing down the leg.
struct LegJointState {
  double phi = 0.0;
  double gamma = 0.0;
  double r = 0.4;
};

// Reduced-order state: 12 actuated joints plus a single floating rigid body.
struct HROMState {
  JointVec q_L = JointVec::Zero();    // [phi, gamma, r] x 4 legs
  JointVec dq_L = JointVec::Zero();
  Eigen::Matrix3d R_b = Eigen::Matrix3d::Identity();  // body-to-world
  Eigen::Vector3d p_b = Eigen::Vector3d::Zero();      // world COM position
  Eigen::Vector3d w_b = Eigen::Vector3d::Zero();      // body-frame angular rate
  Eigen::Vector3d dp_b = Eigen::Vector3d::Zero();     // world COM velocity

  LegJointState leg(int i) const {
    return {q_L[3 * i], q_L[3 * i + 1], q_L[3 * i + 2]};
  }

  // Layout: [q_L(12); dq_L(12); r_b(9, columns of R_b); p_b(3); w_b(3); dp_b(3)].
  StateVec flatten() const;
  static HROMState unflatten(const StateVec& x);
};

// Stacked control: joint accelerations, per-foot world-frame ground reaction
// forces, and a world-frame thruster force acting at the COM.
struct ControlInput {
  JointVec u_L = JointVec::Zero();                     // ddq_L command
  Eigen::Matrix<double, 3, kNumLegs> u_g =
      Eigen::Matrix<double, 3, kNumLegs>::Zero();      // world GRF per foot
  Eigen::Vector3d u_T = Eigen::Vector3d::Zero();       // world thrust force

  // Layout: [u_L(12); u_g(12, foot-major xyz); u_T(3)].
  InputVec flatten() const;
  static ControlInput unflatten(const InputVec& u);
};

inline StateVec HROMState::flatten() const {
  StateVec x;
  x.segment<12>(0) = q_L;
  x.segment<12>(12) = dq_L;
  // Column-major copy of R_b; r_b holds the three body axes in world frame.
  x.segment<9>(24) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(R_b.data());
  x.segment<3>(33) = p_b;
  x.segment<3>(36) = w_b;
  x.segment<3>(39) = dp_b;
  return x;
}

inline HROMState HROMState::unflatten(const StateVec& x) {
  HROMState s;
  s.q_L = x.segment<12>(0);
  s.dq_L = x.segment<12>(12);
  s.R_b = Eigen::Map<const Eigen::Matrix3d>(x.segment<9>(24).data());
  s.p_b = x.segment<3>(33);
  s.w_b = x.segment<3>(36);
  s.dp_b = x.segment<3>(39);
  return s;
}

inline InputVec ControlInput::flatten() const {
  InputVec u;
  u.segment<12>(0) = u_L;
  u.segment<12>(12) = Eigen::Map<const Eigen::Matrix<double, 12, 1>>(u_g.data());
  u.segment<3>(24) = u_T;
  return u;
}

inline ControlInput ControlInput::unflatten(const InputVec& v) {
  ControlInput u;
  u.u_L = v.segment<12>(0);
  u.u_g = Eigen::Map<const Eigen::Matrix<double, 3, 4>>(v.segment<12>(12).data());
  u.u_T = v.segment<3>(24);
  return u;
}

}  // namespace wair
