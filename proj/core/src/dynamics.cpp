#include "wair/dynamics.hpp"

#include "wair/kinematics.hpp"
#include "wair/so3.hpp"

namespace wair {

Eigen::Matrix<double, 6, 6> mass_inertia(const RobotParams& p) {
  Eigen::Matrix<double, 6, 6> M = Eigen::Matrix<double, 6, 6>::Zero();
  M.topLeftCorner<3, 3>() = p.mass * Eigen::Matrix3d::Identity();
  M.bottomRightCorner<3, 3>() = p.inertia;
  return M;
}

Eigen::Matrix<double, 6, 1> bias_forces(const HROMState& s,
                                        const RobotParams& p) {
  Eigen::Matrix<double, 6, 1> H;
  H.head<3>() = -p.mass * p.gravity;
  H.tail<3>() = s.w_b.cross(p.inertia * s.w_b);
  return H;
}

Eigen::Matrix<double, 6, 1> generalized_forces(const HROMState& s,
                                               const ControlInput& u,
                                               const RobotParams& p) {
  Eigen::Matrix<double, 6, 1> F;
  F.head<3>() = u.u_T;
  F.tail<3>().setZero();  // thrust acts at the COM, no moment
  for (int i = 0; i < kNumLegs; ++i) {
    const Eigen::Vector3d l = p.hip_offsets.col(i) + leg_vector_body(s.leg(i));
    F.head<3>() += u.u_g.col(i);
    F.tail<3>() += l.cross(s.R_b.transpose() * u.u_g.col(i));
  }
  return F;
}

StateVec f_rom(const HROMState& s, const ControlInput& u, const RobotParams& p) {
  const Eigen::Matrix<double, 6, 1> rhs =
      generalized_forces(s, u, p) - bias_forces(s, p);
  const Eigen::Vector3d ddp = rhs.head<3>() / p.mass;
  const Eigen::Vector3d dw = p.inertia.ldlt().solve(rhs.tail<3>());

  StateVec dx;
  dx.segment<12>(0) = s.dq_L;
  dx.segment<12>(12) = u.u_L;
  const Eigen::Matrix3d dR = s.R_b * skew(s.w_b);
  dx.segment<9>(24) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(dR.data());
  dx.segment<3>(33) = s.dp_b;
  dx.segment<3>(36) = dw;
  dx.segment<3>(39) = ddp;
  return dx;
}

double mechanical_energy(const HROMState& s, const RobotParams& p) {
  const double kinetic = 0.5 * p.mass * s.dp_b.squaredNorm() +
                         0.5 * s.w_b.dot(p.inertia * s.w_b);
  const double potential = -p.mass * s.p_b.dot(p.gravity);
  return kinetic + potential;
}

JointVec joint_torque_estimate(const HROMState& s,
                               const Eigen::Matrix<double, 3, kNumLegs>& u_g,
                               const RobotParams& p) {
  (void)p;
  JointVec tau;
  for (int i = 0; i < kNumLegs; ++i) {
    const Eigen::Matrix3d Jw = s.R_b * leg_jacobian_body(s.leg(i));
    tau.segment<3>(3 * i) = -Jw.transpose() * u_g.col(i);
  }
  return tau;
}

}  // namespace wair
