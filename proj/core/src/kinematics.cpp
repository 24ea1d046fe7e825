#include "wair/kinematics.hpp"

#include <cmath>
#include <stdexcept>

#include "wair/so3.hpp"

namespace wair {

Eigen::Vector3d leg_vector_body(const LegJointState& j) {
  const double sp = std::sin(j.phi), cp = std::cos(j.phi);
  const double sg = std::sin(j.gamma), cg = std::cos(j.gamma);
  return {-j.r * sp * cg, j.r * sg, -j.r * cp * cg};
}

Eigen::Matrix3d leg_jacobian_body(const LegJointState& j) {
  const double sp = std::sin(j.phi), cp = std::cos(j.phi);
  const double sg = std::sin(j.gamma), cg = std::cos(j.gamma);
  Eigen::Matrix3d J;
  J << -j.r * cp * cg, j.r * sp * sg, -sp * cg,
       0.0, j.r * cg, sg,
       j.r * sp * cg, j.r * cp * sg, -cp * cg;
  return J;
}

Eigen::Vector3d foot_position(const HROMState& s, const RobotParams& p, int leg) {
  const Eigen::Vector3d l = p.hip_offsets.col(leg) + leg_vector_body(s.leg(leg));
  return s.p_b + s.R_b * l;
}

Eigen::Vector3d foot_velocity(const HROMState& s, const RobotParams& p, int leg) {
  const LegJointState j = s.leg(leg);
  const Eigen::Vector3d l = p.hip_offsets.col(leg) + leg_vector_body(j);
  const Eigen::Vector3d dq = s.dq_L.segment<3>(3 * leg);
  return s.dp_b + s.R_b * (s.w_b.cross(l) + leg_jacobian_body(j) * dq);
}

Eigen::Matrix<double, 3, 6> contact_map_body(const HROMState& s,
                                             const RobotParams& p, int leg) {
  const Eigen::Vector3d l = p.hip_offsets.col(leg) + leg_vector_body(s.leg(leg));
  Eigen::Matrix<double, 3, 6> B;
  B.leftCols<3>() = Eigen::Matrix3d::Identity();
  B.rightCols<3>() = -s.R_b * skew(l);
  return B;
}

LegJointState leg_inverse_kinematics(const Eigen::Vector3d& l_fb) {
  const double r = l_fb.norm();
  if (r <= 0.0) throw std::invalid_argument("leg_inverse_kinematics: zero-length leg");
  const double sy = l_fb.y() / r;
  if (std::abs(sy) > 1.0 + 1e-12)
    throw std::invalid_argument("leg_inverse_kinematics: inconsistent vector");
  LegJointState j;
  j.r = r;
  j.gamma = std::asin(std::clamp(sy, -1.0, 1.0));
  j.phi = std::atan2(-l_fb.x(), -l_fb.z());
  return j;
}

Eigen::Vector3d leg_rates_from_velocity(const LegJointState& j,
                                        const Eigen::Vector3d& v_rel_body) {
  const Eigen::Matrix3d J = leg_jacobian_body(j);
  Eigen::FullPivLU<Eigen::Matrix3d> lu(J);
  if (!lu.isInvertible())
    throw std::runtime_error("leg_rates_from_velocity: singular leg jacobian");
  return lu.solve(v_rel_body);
}

}  // namespace wair
