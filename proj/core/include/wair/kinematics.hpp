#pragma once

#include "wair/types.hpp"

namespace wair {

// Hip-to-foot vector in the body frame:
//   l_f^b = R_y(phi) * R_x(gamma) * [0, 0, -r]^T
//         = [-r sin(phi) cos(gamma), r sin(gamma), -r cos(phi) cos(gamma)].
Eigen::Vector3d leg_vector_body(const LegJointState& j);

// d l_f^b / d (phi, gamma, r), columns in that order.
Eigen::Matrix3d leg_jacobian_body(const LegJointState& j);

// World-frame foot position: p_f = p_b + R_b (l_h^b + l_f^b).
Eigen::Vector3d foot_position(const HROMState& s, const RobotParams& p, int leg);

// Total derivative of foot_position along the current state rates:
//   dp_f = dp_b + R_b [w_b]x (l_h^b + l_f^b) + R_b J_leg dq_leg.
Eigen::Vector3d foot_velocity(const HROMState& s, const RobotParams& p, int leg);

// Derivative of the foot velocity w.r.t. the body twist [dp_b; w_b]: a 3x6
// block [ I | -R_b skew(l_h^b + l_f^b) ].  Its transpose maps a world-frame
// force at the foot into the body wrench used by the dynamics.
Eigen::Matrix<double, 3, 6> contact_map_body(const HROMState& s,
                                             const RobotParams& p, int leg);

// Recover (phi, gamma, r) from a body-frame hip-to-foot vector.  Valid when
// r > 0 and |gamma| < pi/2 (leg not folded through the hip roll singularity).
LegJointState leg_inverse_kinematics(const Eigen::Vector3d& l_fb);

// Joint rates that realize a desired body-frame foot velocity relative to the
// hip: dq = J_leg^{-1} * v_rel_body.
Eigen::Vector3d leg_rates_from_velocity(const LegJointState& j,
                                        const Eigen::Vector3d& v_rel_body);

}  // namespace wair
