#pragma once

#include "wair/types.hpp"

namespace wair {

// Block-diagonal mass-inertia over the body twist [dp_b; w_b]: legs are
// massless, so M = blkdiag(m I3, J_b) independent of configuration.
Eigen::Matrix<double, 6, 6> mass_inertia(const RobotParams& p);

// Bias term H such that M [ddp_b; dw_b] + H = generalized_forces:
//   H = [-m g; w_b x (J_b w_b)].
Eigen::Matrix<double, 6, 1> bias_forces(const HROMState& s,
                                        const RobotParams& p);

// Sum of per-foot contact wrenches (world force, body-frame moment about the
// COM via the contact map transpose) plus the thruster force at the COM.
Eigen::Matrix<double, 6, 1> generalized_forces(const HROMState& s,
                                               const ControlInput& u,
                                               const RobotParams& p);

// State derivative of the reduced-order model.  Legs are massless and
// acceleration-driven (d/dt dq_L = u_L); the floating body sees the sum of
// ground reaction forces, the thruster resultant, and gravity:
//   m p''_b              = sum_i u_g_i + u_T + m g
//   J w'_b + w x (J w_b) = sum_i l_i x (R_b^T u_g_i)
// with l_i the body-frame hip-to-foot vector of leg i.  Output layout matches
// HROMState::flatten().
StateVec f_rom(const HROMState& s, const ControlInput& u, const RobotParams& p);

// Kinetic plus gravitational potential energy of the floating body:
//   E = 1/2 m |dp_b|^2 + 1/2 w^T J w - m p_b . g
double mechanical_energy(const HROMState& s, const RobotParams& p);

// Static joint loads for the massless legs: tau = -J_w^T u_g per leg, where
// J_w = R_b * d l_f^b / d(phi, gamma, r) is the world foot jacobian.  Rows
// follow the q_L layout ([phi, gamma, r] x 4); hip channels are N*m, the
// prismatic channel is N.
JointVec joint_torque_estimate(const HROMState& s,
                               const Eigen::Matrix<double, 3, kNumLegs>& u_g,
                               const RobotParams& p);

}  // namespace wair
