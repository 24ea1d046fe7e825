#pragma once

#include <Eigen/Dense>

#include "wair/types.hpp"

namespace wair {

// Compliant normal force plus velocity-dependent (Stribeck) tangential
// friction, evaluated in the frame of an inclined plane.
struct ContactParams {
  double k1 = 100.0;   // N/m spring
  double k2 = 1e3;     // N/(m/s) damper
  double mu_c = 1.0;   // Coulomb (dynamic) coefficient
  double mu_s = 1.8;   // static coefficient
  double mu_v = 0.1;   // N/(m/s) viscous coefficient
  double v_s = 0.05;   // m/s Stribeck velocity, > 0
  // Width of the tanh(v/eps) regularization used instead of sgn(v) when
  // smooth == true (closed-loop rollouts); the exact sgn form chatters under
  // explicit integration.
  double smooth_eps = 1e-3;
};

// Flat plane tilted by `angle` about the world y-axis (positive angle raises
// the +x direction), passing through `origin`.
struct SlopePlane {
  double angle = 0.0;  // rad, in [0, pi/2)
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
};

// Columns are the slope axes in world coordinates: up-slope tangent, lateral
// tangent (world y), outward normal.  Maps slope-frame vectors to world
// (v_world = R v_slope); identity at angle 0.
Eigen::Matrix3d slope_frame(const SlopePlane& plane);

// Velocity-dependent friction coefficient
//   s(v) = mu_c - (mu_c - mu_s) * exp(-v^2 / v_s^2),
// which equals mu_s at rest and approaches mu_c at speed.
double stribeck_coefficient(double v, const ContactParams& cp);

// World-frame contact force on a foot at foot_pos moving at foot_vel.  Zero
// when the foot is above the plane.  In the slope frame, with p/v the local
// position/velocity:
//   u_z = max(0, -k1 p_z - k2 v_z)
//   u_j = -s(v_j) u_z sgn(v_j) - mu_v v_j   for j in {x, y}
// `smooth` replaces sgn with tanh(v_j / smooth_eps).
Eigen::Vector3d contact_force(const Eigen::Vector3d& foot_pos,
                              const Eigen::Vector3d& foot_vel,
                              const SlopePlane& plane,
                              const ContactParams& cp, bool smooth = false);

// mu * u_z - sqrt(u_x^2 + u_y^2) for a slope-frame force; >= 0 means the
// force lies inside the friction cone.  Negative normal components report as
// violations through the same expression.
double friction_cone_margin(const Eigen::Vector3d& u_slope, double mu);

struct StaticFeasibility {
  bool feasible = false;
  // mu - F_t/F_n when the balance admits a solution; +inf when the net
  // non-GRF force vanishes (no contact force needed at all).
  double margin = 0.0;
  double normal_force = 0.0;      // required total normal GRF, N
  double tangential_force = 0.0;  // required total tangential GRF, N
};

// Quasi-static force balance on the slope: the total GRF must cancel gravity
// plus thrust.  Feasible iff the required normal force is positive and the
// tangential/normal ratio is within mu.  With no thrust this reduces to
// tan(angle) <= mu.
StaticFeasibility static_stance_feasibility(double slope_angle, double mu,
                                            const Eigen::Vector3d& thrust,
                                            const RobotParams& rp);

}  // namespace wair
