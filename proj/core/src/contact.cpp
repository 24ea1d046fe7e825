#include "wair/contact.hpp"

#include <cmath>
#include <limits>

#include "wair/so3.hpp"

namespace wair {

Eigen::Matrix3d slope_frame(const SlopePlane& plane) {
  return rot_y(-plane.angle);
}

double stribeck_coefficient(double v, const ContactParams& cp) {
  return cp.mu_c - (cp.mu_c - cp.mu_s) * std::exp(-(v * v) / (cp.v_s * cp.v_s));
}

Eigen::Vector3d contact_force(const Eigen::Vector3d& foot_pos,
                              const Eigen::Vector3d& foot_vel,
                              const SlopePlane& plane,
                              const ContactParams& cp, bool smooth) {
  const Eigen::Matrix3d R = slope_frame(plane);
  const Eigen::Vector3d p = R.transpose() * (foot_pos - plane.origin);
  if (p.z() > 0.0) return Eigen::Vector3d::Zero();
  const Eigen::Vector3d v = R.transpose() * foot_vel;

  // Unilateral: the spring-damper never pulls the foot down.
  const double u_z = std::max(0.0, -cp.k1 * p.z() - cp.k2 * v.z());

  Eigen::Vector3d u(0.0, 0.0, u_z);
  for (int j = 0; j < 2; ++j) {
    const double vj = v[j];
    const double s = stribeck_coefficient(vj, cp);
    const double dir = smooth ? std::tanh(vj / cp.smooth_eps)
                              : (vj > 0.0 ? 1.0 : (vj < 0.0 ? -1.0 : 0.0));
    u[j] = -s * u_z * dir - cp.mu_v * vj;
  }
  return R * u;
}

double friction_cone_margin(const Eigen::Vector3d& u_slope, double mu) {
  return mu * u_slope.z() - std::hypot(u_slope.x(), u_slope.y());
}

StaticFeasibility static_stance_feasibility(double slope_angle, double mu,
                                            const Eigen::Vector3d& thrust,
                                            const RobotParams& rp) {
  // Total GRF required to hold the body still.
  const Eigen::Vector3d f_req = -rp.mass * rp.gravity - thrust;
  StaticFeasibility out;
  if (f_req.norm() < 1e-9) {
    // Thrust carries the full weight; no contact force needed.
    out.feasible = true;
    out.margin = std::numeric_limits<double>::infinity();
    return out;
  }
  SlopePlane plane;
  plane.angle = slope_angle;
  const Eigen::Vector3d f_local = slope_frame(plane).transpose() * f_req;
  out.normal_force = f_local.z();
  out.tangential_force = std::hypot(f_local.x(), f_local.y());
  if (out.normal_force <= 0.0) {
    out.feasible = false;
    out.margin = -std::numeric_limits<double>::infinity();
    return out;
  }
  const double ratio = out.tangential_force / out.normal_force;
  out.margin = mu - ratio;
  out.feasible = ratio <= mu;
  return out;
}

}  // namespace wair
