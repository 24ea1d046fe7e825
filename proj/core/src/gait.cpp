#include "wair/gait.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "wair/kinematics.hpp"

namespace wair {

namespace {

double smoothstep(double s) { return s * s * (3.0 - 2.0 * s); }
double smoothstep_d(double s) { return 6.0 * s * (1.0 - s); }

// C1 bell on [0,1]: 0 at the ends, 1 at s = 0.5, zero slope at all three.
double bell(double s) {
  return s <= 0.5 ? smoothstep(2.0 * s) : smoothstep(2.0 - 2.0 * s);
}
double bell_d(double s) {
  return s <= 0.5 ? 2.0 * smoothstep_d(2.0 * s)
                  : -2.0 * smoothstep_d(2.0 - 2.0 * s);
}

}  // namespace

GaitReference::GaitReference(const GaitConfig& gait, const SlopePlane& plane,
                             const RobotParams& robot)
    : gait_(gait), plane_(plane), robot_(robot) {
  if (gait_.duty_factor <= 0.5 || gait_.duty_factor >= 1.0)
    throw std::invalid_argument("gait: duty factor must lie in (0.5, 1)");
  if (gait_.cycle_time <= 0.0)
    throw std::invalid_argument("gait: cycle time must be positive");
  R_ref_ = slope_frame(plane_);
  tangent_ = R_ref_.col(0);
  normal_ = R_ref_.col(2);
  p0_ = plane_.origin + gait_.body_height * normal_;
}

Eigen::Vector3d GaitReference::project_to_plane(const Eigen::Vector3d& q) const {
  return q - (q - plane_.origin).dot(normal_) * normal_;
}

Eigen::Vector3d GaitReference::body_position(double t) const {
  return p0_ + gait_.body_speed() * t * tangent_;
}

Eigen::Vector3d GaitReference::body_velocity() const {
  return gait_.body_speed() * tangent_;
}

bool GaitReference::in_stance(int leg, double t) const {
  const double theta =
      (t - gait_.phase_offsets[leg] * gait_.cycle_time) / gait_.cycle_time;
  const double phase = theta - std::floor(theta);
  return phase >= 1.0 - gait_.duty_factor;
}

Eigen::Vector3d GaitReference::anchor(int leg, long n) const {
  // Touchdown of cycle n; the foot lands half a stance-sweep ahead of the
  // hip so the hip passes over it symmetrically.
  const double t_td = (gait_.phase_offsets[leg] + static_cast<double>(n) +
                       (1.0 - gait_.duty_factor)) *
                      gait_.cycle_time;
  const Eigen::Vector3d hip =
      body_position(t_td) + R_ref_ * robot_.hip_offsets.col(leg);
  const double lead =
      0.5 * gait_.body_speed() * gait_.duty_factor * gait_.cycle_time;
  return project_to_plane(hip) + lead * tangent_;
}

Eigen::Vector3d GaitReference::foot_target(int leg, double t) const {
  const double theta =
      (t - gait_.phase_offsets[leg] * gait_.cycle_time) / gait_.cycle_time;
  const long n = static_cast<long>(std::floor(theta));
  const double phase = theta - std::floor(theta);
  const double swing = 1.0 - gait_.duty_factor;
  if (phase >= swing) return anchor(leg, n);
  const double s = phase / swing;
  const Eigen::Vector3d from = anchor(leg, n - 1);
  const Eigen::Vector3d to = anchor(leg, n);
  return from + smoothstep(s) * (to - from) +
         gait_.step_height * bell(s) * normal_;
}

Eigen::Vector3d GaitReference::foot_target_velocity(int leg, double t) const {
  const double theta =
      (t - gait_.phase_offsets[leg] * gait_.cycle_time) / gait_.cycle_time;
  const long n = static_cast<long>(std::floor(theta));
  const double phase = theta - std::floor(theta);
  const double swing = 1.0 - gait_.duty_factor;
  if (phase >= swing) return Eigen::Vector3d::Zero();
  const double s = phase / swing;
  const double ds_dt = 1.0 / (swing * gait_.cycle_time);
  const Eigen::Vector3d from = anchor(leg, n - 1);
  const Eigen::Vector3d to = anchor(leg, n);
  return (smoothstep_d(s) * (to - from) +
          gait_.step_height * bell_d(s) * normal_) *
         ds_dt;
}

HROMState GaitReference::state(double t) const {
  HROMState x;
  x.R_b = R_ref_;
  x.p_b = body_position(t);
  x.w_b.setZero();
  x.dp_b = body_velocity();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector3d foot = foot_target(leg, t);
    const Eigen::Vector3d l_fb =
        R_ref_.transpose() * (foot - x.p_b) - robot_.hip_offsets.col(leg);
    LegJointState j;
    try {
      j = leg_inverse_kinematics(l_fb);
    } catch (const std::exception& e) {
      throw std::runtime_error("gait reference: leg " + std::to_string(leg) +
                               " inverse kinematics failed: " + e.what());
    }
    if (j.r > robot_.r_max || j.r < robot_.r_min)
      throw std::runtime_error(
          "gait reference: leg " + std::to_string(leg) +
          " target outside prismatic range (r = " + std::to_string(j.r) + ")");
    x.q_L.segment<3>(3 * leg) = Eigen::Vector3d(j.phi, j.gamma, j.r);
    const Eigen::Vector3d v_rel =
        R_ref_.transpose() * (foot_target_velocity(leg, t) - x.dp_b);
    x.dq_L.segment<3>(3 * leg) = leg_rates_from_velocity(j, v_rel);
  }
  return x;
}

void generate_gait_reference(const GaitConfig& gait, const SlopePlane& plane,
                             const RobotParams& robot,
                             const CollocationGrid& grid,
                             GaitSchedule* schedule,
                             std::vector<StateVec>* X_r) {
  const GaitReference ref(gait, plane, robot);
  if (schedule) {
    schedule->stance.clear();
    schedule->foot_targets.clear();
    schedule->stance.reserve(grid.N);
    schedule->foot_targets.reserve(grid.N);
  }
  if (X_r) {
    X_r->clear();
    X_r->reserve(grid.N);
  }
  for (int k = 0; k < grid.N; ++k) {
    const double t = grid.node_time(k);
    if (schedule) {
      std::array<bool, kNumLegs> st;
      Eigen::Matrix<double, 3, kNumLegs> targets;
      for (int leg = 0; leg < kNumLegs; ++leg) {
        st[leg] = ref.in_stance(leg, t);
        targets.col(leg) = ref.foot_target(leg, t);
      }
      schedule->stance.push_back(st);
      schedule->foot_targets.push_back(targets);
    }
    if (X_r) X_r->push_back(ref.state(t).flatten());
  }
}

}  // namespace wair
