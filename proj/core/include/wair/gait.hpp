#pragma once

#include <array>
#include <vector>

#include "wair/collocation.hpp"
#include "wair/contact.hpp"
#include "wair/types.hpp"

namespace wair {

// Crawl gait timing and geometry.  Phase offsets are fractions of the cycle,
// indexed by LegId; each leg swings during [offset, offset + 1 - duty) of its
// phase.  Defaults stagger the legs LF-RH-RF-LH with one swing leg at a time.
struct GaitConfig {
  double cycle_time = 2.0;    // s
  double duty_factor = 0.8;   // stance fraction, in (0.5, 1)
  double step_length = 0.12;  // m per cycle, up-slope
  double step_height = 0.05;  // m swing apex above the plane
  std::array<double, kNumLegs> phase_offsets = {0.0, 0.5, 0.75, 0.25};
  double body_height = 0.45;  // m above the plane along its normal

  double body_speed() const { return step_length / cycle_time; }
};

// Node-sampled stance flags and world foot targets.
struct GaitSchedule {
  std::vector<std::array<bool, kNumLegs>> stance;
  std::vector<Eigen::Matrix<double, 3, kNumLegs>> foot_targets;
};

// Continuous-time kinematic reference: the body translates up-slope at
// constant speed and height with slope-aligned orientation; stance feet hold
// plane anchors laid symmetrically about the hip's stance-phase sweep; swing
// feet blend between anchors with a smoothstep in the plane and a C1 bell of
// the configured apex height along the normal (zero velocity at lift-off and
// touchdown).  Joint references come from closed-form inverse kinematics.
class GaitReference {
 public:
  GaitReference(const GaitConfig& gait, const SlopePlane& plane,
                const RobotParams& robot);

  bool in_stance(int leg, double t) const;
  Eigen::Vector3d foot_target(int leg, double t) const;
  Eigen::Vector3d foot_target_velocity(int leg, double t) const;

  Eigen::Vector3d body_position(double t) const;
  Eigen::Vector3d body_velocity() const;
  const Eigen::Matrix3d& body_rotation() const { return R_ref_; }

  // Full reference state; throws if a foot target is outside the prismatic
  // range (message names the leg).
  HROMState state(double t) const;

  const GaitConfig& config() const { return gait_; }

 private:
  // Stance anchor for the cycle whose touchdown happens at phase index n.
  Eigen::Vector3d anchor(int leg, long n) const;
  Eigen::Vector3d project_to_plane(const Eigen::Vector3d& q) const;

  GaitConfig gait_;
  SlopePlane plane_;
  RobotParams robot_;
  Eigen::Matrix3d R_ref_;   // slope frame, also the body reference rotation
  Eigen::Vector3d tangent_, normal_;
  Eigen::Vector3d p0_;      // body position at t = 0
};

// Sample the reference on the collocation grid.  X_r[k] is the flattened
// reference state at node k; the schedule carries stance flags and targets.
void generate_gait_reference(const GaitConfig& gait, const SlopePlane& plane,
                             const RobotParams& robot,
                             const CollocationGrid& grid,
                             GaitSchedule* schedule,
                             std::vector<StateVec>* X_r);

}  // namespace wair
