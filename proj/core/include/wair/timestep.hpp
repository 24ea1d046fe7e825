#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "wair/contact.hpp"
#include "wair/dynamics.hpp"
#include "wair/so3.hpp"
#include "wair/types.hpp"

namespace wair {

// Time-stamped trajectory with per-sample diagnostics.  For closed-loop
// rollouts |inputs| == |times| - 1 (input k acts over [t_k, t_{k+1})); planned
// node trajectories carry one input per node instead.  Derived vectors are
// per-sample and may be empty when not recorded.
struct Trajectory {
  std::vector<double> times;
  std::vector<HROMState> states;
  std::vector<ControlInput> inputs;
  std::vector<Eigen::Matrix<double, 3, kNumLegs>> contact_forces;  // world frame
  std::vector<Eigen::Vector4d> cone_margins;
  std::vector<JointVec> torques;
  std::vector<double> energies;

  std::size_t size() const { return times.size(); }
};

// One explicit Euler step x + dt * f_rom(x, u).  The rotation block is
// advanced per `rot`: the default uses the exponential map (exact on SO(3));
// kEulerReproject applies the literal vector update and then polar-projects;
// kEulerRaw leaves the drift in place.
HROMState euler_step(const HROMState& x, const ControlInput& u, double dt,
                     const RobotParams& p,
                     RotationUpdate rot = RotationUpdate::kExponential);

// Classical RK4 with the input frozen across the step; the rotation block is
// polar-projected back onto SO(3) afterwards.
HROMState rk4_step(const HROMState& x, const ControlInput& u, double dt,
                   const RobotParams& p);

// Per-step command from a controller: joint accelerations, thruster force,
// and which feet the gait expects on the ground.  Ground reaction forces are
// not commanded - stance feet get the compliant contact model's force, swing
// feet get zero.
struct StepCommand {
  JointVec u_L = JointVec::Zero();
  Eigen::Vector3d u_T = Eigen::Vector3d::Zero();
  std::array<bool, kNumLegs> stance = {true, true, true, true};
};

using Controller = std::function<StepCommand(double t, const HROMState& x)>;

struct RolloutOptions {
  double dt = 1e-3;
  bool smooth_friction = true;   // tanh-regularized Stribeck inside the loop
  bool use_rk4 = false;          // default is the explicit Euler scheme
  double divergence_norm = 1e6;  // flat-state norm that flags blow-up
  double cone_mu = 1.0;          // coefficient for the recorded cone margins
};

struct RolloutResult {
  Trajectory trajectory;
  bool diverged = false;
  std::size_t divergence_step = 0;  // first step index past the norm bound
};

// Integrate the closed loop from x0 for `steps` steps of opts.dt, querying
// the controller at each step start.  Records contact forces, cone margins
// (slope frame), static joint loads, and mechanical energy per sample.
RolloutResult rollout(const HROMState& x0, const Controller& controller,
                      const SlopePlane& plane, const ContactParams& cp,
                      const RobotParams& rp, std::size_t steps,
                      const RolloutOptions& opts = {});

}  // namespace wair
