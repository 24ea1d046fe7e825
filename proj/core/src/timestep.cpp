#include "wair/timestep.hpp"

#include <cmath>

#include "wair/kinematics.hpp"

namespace wair {

namespace {

HROMState apply_flat_update(const HROMState& x, const StateVec& dx, double dt,
                            RotationUpdate rot) {
  HROMState out = HROMState::unflatten(x.flatten() + dt * dx);
  switch (rot) {
    case RotationUpdate::kExponential:
      out.R_b = x.R_b * exp_so3(dt * x.w_b);
      break;
    case RotationUpdate::kEulerReproject:
      out.R_b = project_so3(out.R_b);
      break;
    case RotationUpdate::kEulerRaw:
      break;
  }
  return out;
}

}  // namespace

HROMState euler_step(const HROMState& x, const ControlInput& u, double dt,
                     const RobotParams& p, RotationUpdate rot) {
  return apply_flat_update(x, f_rom(x, u, p), dt, rot);
}

HROMState rk4_step(const HROMState& x, const ControlInput& u, double dt,
                   const RobotParams& p) {
  const StateVec x0 = x.flatten();
  const StateVec k1 = f_rom(x, u, p);
  const StateVec k2 = f_rom(HROMState::unflatten(x0 + 0.5 * dt * k1), u, p);
  const StateVec k3 = f_rom(HROMState::unflatten(x0 + 0.5 * dt * k2), u, p);
  const StateVec k4 = f_rom(HROMState::unflatten(x0 + dt * k3), u, p);
  HROMState out =
      HROMState::unflatten(x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  out.R_b = project_so3(out.R_b);
  return out;
}

namespace {

void record_sample(Trajectory& traj, double t, const HROMState& x,
                   const StepCommand& cmd, const SlopePlane& plane,
                   const ContactParams& cp, const RobotParams& rp,
                   const RolloutOptions& opts,
                   Eigen::Matrix<double, 3, kNumLegs>* forces_out) {
  Eigen::Matrix<double, 3, kNumLegs> forces =
      Eigen::Matrix<double, 3, kNumLegs>::Zero();
  Eigen::Vector4d margins;
  const Eigen::Matrix3d Rs = slope_frame(plane);
  for (int i = 0; i < kNumLegs; ++i) {
    if (cmd.stance[i]) {
      forces.col(i) = contact_force(foot_position(x, rp, i),
                                    foot_velocity(x, rp, i), plane, cp,
                                    opts.smooth_friction);
    }
    margins[i] =
        friction_cone_margin(Rs.transpose() * forces.col(i), opts.cone_mu);
  }
  traj.times.push_back(t);
  traj.states.push_back(x);
  traj.contact_forces.push_back(forces);
  traj.cone_margins.push_back(margins);
  traj.torques.push_back(joint_torque_estimate(x, forces, rp));
  traj.energies.push_back(mechanical_energy(x, rp));
  if (forces_out) *forces_out = forces;
}

}  // namespace

RolloutResult rollout(const HROMState& x0, const Controller& controller,
                      const SlopePlane& plane, const ContactParams& cp,
                      const RobotParams& rp, std::size_t steps,
                      const RolloutOptions& opts) {
  RolloutResult result;
  Trajectory& traj = result.trajectory;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.inputs.reserve(steps);

  HROMState x = x0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * opts.dt;
    const StepCommand cmd = controller(t, x);
    Eigen::Matrix<double, 3, kNumLegs> forces;
    record_sample(traj, t, x, cmd, plane, cp, rp, opts, &forces);

    ControlInput u;
    u.u_L = cmd.u_L;
    u.u_g = forces;
    u.u_T = cmd.u_T;
    traj.inputs.push_back(u);

    x = opts.use_rk4 ? rk4_step(x, u, opts.dt, rp)
                     : euler_step(x, u, opts.dt, rp);

    const StateVec flat = x.flatten();
    if (!flat.allFinite() || flat.norm() > opts.divergence_norm) {
      result.diverged = true;
      result.divergence_step = k + 1;
      break;
    }
  }

  const double t_end = static_cast<double>(traj.inputs.size()) * opts.dt;
  record_sample(traj, t_end, x, controller(t_end, x), plane, cp, rp, opts,
                nullptr);
  return result;
}

}  // namespace wair
