#include "wair/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "wair/csv.hpp"
#include "wair/dynamics.hpp"
#include "wair/kinematics.hpp"

namespace wair {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

std::vector<std::string> trajectory_header() {
  std::vector<std::string> h;
  h.emplace_back("t");
  const char* axes[] = {"x", "y", "z"};
  for (auto a : axes) h.push_back(std::string("p_b_") + a);
  for (int i = 0; i < 9; ++i) h.push_back("r_b_" + std::to_string(i));
  for (auto a : axes) h.push_back(std::string("omega_b_") + a);
  for (auto a : axes) h.push_back(std::string("dp_b_") + a);
  for (int i = 0; i < 12; ++i) h.push_back("q_L_" + std::to_string(i));
  for (int i = 0; i < 12; ++i) h.push_back("dq_L_" + std::to_string(i));
  for (int i = 0; i < 12; ++i) h.push_back("u_L_" + std::to_string(i));
  for (int i = 0; i < 12; ++i) h.push_back("u_g_" + std::to_string(i));
  for (auto a : axes) h.push_back(std::string("u_T_") + a);
  for (int i = 0; i < 4; ++i) h.push_back("cone_margin_" + std::to_string(i));
  for (int i = 0; i < 12; ++i) h.push_back("torque_" + std::to_string(i));
  h.emplace_back("energy");
  return h;
}

std::vector<double> trajectory_row(double t, const HROMState& x,
                                   const ControlInput& u,
                                   const Eigen::Vector4d& margins,
                                   const JointVec& torque, double energy) {
  std::vector<double> row;
  row.reserve(87);
  row.push_back(t);
  for (int i = 0; i < 3; ++i) row.push_back(x.p_b[i]);
  const Eigen::Map<const Eigen::Matrix<double, 9, 1>> rb(x.R_b.data());
  for (int i = 0; i < 9; ++i) row.push_back(rb[i]);
  for (int i = 0; i < 3; ++i) row.push_back(x.w_b[i]);
  for (int i = 0; i < 3; ++i) row.push_back(x.dp_b[i]);
  for (int i = 0; i < 12; ++i) row.push_back(x.q_L[i]);
  for (int i = 0; i < 12; ++i) row.push_back(x.dq_L[i]);
  for (int i = 0; i < 12; ++i) row.push_back(u.u_L[i]);
  const Eigen::Map<const Eigen::Matrix<double, 12, 1>> ug(u.u_g.data());
  for (int i = 0; i < 12; ++i) row.push_back(ug[i]);
  for (int i = 0; i < 3; ++i) row.push_back(u.u_T[i]);
  for (int i = 0; i < 4; ++i) row.push_back(margins[i]);
  for (int i = 0; i < 12; ++i) row.push_back(torque[i]);
  row.push_back(energy);
  return row;
}

Eigen::Vector4d node_margins(const Eigen::Matrix3d& Rs, const ControlInput& u,
                             double mu) {
  Eigen::Vector4d m;
  for (int leg = 0; leg < kNumLegs; ++leg)
    m[leg] = friction_cone_margin(Rs.transpose() * u.u_g.col(leg), mu);
  return m;
}

}  // namespace

WairProblem build_wair_problem(const ScenarioConfig& config) {
  WairProblem out;
  out.plane.angle = config.slope_deg * kDegToRad;
  out.plane.origin.setZero();

  CollocationGrid grid;
  grid.N = config.N;
  grid.t_f = config.t_f;

  generate_gait_reference(config.gait, out.plane, config.robot, grid,
                          &out.schedule, &out.reference);

  TranscriptionData data;
  data.grid = grid;
  data.robot = config.robot;
  data.weights = config.weights;
  data.plane = out.plane;
  data.reference = out.reference;
  data.stance = out.schedule.stance;
  data.cone_mu = config.cone_mu;
  data.thrust_enabled = config.thrust_enabled;
  data.u_T_max = config.robot.u_T_max;
  data.u_L_box = config.u_L_box;
  data.boundary.x_init = out.reference.front();
  data.boundary.tangent = slope_frame(out.plane).col(0);
  data.boundary.progress_target =
      config.gait.step_length * config.t_f / config.gait.cycle_time;
  data.boundary.zero_terminal_angular_rate = config.zero_terminal_angular_rate;
  data.boundary.zero_terminal_linear_rate = config.zero_terminal_linear_rate;
  out.progress_target = data.boundary.progress_target;

  auto prob = std::make_shared<TranscribedProblem>(std::move(data));
  out.transcription = prob;

  if (!config.thrust_enabled) {
    const auto feas = static_stance_feasibility(
        out.plane.angle, config.cone_mu, Eigen::Vector3d::Zero(), config.robot);
    out.static_infeasibility_warning = !feas.feasible;
  }

  // Initial guess: the kinematic reference, weight shared equally among
  // stance feet, thrust preloaded to half the weight when enabled.
  const int N = grid.N;
  std::vector<StateVec> X0 = out.reference;
  std::vector<InputVec> U0(N, InputVec::Zero());
  const Eigen::Vector3d u_T0 =
      config.thrust_enabled
          ? Eigen::Vector3d(0.0, 0.0,
                            0.5 * config.robot.mass *
                                config.robot.gravity.norm())
          : Eigen::Vector3d::Zero();
  for (int k = 0; k < N; ++k) {
    int stance_count = 0;
    for (bool s : out.schedule.stance[k]) stance_count += s ? 1 : 0;
    const Eigen::Vector3d share =
        (-config.robot.mass * config.robot.gravity - u_T0) /
        std::max(1, stance_count);
    ControlInput u;
    u.u_T = u_T0;
    for (int leg = 0; leg < kNumLegs; ++leg)
      if (out.schedule.stance[k][leg]) u.u_g.col(leg) = share;
    U0[k] = u.flatten();
  }
  Eigen::VectorXd y0 = prob->pack(X0, U0, config.t_f);

  if (config.seed != 0) {
    std::mt19937 rng(config.seed);
    std::uniform_real_distribution<double> dist(-1e-3, 1e-3);
    const Eigen::VectorXd s = prob->scaling();
    for (int i = 0; i + 1 < y0.size(); ++i) {  // leave t_f untouched
      if (prob->lower_bounds()[i] == prob->upper_bounds()[i]) continue;
      y0[i] = std::clamp(y0[i] + dist(rng) * s[i], prob->lower_bounds()[i],
                         prob->upper_bounds()[i]);
    }
  }

  NLPProblem& nlp = out.nlp;
  nlp.n = prob->num_vars();
  nlp.objective = [prob](const Eigen::VectorXd& Y) {
    return prob->tracking_cost(Y);
  };
  nlp.gradient = [prob](const Eigen::VectorXd& Y) {
    Eigen::VectorXd g;
    prob->tracking_cost(Y, &g);
    return g;
  };
  nlp.ls_residual = [prob](const Eigen::VectorXd& Y) {
    return prob->ls_residual(Y);
  };
  nlp.ls_jacobian = [prob](const Eigen::VectorXd&, const std::vector<char>*) {
    return prob->ls_jacobian();
  };
  nlp.equality = [prob](const Eigen::VectorXd& Y) {
    return prob->equality_constraints(Y);
  };
  nlp.equality_jacobian = [prob](const Eigen::VectorXd& Y,
                                 const std::vector<char>* skip) {
    return prob->equality_jacobian(Y, skip);
  };
  nlp.inequality = [prob](const Eigen::VectorXd& Y) {
    return prob->path_inequalities(Y);
  };
  nlp.inequality_jacobian = [prob](const Eigen::VectorXd& Y,
                                   const std::vector<char>* skip) {
    return prob->inequality_jacobian(Y, skip);
  };
  nlp.lb = prob->lower_bounds();
  nlp.ub = prob->upper_bounds();
  nlp.scaling = prob->scaling();
  nlp.y0 = y0;
  return out;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  WairProblem wp = build_wair_problem(config);
  ScenarioResult res;
  res.schedule = wp.schedule;
  res.plane = wp.plane;
  res.progress_target = wp.progress_target;
  res.static_infeasibility_warning = wp.static_infeasibility_warning;
  if (wp.static_infeasibility_warning)
    std::fprintf(stderr,
                 "warning: slope %.1f deg with thrust disabled fails the "
                 "quasi-static friction balance; expect non-convergence\n",
                 config.slope_deg);

  res.report = solve(wp.nlp, config.solver);

  const TranscribedProblem& tp = *wp.transcription;
  double t_f = config.t_f;
  tp.unpack(res.report.y, res.X, res.U, &t_f);
  const int N = config.N;
  CollocationGrid grid;
  grid.N = N;
  grid.t_f = t_f;
  const Eigen::Matrix3d Rs = slope_frame(wp.plane);
  const Eigen::Vector3d tangent = Rs.col(0);

  // Plan metrics.
  {
    const Eigen::Vector3d p0 = res.X.front().segment<3>(33);
    const Eigen::Vector3d pN = res.X.back().segment<3>(33);
    res.progress_plan = (pN - p0).dot(tangent);
  }
  res.min_cone_margin_nodes = std::numeric_limits<double>::infinity();
  res.mean_thrust = 0.0;
  res.peak_thrust = 0.0;
  res.peak_stance_torque = 0.0;
  res.peak_front_torque = 0.0;
  std::vector<Eigen::Vector4d> plan_margins(N);
  std::vector<JointVec> plan_torques(N);
  for (int k = 0; k < N; ++k) {
    const HROMState x = HROMState::unflatten(res.X[k]);
    const ControlInput u = ControlInput::unflatten(res.U[k]);
    plan_margins[k] = node_margins(Rs, u, config.cone_mu);
    plan_torques[k] = joint_torque_estimate(x, u.u_g, config.robot);
    const double thrust = u.u_T.norm();
    res.mean_thrust += thrust / N;
    res.peak_thrust = std::max(res.peak_thrust, thrust);
    for (int leg = 0; leg < kNumLegs; ++leg) {
      if (!wp.schedule.stance[k][leg]) continue;
      res.min_cone_margin_nodes =
          std::min(res.min_cone_margin_nodes, plan_margins[k][leg]);
      const double peak =
          plan_torques[k].segment<3>(3 * leg).cwiseAbs().maxCoeff();
      res.peak_stance_torque = std::max(res.peak_stance_torque, peak);
      if (leg == kLF || leg == kRF)
        res.peak_front_torque = std::max(res.peak_front_torque, peak);
    }
  }

  std::vector<StateVec> f_nodes(N);
  for (int k = 0; k < N; ++k)
    f_nodes[k] = f_rom(HROMState::unflatten(res.X[k]),
                       ControlInput::unflatten(res.U[k]), config.robot);

  // Post-hoc cone margins on a fine grid through the interpolants, checked
  // for legs in stance across a whole segment (forces ramp to zero around
  // swing transitions by construction).
  res.min_cone_margin_fine = std::numeric_limits<double>::infinity();
  {
    for (int j = 0; j < N - 1; ++j) {
      for (int step = 0; step <= 10; ++step) {
        const double s = step / 10.0;
        const InputVec ui = res.U[j] + s * (res.U[j + 1] - res.U[j]);
        const ControlInput u = ControlInput::unflatten(ui);
        for (int leg = 0; leg < kNumLegs; ++leg) {
          if (!wp.schedule.stance[j][leg] || !wp.schedule.stance[j + 1][leg])
            continue;
          res.min_cone_margin_fine = std::min(
              res.min_cone_margin_fine,
              friction_cone_margin(Rs.transpose() * u.u_g.col(leg),
                                   config.cone_mu));
        }
      }
    }
  }

  // Closed-loop verification: replay planned joint accelerations and thrust
  // against the compliant contact model on a stiff verification ground.
  ContactParams verify_contact = config.contact;
  verify_contact.k1 = config.verify.k1;
  const GaitReference gait_ref(config.gait, wp.plane, config.robot);
  const std::vector<InputVec>& U = res.U;
  Controller controller = [&](double t, const HROMState&) {
    const double tq = std::clamp(t, 0.0, t_f);
    const ControlInput u =
        ControlInput::unflatten(input_interpolant(U, grid, tq));
    StepCommand cmd;
    cmd.u_L = u.u_L;
    cmd.u_T = u.u_T;
    for (int leg = 0; leg < kNumLegs; ++leg)
      cmd.stance[leg] = gait_ref.in_stance(leg, tq);
    return cmd;
  };
  RolloutOptions ropts;
  ropts.dt = config.verify.dt;
  ropts.smooth_friction = true;
  ropts.cone_mu = config.cone_mu;
  const std::size_t steps =
      static_cast<std::size_t>(std::llround(t_f / config.verify.dt));
  const RolloutResult rr =
      rollout(HROMState::unflatten(res.X.front()), controller, wp.plane,
              verify_contact, config.robot, steps, ropts);
  res.rollout_diverged = rr.diverged;
  {
    const Trajectory& tr = rr.trajectory;
    const Eigen::Vector3d p0 = tr.states.front().p_b;
    const Eigen::Vector3d pe = tr.states.back().p_b;
    res.rollout_progress = (pe - p0).dot(tangent);
    // Deviation against the planned interpolant.
    double dev = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const double t = std::clamp(tr.times[i], 0.0, t_f);
      const double h = grid.h(0);
      int j = static_cast<int>(std::floor(t / h));
      j = std::max(0, std::min(j, N - 2));
      const HermiteSegment seg = hermite_segment(
          res.X[j], res.X[j + 1], f_nodes[j], f_nodes[j + 1], h);
      const StateVec xp = segment_eval(seg, (t - grid.node_time(j)) / h);
      dev = std::max(dev, (tr.states[i].p_b - xp.segment<3>(33)).norm());
    }
    res.rollout_body_deviation = dev;
  }

  // Artifacts.
  if (!config.output_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir);
    const std::string base = config.output_dir + "/";

    CsvTable plan;
    plan.header = trajectory_header();
    for (int k = 0; k < N; ++k) {
      const HROMState x = HROMState::unflatten(res.X[k]);
      const ControlInput u = ControlInput::unflatten(res.U[k]);
      plan.rows.push_back(trajectory_row(
          grid.node_time(k), x, u, plan_margins[k], plan_torques[k],
          mechanical_energy(x, config.robot)));
    }
    res.trajectory_csv = base + "trajectory.csv";
    write_csv(res.trajectory_csv, plan);

    CsvTable roll;
    roll.header = trajectory_header();
    const Trajectory& tr = rr.trajectory;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const ControlInput u =
          i < tr.inputs.size() ? tr.inputs[i] : ControlInput{};
      roll.rows.push_back(trajectory_row(tr.times[i], tr.states[i], u,
                                         tr.cone_margins[i], tr.torques[i],
                                         tr.energies[i]));
    }
    res.rollout_csv = base + "rollout.csv";
    write_csv(res.rollout_csv, roll);

    CsvTable summary;
    summary.header = {"slope_deg",
                      "converged",
                      "outer_iterations",
                      "inner_iterations",
                      "objective",
                      "max_eq_violation",
                      "max_ineq_violation",
                      "kkt",
                      "progress_target",
                      "progress_plan",
                      "min_cone_margin_nodes",
                      "min_cone_margin_fine",
                      "mean_thrust",
                      "peak_thrust",
                      "peak_stance_torque",
                      "peak_front_torque",
                      "rollout_diverged",
                      "rollout_progress",
                      "rollout_body_deviation",
                      "static_infeasibility_warning"};
    summary.rows.push_back(
        {config.slope_deg,
         res.report.status == SolveStatus::kConverged ? 1.0 : 0.0,
         static_cast<double>(res.report.outer_iterations),
         static_cast<double>(res.report.inner_iterations), res.report.objective,
         res.report.max_eq_violation, res.report.max_ineq_violation,
         res.report.kkt, res.progress_target, res.progress_plan,
         res.min_cone_margin_nodes, res.min_cone_margin_fine, res.mean_thrust,
         res.peak_thrust, res.peak_stance_torque, res.peak_front_torque,
         res.rollout_diverged ? 1.0 : 0.0, res.rollout_progress,
         res.rollout_body_deviation,
         res.static_infeasibility_warning ? 1.0 : 0.0});
    res.summary_csv = base + "summary.csv";
    write_csv(res.summary_csv, summary);

    std::ofstream log(base + "solver.log", std::ios::binary);
    log << "slope_deg " << format_double(config.slope_deg) << " n "
        << tp.num_vars() << " eq "
        << tp.num_defect_rows() + tp.num_boundary_rows() << " ineq "
        << tp.num_inequality_rows() << "\n";
    if (wp.static_infeasibility_warning)
      log << "warning: static stance balance infeasible without thrust\n";
    log << res.report.log;
    log << "status " << to_string(res.report.status) << "\n";
    res.solver_log = base + "solver.log";
  }
  return res;
}

std::vector<SweepRow> slope_sweep(const ScenarioConfig& base,
                                  const std::vector<double>& angles_deg) {
  if (angles_deg.size() < 2)
    throw std::invalid_argument("slope_sweep: need at least two angles");
  std::vector<SweepRow> rows;
  for (double a : angles_deg) {
    ScenarioConfig cfg = base;
    cfg.slope_deg = a;
    if (!base.output_dir.empty()) {
      char sub[64];
      std::snprintf(sub, sizeof(sub), "/slope_%g", a);
      cfg.output_dir = base.output_dir + sub;
    }
    SweepRow row;
    row.slope_deg = a;
    try {
      const ScenarioResult res = run_scenario(cfg);
      row.converged = res.report.status == SolveStatus::kConverged;
      row.mean_thrust = res.mean_thrust;
      row.peak_front_torque = res.peak_front_torque;
      row.peak_stance_torque = res.peak_stance_torque;
      row.min_cone_margin = res.min_cone_margin_nodes;
      row.progress = res.progress_plan;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  if (!base.output_dir.empty()) {
    std::filesystem::create_directories(base.output_dir);
    CsvTable table;
    table.header = {"slope_deg",        "converged",
                    "mean_thrust",      "peak_front_torque",
                    "peak_stance_torque", "min_cone_margin",
                    "progress",         "failed"};
    for (const auto& r : rows)
      table.rows.push_back({r.slope_deg, r.converged ? 1.0 : 0.0,
                            r.mean_thrust, r.peak_front_torque,
                            r.peak_stance_torque, r.min_cone_margin,
                            r.progress, r.error.empty() ? 0.0 : 1.0});
    write_csv(base.output_dir + "/sweep.csv", table);
  }
  return rows;
}

}  // namespace wair
