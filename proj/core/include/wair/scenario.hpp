#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wair/collocation.hpp"
#include "wair/contact.hpp"
#include "wair/gait.hpp"
#include "wair/nlp.hpp"
#include "wair/timestep.hpp"
#include "wair/types.hpp"

namespace wair {

// Closed-loop verification settings: stiffer ground and a finer step than the
// planning-side contact defaults, sized for explicit integration.
struct VerifyConfig {
  double dt = 2e-4;  // s
  double k1 = 1e4;   // N/m
};

// One planning scenario: slope angle, horizon, gait, model and solver
// settings, and output location.  Construction tightens the solver
// feasibility tolerance to the reporting tolerance (1e-6) so converged
// plans satisfy the friction-cone margin checks as reported.  Tighter
// values sit inside the augmented-Lagrangian terminal noise and make the
// penalty schedule thrash instead of polishing.
struct ScenarioConfig {
  ScenarioConfig() { solver.feas_tol = 1e-6; }

  double slope_deg = 0.0;
  double t_f = 2.0;
  int N = 31;
  GaitConfig gait;
  RobotParams robot;
  ContactParams contact;
  CostWeights weights;
  SolverOptions solver;
  bool thrust_enabled = true;
  double cone_mu = 1.0;
  double u_L_box = 50.0;
  bool zero_terminal_angular_rate = false;
  bool zero_terminal_linear_rate = false;
  VerifyConfig verify;
  std::string output_dir = "out";  // empty string disables artifact files
  unsigned seed = 0;               // nonzero seeds initial-guess jitter
};

// Assembled problem plus everything needed to interpret a solution.
struct WairProblem {
  std::shared_ptr<TranscribedProblem> transcription;
  NLPProblem nlp;
  GaitSchedule schedule;
  std::vector<StateVec> reference;
  SlopePlane plane;
  double progress_target = 0.0;
  // Set when the quasi-static balance already rules out a cone-feasible
  // stance (e.g. steep slope with thrust disabled); the solve still runs.
  bool static_infeasibility_warning = false;
};

WairProblem build_wair_problem(const ScenarioConfig& config);

struct ScenarioResult {
  SolveReport report;
  std::vector<StateVec> X;  // solved node states
  std::vector<InputVec> U;  // solved node inputs
  GaitSchedule schedule;
  SlopePlane plane;
  double progress_target = 0.0;
  double progress_plan = 0.0;
  double min_cone_margin_nodes = 0.0;
  double min_cone_margin_fine = 0.0;
  double mean_thrust = 0.0;
  double peak_thrust = 0.0;
  double peak_stance_torque = 0.0;
  double peak_front_torque = 0.0;
  bool rollout_diverged = false;
  double rollout_progress = 0.0;
  double rollout_body_deviation = 0.0;  // max |p_rollout - p_plan| over time
  bool static_infeasibility_warning = false;
  std::string trajectory_csv, rollout_csv, summary_csv, solver_log;
};

// Solve the scenario, verify the plan closed-loop against the compliant
// contact model, and (when output_dir is set) write trajectory.csv,
// rollout.csv, summary.csv, and solver.log.
ScenarioResult run_scenario(const ScenarioConfig& config);

struct SweepRow {
  double slope_deg = 0.0;
  bool converged = false;
  double mean_thrust = 0.0;
  double peak_front_torque = 0.0;
  double peak_stance_torque = 0.0;
  double min_cone_margin = 0.0;
  double progress = 0.0;
  std::string error;  // nonempty if the scenario threw
};

// Run run_scenario once per angle (same base config otherwise); failures are
// recorded per-row and do not stop the sweep.  Writes sweep.csv under the
// base output_dir when set.
std::vector<SweepRow> slope_sweep(const ScenarioConfig& base,
                                  const std::vector<double>& angles_deg);

}  // namespace wair
