// Command-line front end: plan thruster-assisted incline walking for the
// reduced-order quadruped model, sweep slope angles, or query the
// quasi-static stance feasibility oracle.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wair/config.hpp"
#include "wair/contact.hpp"
#include "wair/scenario.hpp"

namespace {

void print_scenario(const wair::ScenarioResult& res, double slope_deg) {
  std::printf("slope %.4g deg: %s in %d outer / %d inner iterations\n",
              slope_deg, wair::to_string(res.report.status),
              res.report.outer_iterations, res.report.inner_iterations);
  std::printf("  objective      %.6g\n", res.report.objective);
  std::printf("  feasibility    eq %.3e  ineq %.3e  kkt %.3e\n",
              res.report.max_eq_violation, res.report.max_ineq_violation,
              res.report.kkt);
  std::printf("  progress       plan %.4f m (target %.4f m), rollout %.4f m\n",
              res.progress_plan, res.progress_target, res.rollout_progress);
  std::printf("  cone margin    nodes %.6g  fine %.6g\n",
              res.min_cone_margin_nodes, res.min_cone_margin_fine);
  std::printf("  thrust         mean %.4f N  peak %.4f N\n", res.mean_thrust,
              res.peak_thrust);
  std::printf("  stance torque  peak %.4f (front %.4f)\n",
              res.peak_stance_torque, res.peak_front_torque);
  std::printf("  rollout        %s, max body deviation %.4f m\n",
              res.rollout_diverged ? "DIVERGED" : "ok",
              res.rollout_body_deviation);
  if (!res.trajectory_csv.empty())
    std::printf("  artifacts      %s\n", res.trajectory_csv.c_str());
}

std::vector<double> parse_angles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory optimization for thruster-assisted incline walking"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string angles_csv = "0,10,20,30,45";
  unsigned seed = 0;
  bool verbose = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out-dir", out_dir, "Artifact directory override");
    cmd->add_option("--seed", seed, "Seed for initial-guess jitter (0 = none)");
    cmd->add_flag("--verbose", verbose, "Stream solver iterations to stderr");
  };

  CLI::App* run = app.add_subcommand("run", "Solve one scenario");
  run->add_option("--config", config_path, "Scenario config file")
      ->check(CLI::ExistingFile);
  add_common(run);

  CLI::App* sweep = app.add_subcommand("sweep", "Solve across slope angles");
  sweep->add_option("--config", config_path, "Scenario config file")
      ->check(CLI::ExistingFile);
  sweep->add_option("--angles", angles_csv, "Comma-separated slope degrees");
  add_common(sweep);

  CLI::App* check =
      app.add_subcommand("check-static", "Quasi-static stance feasibility");
  double slope_deg = 0.0, mu = 1.0, thrust = 0.0;
  check->add_option("--slope", slope_deg, "Slope angle, degrees")->required();
  check->add_option("--mu", mu, "Friction coefficient");
  check->add_option("--thrust", thrust,
                    "Up-slope tangential thrust magnitude, N");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) {
      wair::RobotParams robot;
      const double angle = slope_deg * M_PI / 180.0;
      wair::SlopePlane plane;
      plane.angle = angle;
      const Eigen::Vector3d up_slope = wair::slope_frame(plane).col(0);
      const auto feas =
          wair::static_stance_feasibility(angle, mu, thrust * up_slope, robot);
      std::printf("slope %.4g deg, mu %.4g, tangential thrust %.4g N\n",
                  slope_deg, mu, thrust);
      std::printf("  normal force     %.4f N\n", feas.normal_force);
      std::printf("  tangential force %.4f N\n", feas.tangential_force);
      std::printf("  margin (mu - ratio) %.6g\n", feas.margin);
      std::printf("  %s\n", feas.feasible ? "feasible" : "INFEASIBLE");
      return feas.feasible ? 0 : 2;
    }

    wair::ScenarioConfig config;
    if (!config_path.empty()) config = wair::parse_config_file(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (seed != 0) config.seed = seed;
    if (verbose) config.solver.verbose = true;

    if (run->parsed()) {
      const wair::ScenarioResult res = wair::run_scenario(config);
      print_scenario(res, config.slope_deg);
      return res.report.status == wair::SolveStatus::kConverged ? 0 : 2;
    }

    const std::vector<double> angles = parse_angles(angles_csv);
    const auto rows = wair::slope_sweep(config, angles);
    std::printf(
        "%10s %10s %12s %14s %14s %12s %10s\n", "slope_deg", "converged",
        "mean_thrust", "front_torque", "stance_torque", "cone_margin",
        "progress");
    bool all_ok = true;
    for (const auto& r : rows) {
      if (!r.error.empty()) {
        std::printf("%10.4g %10s  error: %s\n", r.slope_deg, "no",
                    r.error.c_str());
        all_ok = false;
        continue;
      }
      std::printf("%10.4g %10s %12.4f %14.4f %14.4f %12.6g %10.4f\n",
                  r.slope_deg, r.converged ? "yes" : "no", r.mean_thrust,
                  r.peak_front_torque, r.peak_stance_torque, r.min_cone_margin,
                  r.progress);
      all_ok = all_ok && r.converged;
    }
    return all_ok ? 0 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
