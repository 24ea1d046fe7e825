// Microbenchmarks for the hot paths: model derivative, contact force,
// integration steps, and the transcription's constraint/Jacobian evaluations.

#include <benchmark/benchmark.h>

#include <map>
#include <random>
#include <vector>

#include "wair/collocation.hpp"
#include "wair/contact.hpp"
#include "wair/dynamics.hpp"
#include "wair/gait.hpp"
#include "wair/kinematics.hpp"
#include "wair/scenario.hpp"
#include "wair/timestep.hpp"

using namespace wair;

namespace {

HROMState sample_state(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HROMState x;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    x.q_L[3 * leg + 0] = 0.5 * u(rng);
    x.q_L[3 * leg + 1] = 0.5 * u(rng);
    x.q_L[3 * leg + 2] = 0.4 + 0.2 * u(rng);
  }
  for (int i = 0; i < kNumJoints; ++i) x.dq_L[i] = u(rng);
  x.R_b = exp_so3(Eigen::Vector3d(u(rng), u(rng), u(rng)));
  x.p_b = Eigen::Vector3d(u(rng), u(rng), 0.5 + 0.2 * u(rng));
  x.w_b = Eigen::Vector3d(u(rng), u(rng), u(rng));
  x.dp_b = Eigen::Vector3d(u(rng), u(rng), u(rng));
  return x;
}

ControlInput sample_input(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ControlInput c;
  for (int i = 0; i < kNumJoints; ++i) c.u_L[i] = 5.0 * u(rng);
  for (int leg = 0; leg < kNumLegs; ++leg)
    c.u_g.col(leg) = Eigen::Vector3d(5.0 * u(rng), 5.0 * u(rng),
                                     20.0 + 10.0 * u(rng));
  c.u_T = Eigen::Vector3d(u(rng), u(rng), 30.0 + 5.0 * u(rng));
  return c;
}

void bm_f_rom(benchmark::State& state) {
  std::mt19937 rng(7);
  const RobotParams p;
  const HROMState x = sample_state(rng);
  const ControlInput u = sample_input(rng);
  for (auto _ : state) benchmark::DoNotOptimize(f_rom(x, u, p));
}
BENCHMARK(bm_f_rom);

void bm_foot_kinematics(benchmark::State& state) {
  std::mt19937 rng(7);
  const RobotParams p;
  const HROMState x = sample_state(rng);
  for (auto _ : state)
    for (int leg = 0; leg < kNumLegs; ++leg) {
      benchmark::DoNotOptimize(foot_position(x, p, leg));
      benchmark::DoNotOptimize(foot_velocity(x, p, leg));
    }
}
BENCHMARK(bm_foot_kinematics);

void bm_contact_force(benchmark::State& state) {
  const ContactParams cp;
  const SlopePlane plane{0.35, Eigen::Vector3d::Zero()};
  const Eigen::Vector3d pos(0.2, 0.1, 0.05);
  const Eigen::Vector3d vel(-0.3, 0.1, -0.4);
  for (auto _ : state)
    benchmark::DoNotOptimize(contact_force(pos, vel, plane, cp, true));
}
BENCHMARK(bm_contact_force);

void bm_euler_step(benchmark::State& state) {
  std::mt19937 rng(7);
  const RobotParams p;
  HROMState x = sample_state(rng);
  const ControlInput u = sample_input(rng);
  for (auto _ : state) {
    x = euler_step(x, u, 2e-4, p);
    benchmark::DoNotOptimize(x.p_b);
  }
}
BENCHMARK(bm_euler_step);

void bm_rk4_step(benchmark::State& state) {
  std::mt19937 rng(7);
  const RobotParams p;
  HROMState x = sample_state(rng);
  const ControlInput u = sample_input(rng);
  for (auto _ : state) {
    x = rk4_step(x, u, 1e-4, p);
    benchmark::DoNotOptimize(x.p_b);
  }
}
BENCHMARK(bm_rk4_step);

const WairProblem& planning_problem(int N) {
  static std::map<int, WairProblem> cache;
  auto it = cache.find(N);
  if (it == cache.end()) {
    ScenarioConfig cfg;
    cfg.N = N;
    cfg.slope_deg = 30.0;
    cfg.output_dir = "";
    it = cache.emplace(N, build_wair_problem(cfg)).first;
  }
  return it->second;
}

void bm_defect_constraints(benchmark::State& state) {
  const WairProblem& wp = planning_problem(static_cast<int>(state.range(0)));
  const Eigen::VectorXd& Y = wp.nlp.y0;
  for (auto _ : state)
    benchmark::DoNotOptimize(wp.transcription->defect_constraints(Y));
}
BENCHMARK(bm_defect_constraints)->Arg(11)->Arg(31);

void bm_defect_jacobian(benchmark::State& state) {
  const WairProblem& wp = planning_problem(static_cast<int>(state.range(0)));
  const Eigen::VectorXd& Y = wp.nlp.y0;
  for (auto _ : state)
    benchmark::DoNotOptimize(wp.transcription->defect_jacobian(Y));
}
BENCHMARK(bm_defect_jacobian)->Arg(11)->Arg(31)->Unit(benchmark::kMillisecond);

void bm_inequality_jacobian(benchmark::State& state) {
  const WairProblem& wp = planning_problem(static_cast<int>(state.range(0)));
  const Eigen::VectorXd& Y = wp.nlp.y0;
  for (auto _ : state)
    benchmark::DoNotOptimize(wp.transcription->inequality_jacobian(Y));
}
BENCHMARK(bm_inequality_jacobian)->Arg(31);

}  // namespace

BENCHMARK_MAIN();
