#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "test_util.hpp"
#include "wair/config.hpp"
#include "wair/csv.hpp"
#include "wair/scenario.hpp"

using namespace wair;

namespace {

bool bit_equal(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// Small, fast scenario used for structural checks.
ScenarioConfig tiny_config() {
  ScenarioConfig c;
  c.slope_deg = 0.0;
  c.N = 9;
  c.t_f = 1.0;
  c.thrust_enabled = false;
  c.output_dir = "";
  return c;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config text parsing") {
  const std::string text = R"(# scenario
slope_deg = 30
N = 15
t_f = 1.5
thrust_enabled = false
gait.step_length = 0.2
gait.phase_offsets = 0, 0.5, 0.75, 0.25
robot.mass = 5.0
robot.inertia_diag = 0.1, 0.2, 0.3
solver.feas_tol = 1e-7
output_dir = /tmp/run1
)";
  const ScenarioConfig c = parse_config_text(text);
  CHECK(c.slope_deg == 30.0);
  CHECK(c.N == 15);
  CHECK(c.t_f == 1.5);
  CHECK_FALSE(c.thrust_enabled);
  CHECK(c.gait.step_length == 0.2);
  CHECK(c.gait.phase_offsets[2] == 0.75);
  CHECK(c.robot.mass == 5.0);
  CHECK(c.robot.inertia(1, 1) == 0.2);
  CHECK(c.solver.feas_tol == 1e-7);
  CHECK(c.output_dir == "/tmp/run1");
  // Untouched fields keep their defaults.
  CHECK(c.gait.cycle_time == 2.0);
  CHECK(c.cone_mu == 1.0);
}

TEST_CASE("config rejects unknown keys and bad values") {
  CHECK_THROWS_AS(parse_config_text("nonsense_key = 1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("slope_deg = uphill\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("N = 2.5\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("thrust_enabled = maybe\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("gait.phase_offsets = 1, 2\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("slope_deg\n"), std::invalid_argument);
}

TEST_CASE("config respects provided defaults") {
  ScenarioConfig base;
  base.N = 21;
  base.cone_mu = 0.7;
  const ScenarioConfig c = parse_config_text("t_f = 3.0\n", base);
  CHECK(c.N == 21);
  CHECK(c.cone_mu == 0.7);
  CHECK(c.t_f == 3.0);
}

TEST_CASE("csv round trip is bit exact") {
  CsvTable t;
  t.header = {"a", "b", "c"};
  t.rows.push_back({M_PI, 1.0 / 3.0, -0.0});
  t.rows.push_back({1e308, 5e-324, -1.2345678901234567e-89});
  t.rows.push_back({0.1 + 0.2, -9.81, 42.0});

  const std::string path = "csv_roundtrip_test.csv";
  write_csv(path, t);
  const CsvTable back = read_csv(path);
  REQUIRE(back.header == t.header);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    REQUIRE(back.rows[i].size() == t.rows[i].size());
    for (std::size_t j = 0; j < t.rows[i].size(); ++j)
      CHECK(bit_equal(back.rows[i][j], t.rows[i][j]));
  }
  std::remove(path.c_str());
}

TEST_CASE("csv errors") {
  CsvTable bad;
  bad.header = {"a", "b"};
  bad.rows.push_back({1.0});
  CHECK_THROWS_AS(write_csv("csv_bad_test.csv", bad), std::runtime_error);
  CHECK_THROWS_AS(read_csv("does_not_exist_anywhere.csv"), std::runtime_error);

  {
    std::ofstream out("csv_ragged_test.csv");
    out << "a,b\n1.0,2.0\n3.0\n";
  }
  CHECK_THROWS_AS(read_csv("csv_ragged_test.csv"), std::runtime_error);
  std::remove("csv_ragged_test.csv");

  {
    std::ofstream out("csv_nonnum_test.csv");
    out << "a\nhello\n";
  }
  CHECK_THROWS_AS(read_csv("csv_nonnum_test.csv"), std::runtime_error);
  std::remove("csv_nonnum_test.csv");
}

TEST_CASE("problem assembly") {
  SUBCASE("thrust disabled pins the thrust variables") {
    const ScenarioConfig c = tiny_config();
    const WairProblem wp = build_wair_problem(c);
    const DecisionLayout& L = wp.transcription->layout();
    for (int k = 0; k < c.N; ++k) {
      for (int i = 0; i < 3; ++i) {
        const int idx = L.input_offset(k) + 24 + i;
        CHECK(wp.nlp.lb[idx] == 0.0);
        CHECK(wp.nlp.ub[idx] == 0.0);
      }
    }
    // No thrust inequality rows are emitted.
    int stance_rows = 0;
    for (const auto& st : wp.schedule.stance)
      for (bool s : st) stance_rows += s ? 2 : 0;
    CHECK(wp.transcription->num_inequality_rows() == stance_rows);
  }

  SUBCASE("constraint counts follow the grid") {
    ScenarioConfig c = tiny_config();
    c.thrust_enabled = true;
    const WairProblem wp = build_wair_problem(c);
    const Eigen::VectorXd eq = wp.nlp.equality(wp.nlp.y0);
    CHECK(eq.size() == (c.N - 1) * kStateDim + kStateDim + 1);
    const Eigen::VectorXd ineq = wp.nlp.inequality(wp.nlp.y0);
    int want = 0;
    for (const auto& st : wp.schedule.stance) {
      for (bool s : st) want += s ? 2 : 0;
      want += 2;  // thrust rows
    }
    CHECK(ineq.size() == want);
  }

  SUBCASE("initial guess respects bounds and balances weight") {
    ScenarioConfig c = tiny_config();
    c.slope_deg = 20.0;
    c.thrust_enabled = true;
    const WairProblem wp = build_wair_problem(c);
    const Eigen::VectorXd& y0 = wp.nlp.y0;
    REQUIRE(y0.size() == wp.nlp.lb.size());
    for (int i = 0; i < y0.size(); ++i) {
      CHECK(y0[i] >= wp.nlp.lb[i] - 1e-12);
      CHECK(y0[i] <= wp.nlp.ub[i] + 1e-12);
    }
    // First node is the pinned initial state.
    const DecisionLayout& L = wp.transcription->layout();
    CHECK((y0.segment<kStateDim>(0) - wp.reference.front()).norm() == 0.0);
    // Stance forces plus thrust carry the weight at every node.
    const double mg = c.robot.mass * c.robot.gravity.norm();
    for (int k = 0; k < c.N; ++k) {
      const InputVec u = y0.segment<kInputDim>(L.input_offset(k));
      const ControlInput ci = ControlInput::unflatten(u);
      const Eigen::Vector3d total = ci.u_g.rowwise().sum() + ci.u_T;
      CHECK((total - Eigen::Vector3d(0, 0, mg)).norm() < 1e-9);
      CHECK(ci.u_T.z() == doctest::Approx(0.5 * mg).epsilon(1e-12));
    }
  }

  SUBCASE("quasi-static infeasibility is flagged, not fatal") {
    ScenarioConfig c = tiny_config();
    c.slope_deg = 50.0;  // tan(50 deg) > mu = 1
    CHECK(build_wair_problem(c).static_infeasibility_warning);
    c.slope_deg = 20.0;
    CHECK_FALSE(build_wair_problem(c).static_infeasibility_warning);
    c.slope_deg = 50.0;
    c.thrust_enabled = true;  // thrust makes the balance solvable
    CHECK_FALSE(build_wair_problem(c).static_infeasibility_warning);
  }

  SUBCASE("progress target follows the gait through the horizon") {
    ScenarioConfig c = tiny_config();
    c.t_f = 1.0;
    const WairProblem wp = build_wair_problem(c);
    CHECK(wp.progress_target ==
          doctest::Approx(c.gait.step_length * c.t_f / c.gait.cycle_time));
  }
}

TEST_CASE("flat-ground scenario solves and verifies" * doctest::timeout(300)) {
  ScenarioConfig c = tiny_config();  // slope 0, no thrust, no files
  const ScenarioResult res = run_scenario(c);
  CHECK(res.report.status == SolveStatus::kConverged);
  CHECK(res.min_cone_margin_nodes >= -1e-6);
  CHECK(res.mean_thrust == 0.0);
  CHECK(res.peak_thrust == 0.0);
  CHECK(res.progress_plan ==
        doctest::Approx(res.progress_target).epsilon(1e-3));
  CHECK_FALSE(res.rollout_diverged);
  CHECK_FALSE(res.static_infeasibility_warning);
  // No artifacts requested.
  CHECK(res.trajectory_csv.empty());
}

TEST_CASE("identical configs give identical artifacts" *
          doctest::timeout(600)) {
  ScenarioConfig a = tiny_config();
  a.output_dir = "pipeline_test_out_a";
  ScenarioConfig b = tiny_config();
  b.output_dir = "pipeline_test_out_b";
  const ScenarioResult ra = run_scenario(a);
  const ScenarioResult rb = run_scenario(b);
  REQUIRE(!ra.trajectory_csv.empty());
  CHECK(slurp(ra.trajectory_csv) == slurp(rb.trajectory_csv));
  CHECK(slurp(ra.rollout_csv) == slurp(rb.rollout_csv));
  CHECK(slurp(ra.summary_csv) == slurp(rb.summary_csv));
  CHECK(slurp(ra.solver_log) == slurp(rb.solver_log));

  // The trajectory file reloads losslessly.
  const CsvTable t = read_csv(ra.trajectory_csv);
  REQUIRE(!t.rows.empty());
  CHECK(t.header.size() == t.rows.front().size());
}

}  // TEST_SUITE
