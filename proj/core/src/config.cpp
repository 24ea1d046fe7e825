#include "wair/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wair {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw std::invalid_argument("config: bad number for " + key + ": " + v);
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  const int i = static_cast<int>(x);
  if (static_cast<double>(i) != x)
    throw std::invalid_argument("config: expected integer for " + key);
  return i;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: expected true/false for " + key);
}

std::vector<double> to_list(const std::string& key, const std::string& v,
                            std::size_t expected) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(to_double(key, trim(cell)));
  if (out.size() != expected)
    throw std::invalid_argument("config: " + key + " expects " +
                                std::to_string(expected) + " values");
  return out;
}

}  // namespace

void apply_config_entry(ScenarioConfig& c, const std::string& key,
                        const std::string& value) {
  if (key == "slope_deg") c.slope_deg = to_double(key, value);
  else if (key == "t_f") c.t_f = to_double(key, value);
  else if (key == "N") c.N = to_int(key, value);
  else if (key == "thrust_enabled") c.thrust_enabled = to_bool(key, value);
  else if (key == "cone_mu") c.cone_mu = to_double(key, value);
  else if (key == "u_L_box") c.u_L_box = to_double(key, value);
  else if (key == "output_dir") c.output_dir = value;
  else if (key == "seed") c.seed = static_cast<unsigned>(to_int(key, value));
  else if (key == "gait.cycle_time") c.gait.cycle_time = to_double(key, value);
  else if (key == "gait.duty_factor") c.gait.duty_factor = to_double(key, value);
  else if (key == "gait.step_length") c.gait.step_length = to_double(key, value);
  else if (key == "gait.step_height") c.gait.step_height = to_double(key, value);
  else if (key == "gait.body_height") c.gait.body_height = to_double(key, value);
  else if (key == "gait.phase_offsets") {
    const auto v = to_list(key, value, kNumLegs);
    for (int i = 0; i < kNumLegs; ++i) c.gait.phase_offsets[i] = v[i];
  } else if (key == "robot.mass") c.robot.mass = to_double(key, value);
  else if (key == "robot.inertia_diag") {
    const auto v = to_list(key, value, 3);
    c.robot.inertia = Eigen::Vector3d(v[0], v[1], v[2]).asDiagonal();
  } else if (key == "robot.r_min") c.robot.r_min = to_double(key, value);
  else if (key == "robot.r_max") c.robot.r_max = to_double(key, value);
  else if (key == "robot.joint_angle_limit")
    c.robot.joint_angle_limit = to_double(key, value);
  else if (key == "robot.u_T_max") c.robot.u_T_max = to_double(key, value);
  else if (key == "contact.k1") c.contact.k1 = to_double(key, value);
  else if (key == "contact.k2") c.contact.k2 = to_double(key, value);
  else if (key == "contact.mu_c") c.contact.mu_c = to_double(key, value);
  else if (key == "contact.mu_s") c.contact.mu_s = to_double(key, value);
  else if (key == "contact.mu_v") c.contact.mu_v = to_double(key, value);
  else if (key == "contact.v_s") c.contact.v_s = to_double(key, value);
  else if (key == "contact.smooth_eps")
    c.contact.smooth_eps = to_double(key, value);
  else if (key == "weights.q_pose") c.weights.q_pose = to_double(key, value);
  else if (key == "weights.q_rate") c.weights.q_rate = to_double(key, value);
  else if (key == "weights.r_uL") c.weights.r_uL = to_double(key, value);
  else if (key == "weights.r_ug") c.weights.r_ug = to_double(key, value);
  else if (key == "weights.r_uT") c.weights.r_uT = to_double(key, value);
  else if (key == "solver.opt_tol") c.solver.opt_tol = to_double(key, value);
  else if (key == "solver.feas_tol") c.solver.feas_tol = to_double(key, value);
  else if (key == "solver.max_outer") c.solver.max_outer = to_int(key, value);
  else if (key == "solver.max_inner") c.solver.max_inner = to_int(key, value);
  else if (key == "solver.rho0") c.solver.rho0 = to_double(key, value);
  else if (key == "solver.rho_growth")
    c.solver.rho_growth = to_double(key, value);
  else if (key == "solver.rho_max") c.solver.rho_max = to_double(key, value);
  else if (key == "solver.verbose") c.solver.verbose = to_bool(key, value);
  else if (key == "boundary.zero_terminal_angular_rate")
    c.zero_terminal_angular_rate = to_bool(key, value);
  else if (key == "boundary.zero_terminal_linear_rate")
    c.zero_terminal_linear_rate = to_bool(key, value);
  else if (key == "verify.dt") c.verify.dt = to_double(key, value);
  else if (key == "verify.k1") c.verify.k1 = to_double(key, value);
  else
    throw std::invalid_argument("config: unknown key '" + key + "'");
}

ScenarioConfig parse_config_text(const std::string& text,
                                 const ScenarioConfig& defaults) {
  ScenarioConfig config = defaults;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");
    apply_config_entry(config, key, value);
  }
  return config;
}

ScenarioConfig parse_config_file(const std::string& path,
                                 const ScenarioConfig& defaults) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), defaults);
}

}  // namespace wair
