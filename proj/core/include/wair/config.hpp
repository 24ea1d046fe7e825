#pragma once

#include <string>

#include "wair/scenario.hpp"

namespace wair {

// Plain-text scenario configuration: one `key = value` pair per line, `#`
// starts a comment, keys use dots to reach nested fields (e.g.
// `gait.step_length = 0.12`, `solver.feas_tol = 1e-6`).  Values are numbers,
// true/false, strings, or comma-separated number lists where a field needs
// one (gait.phase_offsets, robot.inertia_diag).  Unknown keys are errors.
ScenarioConfig parse_config_text(const std::string& text,
                                 const ScenarioConfig& defaults = {});
ScenarioConfig parse_config_file(const std::string& path,
                                 const ScenarioConfig& defaults = {});

// Apply one key/value pair; throws std::invalid_argument on unknown keys or
// malformed values.
void apply_config_entry(ScenarioConfig& config, const std::string& key,
                        const std::string& value);

}  // namespace wair
