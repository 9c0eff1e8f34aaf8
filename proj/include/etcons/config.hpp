#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "etcons/simulator.hpp"

namespace etcons {

struct RunSpec {
  SimConfig config;
  std::string out_dir = "out";
  std::optional<std::string> preset;
};

// JSON schema (every key optional unless marked):
//   model: {name, theta*, theta_hat*}      graph: {n_agents*, edges* [[i,j] or [i,j,w]]}
//   initial_states*   step   duration   integrator
//   trigger: {ctc, kappa1*, kappa2*, sigma*, b, epsilon, xi}
//   certificate: {P*, rho*, q*}   metrics: {chi}   output: {dump_estimates}   seed
// Unknown keys are rejected so that typos cannot silently fall back to defaults.
SimConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SimConfig& config);

// Parses, then validates the scenario as a whole (prepare() plus T ≥ h).
SimConfig parse_and_validate(const nlohmann::json& j);
void validate_config(const SimConfig& config);

// Throws ConfigError on unreadable files, malformed JSON, schema and invariant violations.
RunSpec load_config(const std::string& path);

std::vector<std::string> preset_names();
// Throws ConfigError("preset", ...) for unknown names.
SimConfig preset(const std::string& name);

// Applies `value` at a dotted path such as "trigger.sigma[2]" or "model.theta_hat".
// An empty path merge-patches `value` (an object) into the root.
void apply_override(nlohmann::json& config, const std::string& path, const nlohmann::json& value);

}  // namespace etcons
