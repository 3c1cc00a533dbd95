#pragma once

// Layered tool configuration: defaults, then a JSON file, then flags.

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "tbx/augmentation.hpp"
#include "tbx/evaluator.hpp"
#include "tbx/qa_generation.hpp"

namespace tbx
{

struct EvaluationConfig
{
  double distance_tol = 0.25;
  double angle_tol_deg = 15.0;
  double zero_distance_abs_m = 0.5;
  std::optional<std::string> keyword_table; ///< path; default table when absent
};

struct ToolConfig
{
  std::uint64_t seed = 0;
  GenerationConfig generation;
  EvaluationConfig evaluation;
  std::optional<EndpointConfig> augmentation;
};

/// Fully resolved configuration. Worker count and output paths are not part
/// of it: they never change output bytes.
nlohmann::json to_json(const ToolConfig &config);

/// Overlays the keys present in `j` onto `base`. Unknown keys and wrong types
/// throw ConfigError naming the key.
ToolConfig apply_config_json(ToolConfig base, const nlohmann::json &j);

/// Throws IoError / ConfigError.
ToolConfig load_config_file(const std::string &path, ToolConfig base = {});

/// Propagates the top-level seed into generation and balancing.
void resolve_seed(ToolConfig &config);

/// SHA-256 of the canonical resolved config.
std::string config_hash(const ToolConfig &config);

} // namespace tbx
