#pragma once

// Scenario spec files for the simulator, and a seeded demo corpus.

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "tbx/synthetic_scenes.hpp"

namespace tbx::sim
{

/// {"name", "hz", "seed", "position_jitter", "yaw_jitter", "image_prefix",
///  "road": {...}, "ego": trajectory, "others": [{"id", "class", "l", "w", "h", "trajectory"}],
///  "camera": {"fx", "fy", "cx", "cy", "width", "height", "mount_height"} | {"K", "R", "t", "width", "height"} | null}
nlohmann::json to_json(const ScenarioSpec &spec);
/// Throws ConfigError naming the offending key.
ScenarioSpec scenario_from_json(const nlohmann::json &j);

/// A single scenario object, or {"scenarios": [...]}.
std::vector<ScenarioSpec> scenarios_from_json(const nlohmann::json &j);

/// Urban two-way road scenes: car following, neighbours changing lanes,
/// oncoming traffic, turning vehicles and pedestrians, with a front camera.
/// Deterministic in (seed, count).
std::vector<ScenarioSpec> demo_corpus(std::uint64_t seed, std::size_t count, double duration = 15.0);

} // namespace tbx::sim
