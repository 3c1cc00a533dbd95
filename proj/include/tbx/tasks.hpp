#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace tbx
{

enum class TaskTag
{
  RD,
  SR,
  OR,
  EGO_LANE,
  OBJ_LANE,
  OBJ_TURN,
  EGO_TURN,
  EGO_TRA
};

/// All tasks in report column order.
inline constexpr std::array<TaskTag, 8> kAllTasks{TaskTag::RD,       TaskTag::SR,       TaskTag::OR,
                                                  TaskTag::EGO_LANE, TaskTag::OBJ_LANE, TaskTag::OBJ_TURN,
                                                  TaskTag::EGO_TURN, TaskTag::EGO_TRA};

/// Serialized tag, e.g. "EGO_LANE".
std::string_view to_string(TaskTag t);
/// Report column header, e.g. "EGO-LANE".
std::string_view column_name(TaskTag t);
/// Accepts both the serialized tag and the column header spelling.
std::optional<TaskTag> parse_task(std::string_view name);

/// Frames a sample of this task carries: 1 for single-image tasks, 8 otherwise.
std::size_t frames_for(TaskTag t);

/// Allowed class labels in fixed order; empty for purely numeric tasks.
/// OR returns its class-subtype labels.
std::span<const std::string_view> class_labels(TaskTag t);

enum class Unit
{
  meters,
  degrees
};

std::string_view to_string(Unit u);
std::optional<Unit> parse_unit(std::string_view name);

/// Category used for balancing and statistics for numeric answers.
inline constexpr std::string_view kNumericCategory = "numerical value";

} // namespace tbx
