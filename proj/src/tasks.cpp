#include "tbx/tasks.hpp"

namespace tbx
{

namespace
{

constexpr std::array<std::string_view, 6> kSpatial{"back",  "back left",  "back right",
                                                   "front", "front left", "front right"};
constexpr std::array<std::string_view, 3> kOrientation{"opposite", "perpendicular", "similar"};
constexpr std::array<std::string_view, 4> kLaneToEgo{"front lane", "front left lane", "front right lane",
                                                     "oncoming traffic lane"};
constexpr std::array<std::string_view, 3> kLaneChange{"left lane change", "no change", "right lane change"};
constexpr std::array<std::string_view, 3> kTurn{"go straight", "left turn", "right turn"};

} // namespace

std::string_view to_string(TaskTag t)
{
  switch (t)
  {
  case TaskTag::RD:
    return "RD";
  case TaskTag::SR:
    return "SR";
  case TaskTag::OR:
    return "OR";
  case TaskTag::EGO_LANE:
    return "EGO_LANE";
  case TaskTag::OBJ_LANE:
    return "OBJ_LANE";
  case TaskTag::OBJ_TURN:
    return "OBJ_TURN";
  case TaskTag::EGO_TURN:
    return "EGO_TURN";
  case TaskTag::EGO_TRA:
    return "EGO_TRA";
  }
  return "RD";
}

std::string_view column_name(TaskTag t)
{
  switch (t)
  {
  case TaskTag::EGO_LANE:
    return "EGO-LANE";
  case TaskTag::OBJ_LANE:
    return "OBJ-LANE";
  case TaskTag::OBJ_TURN:
    return "OBJ-TURN";
  case TaskTag::EGO_TURN:
    return "EGO-TURN";
  case TaskTag::EGO_TRA:
    return "EGO-TRA";
  default:
    return to_string(t);
  }
}

std::optional<TaskTag> parse_task(std::string_view name)
{
  for (const auto t : kAllTasks)
  {
    if (name == to_string(t) || name == column_name(t))
      return t;
  }
  return std::nullopt;
}

std::size_t frames_for(TaskTag t)
{
  switch (t)
  {
  case TaskTag::RD:
  case TaskTag::SR:
  case TaskTag::OR:
    return 1;
  default:
    return 8;
  }
}

std::span<const std::string_view> class_labels(TaskTag t)
{
  switch (t)
  {
  case TaskTag::SR:
    return kSpatial;
  case TaskTag::OR:
    return kOrientation;
  case TaskTag::EGO_LANE:
    return kLaneToEgo;
  case TaskTag::OBJ_LANE:
    return kLaneChange;
  case TaskTag::OBJ_TURN:
  case TaskTag::EGO_TURN:
    return kTurn;
  default:
    return {};
  }
}

std::string_view to_string(Unit u) { return u == Unit::meters ? "meters" : "degrees"; }

std::optional<Unit> parse_unit(std::string_view name)
{
  if (name == "meters")
    return Unit::meters;
  if (name == "degrees")
    return Unit::degrees;
  return std::nullopt;
}

} // namespace tbx
