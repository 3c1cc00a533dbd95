#include "tbx/lane_analysis.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include <fmt/format.h>

#include "tbx/geometry.hpp"

namespace tbx
{

std::string_view to_string(LaneToEgoClass c)
{
  switch (c)
  {
  case LaneToEgoClass::front_lane:
    return "front lane";
  case LaneToEgoClass::front_left_lane:
    return "front left lane";
  case LaneToEgoClass::front_right_lane:
    return "front right lane";
  case LaneToEgoClass::oncoming_traffic_lane:
    return "oncoming traffic lane";
  }
  return "front lane";
}

std::string_view to_string(LaneChangeClass c)
{
  switch (c)
  {
  case LaneChangeClass::left_lane_change:
    return "left lane change";
  case LaneChangeClass::no_change:
    return "no change";
  case LaneChangeClass::right_lane_change:
    return "right lane change";
  }
  return "no change";
}

std::optional<std::string> assign_lane(const Vec2 &position, const LaneGraph &graph)
{
  const LaneSegment *best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto &lane : graph.lanes())
  {
    if (!polygon_contains(lane.boundary_polygon, position))
      continue;
    const auto proj = project_onto_polyline(lane.centerline, position);
    const double d = proj ? proj->distance : std::numeric_limits<double>::infinity();
    if (best == nullptr || d < best_dist)
    {
      best = &lane;
      best_dist = d;
    }
  }
  if (best == nullptr)
    return std::nullopt;
  return best->lane_id;
}

double lane_direction_at(const LaneSegment &lane, const Vec2 &position)
{
  const auto proj = project_onto_polyline(lane.centerline, position);
  if (!proj)
  {
    throw InvalidLane(fmt::format("lane '{}' has a degenerate centerline", lane.lane_id));
  }
  const Vec2 d = lane.centerline[proj->segment + 1] - lane.centerline[proj->segment];
  return std::atan2(d.y(), d.x());
}

std::set<std::string> lane_chain(const LaneGraph &graph, std::string_view lane_id, int depth)
{
  std::set<std::string> chain{std::string(lane_id)};
  for (const bool forward : {true, false})
  {
    std::deque<std::pair<std::string, int>> queue{{std::string(lane_id), 0}};
    std::set<std::string> visited{std::string(lane_id)};
    while (!queue.empty())
    {
      auto [id, d] = queue.front();
      queue.pop_front();
      if (d >= depth)
        continue;
      const auto *lane = graph.find(id);
      if (lane == nullptr)
        continue;
      for (const auto &next : forward ? lane->successor_ids : lane->predecessor_ids)
      {
        if (visited.insert(next).second)
        {
          chain.insert(next);
          queue.emplace_back(next, d + 1);
        }
      }
    }
  }
  return chain;
}

LaneToEgoClass classify_lane_to_ego(std::string_view entity_lane, std::string_view ego_lane,
                                    const Pose &ego_pose, const LaneGraph &graph,
                                    const LaneClassifyOptions &options)
{
  const LaneSegment &target = graph.at(entity_lane);
  graph.at(ego_lane);

  const auto proj = project_onto_polyline(target.centerline, ego_pose.xy());
  if (!proj)
  {
    throw InvalidLane(fmt::format("lane '{}' has a degenerate centerline", target.lane_id));
  }
  const double lane_heading = lane_direction_at(target, ego_pose.xy());
  const double diff = std::abs(to_degrees(normalize_angle(lane_heading - ego_pose.yaw)));
  if (diff >= options.oncoming_threshold_deg)
  {
    return LaneToEgoClass::oncoming_traffic_lane;
  }
  if (lane_chain(graph, ego_lane, options.front_chain_depth).count(std::string(entity_lane)))
  {
    return LaneToEgoClass::front_lane;
  }
  const Vec2 rel = proj->point - ego_pose.xy();
  const double lateral = -std::sin(ego_pose.yaw) * rel.x() + std::cos(ego_pose.yaw) * rel.y();
  return lateral > 0.0 ? LaneToEgoClass::front_left_lane : LaneToEgoClass::front_right_lane;
}

LaneChangeClass detect_lane_change(std::string_view lane_id,
                                   const std::set<std::string> &left_neighbors,
                                   const std::set<std::string> &right_neighbors)
{
  const std::string id(lane_id);
  if (right_neighbors.count(id))
    return LaneChangeClass::right_lane_change;
  if (left_neighbors.count(id))
    return LaneChangeClass::left_lane_change;
  return LaneChangeClass::no_change;
}

LaneChangeEvent lane_change_over_timeline(const std::vector<std::optional<std::string>> &lanes,
                                          const LaneGraph &graph)
{
  for (std::size_t i = 0; i + 1 < lanes.size(); ++i)
  {
    if (!lanes[i] || !lanes[i + 1])
      continue;
    const auto *from = graph.find(*lanes[i]);
    if (from == nullptr)
      continue;
    std::set<std::string> left;
    std::set<std::string> right;
    auto collect = [&](const LaneSegment &lane) {
      if (lane.left_neighbor_id)
        left.insert(*lane.left_neighbor_id);
      if (lane.right_neighbor_id)
        right.insert(*lane.right_neighbor_id);
    };
    collect(*from);
    // a change that coincides with a segment boundary lands beside a successor
    for (const auto &succ : from->successor_ids)
    {
      if (const auto *s = graph.find(succ))
        collect(*s);
    }
    const auto label = detect_lane_change(*lanes[i + 1], left, right);
    if (label != LaneChangeClass::no_change)
    {
      return {label, i + 1};
    }
  }
  return {};
}

} // namespace tbx
