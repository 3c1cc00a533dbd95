#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tbx/scene_model.hpp"

namespace tbx
{

enum class LaneToEgoClass
{
  front_lane,
  front_left_lane,
  front_right_lane,
  oncoming_traffic_lane
};

enum class LaneChangeClass
{
  left_lane_change,
  no_change,
  right_lane_change
};

std::string_view to_string(LaneToEgoClass c);
std::string_view to_string(LaneChangeClass c);

/// Lane whose boundary polygon contains the point; when several do, the one
/// with the nearest centerline (first in graph order on exact ties).
std::optional<std::string> assign_lane(const Vec2 &position, const LaneGraph &graph);

/// World-frame heading (radians) of the centerline segment nearest to position.
/// Throws InvalidLane when the centerline has no segment of positive length.
double lane_direction_at(const LaneSegment &lane, const Vec2 &position);

struct LaneClassifyOptions
{
  /// Heading difference (degrees) at or above which a lane counts as oncoming.
  double oncoming_threshold_deg = 135.0;
  /// Depth of the successor / predecessor search that defines the ego chain.
  int front_chain_depth = 5;
};

/// Lanes reachable from `lane_id` through successors, or through
/// predecessors, within `depth` hops. Includes the lane itself.
std::set<std::string> lane_chain(const LaneGraph &graph, std::string_view lane_id, int depth);

/// Relative lane class of the entity lane seen from the ego vehicle.
/// Rules, in order: oncoming when the entity lane heading opposes the ego
/// heading; front lane when the entity lane is on the ego lane chain;
/// otherwise left / right by the lateral side of the entity lane's centerline
/// (closest point to the ego) in the ego frame.
/// Throws InvalidArgument when a lane id does not resolve.
LaneToEgoClass classify_lane_to_ego(std::string_view entity_lane, std::string_view ego_lane,
                                    const Pose &ego_pose, const LaneGraph &graph,
                                    const LaneClassifyOptions &options = {});

/// Event rule over one step: right change when the lane is in the right
/// neighbor set, else left change when it is in the left neighbor set, else
/// no change. Right is checked first.
LaneChangeClass detect_lane_change(std::string_view lane_id,
                                   const std::set<std::string> &left_neighbors,
                                   const std::set<std::string> &right_neighbors);

/// First lane change found along a lane-occupancy timeline, as the step index
/// of the first frame in the new lane.
struct LaneChangeEvent
{
  LaneChangeClass label = LaneChangeClass::no_change;
  std::optional<std::size_t> frame;
};

/// Scans consecutive occupied lanes (from, to): the rule is applied to `to`
/// against the neighbor sets of `from`, i.e. the lane reached at the next step
/// is looked up among the neighbors the vehicle had before moving (and the
/// neighbors of that lane's direct successors).
/// Steps with an unassigned lane on either side are skipped.
LaneChangeEvent lane_change_over_timeline(const std::vector<std::optional<std::string>> &lanes,
                                          const LaneGraph &graph);

} // namespace tbx
