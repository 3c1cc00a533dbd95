#pragma once

// Deterministic kinematic scenes with closed-form ground truth.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tbx/scene_model.hpp"

namespace tbx::sim
{

enum class TrajectoryKind
{
  straight,
  arc,
  lane_change
};

std::string_view to_string(TrajectoryKind k);
TrajectoryKind parse_trajectory_kind(std::string_view name);

/// Closed-form planar motion from `start`.
///
/// straight:    p(t) = p0 + v t dir
/// arc:         constant curvature 1/radius, positive radius turns left,
///              yaw(t) = yaw0 + v t / radius
/// lane_change: straight base motion plus a lateral offset blended with the
///              smoothstep 3u^2 - 2u^3 over [shift_start, shift_start + shift_duration];
///              positive lateral_shift moves left.
struct TrajectorySpec
{
  TrajectoryKind kind = TrajectoryKind::straight;
  double speed = 0.0;
  double radius = 0.0;
  double lateral_shift = 0.0;
  double shift_start = 0.0;
  double shift_duration = 0.0;
  Pose start;
  double duration = 0.0;

  Vec2 position(double t) const;
  /// Continuous (unwrapped) heading.
  double heading(double t) const;
  Pose pose(double t) const;
  /// Exact heading change over [t0, t1] in degrees, unwrapped.
  double yaw_change_deg(double t0, double t1) const;
  /// Path length over [t0, t1].
  double path_length(double t0, double t1) const;
};

/// Problems with the trajectory spec, empty when valid.
std::vector<std::string> trajectory_problems(const TrajectorySpec &spec);

/// Road starting at the world origin heading +x. Forward lanes lie to the
/// right of the reference line, oncoming lanes (when two_way) to the left.
struct RoadSpec
{
  int lanes_per_direction = 2;
  double lane_width = 3.5;
  double length = 200.0;
  double curvature = 0.0; ///< 1/m, positive curves left
  bool two_way = true;
  double segment_length = 25.0;
};

std::vector<std::string> road_problems(const RoadSpec &road);

/// Road coordinates: arc length along the reference line and signed lateral
/// offset (positive left).
struct RoadCoord
{
  double s = 0.0;
  double d = 0.0;
};

Vec2 road_point(const RoadSpec &road, double s, double d);
double road_heading(const RoadSpec &road, double s);
RoadCoord to_road(const RoadSpec &road, const Vec2 &world);

/// Lane graph for the road. Ids: "F<i>_S<k>" forward lane i (0 next to the
/// reference line) in segment k, "B<j>_S<k>" for the oncoming side.
LaneGraph build_lane_graph(const RoadSpec &road);

/// Lane containing the point from road coordinates alone, nullopt off road.
std::optional<std::string> analytic_lane(const RoadSpec &road, const Vec2 &world);

struct AgentSpec
{
  std::string id;
  EntityClass class_label = EntityClass::vehicle;
  Dimensions dimensions{4.5, 1.9, 1.6};
  TrajectorySpec trajectory;
};

struct ScenarioSpec
{
  std::string name = "sim";
  RoadSpec road;
  TrajectorySpec ego;
  std::vector<AgentSpec> others;
  double hz = 10.0;
  std::uint64_t seed = 0;
  /// Gaussian jitter (meters / radians); zero disables noise.
  double position_jitter = 0.0;
  double yaw_jitter = 0.0;
  /// Camera attached to every frame; absent means frames carry no calibration.
  std::optional<CameraCalibration> camera;
  std::string image_prefix = "frames";
};

std::vector<std::string> scenario_problems(const ScenarioSpec &spec);

struct AgentLabels
{
  std::string id;
  std::vector<Pose> world_poses;
  std::vector<std::optional<std::string>> lanes;
  /// First frame whose lane is a neighbor of the previous frame's lane.
  std::optional<std::size_t> lane_change_frame;
  /// +1 left, -1 right, 0 none.
  int lane_change_direction = 0;
};

struct PairLabel
{
  std::string reference;
  std::string target;
  double distance = 0.0;
  double bearing_deg = 0.0;
  double heading_difference_deg = 0.0;
};

struct AnalyticLabels
{
  std::vector<double> timestamps;
  AgentLabels ego;
  std::vector<AgentLabels> others;
  /// Per frame, every ordered pair among ego ("ego") and the others.
  std::vector<std::vector<PairLabel>> pairs;

  const AgentLabels *agent(std::string_view id) const;
};

/// Frame timestamps k / hz for k in [0, floor(duration * hz)).
std::vector<double> frame_times(double duration, double hz);

/// Closed-form labels for the scenario; needs no simulation.
AnalyticLabels analytic_labels(const ScenarioSpec &spec);

struct SimulationResult
{
  SequenceObservation sequence;
  AnalyticLabels labels;
};

/// Throws InvalidArgument listing every spec problem.
SimulationResult simulate(const ScenarioSpec &spec);

} // namespace tbx::sim
