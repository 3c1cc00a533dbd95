#include "tbx/synthetic_scenes.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "tbx/geometry.hpp"

namespace tbx::sim
{

std::string_view to_string(TrajectoryKind k)
{
  switch (k)
  {
  case TrajectoryKind::straight:
    return "straight";
  case TrajectoryKind::arc:
    return "arc";
  case TrajectoryKind::lane_change:
    return "lane_change";
  }
  return "straight";
}

TrajectoryKind parse_trajectory_kind(std::string_view name)
{
  if (name == "straight")
    return TrajectoryKind::straight;
  if (name == "arc")
    return TrajectoryKind::arc;
  if (name == "lane_change")
    return TrajectoryKind::lane_change;
  throw InvalidArgument(fmt::format("unknown trajectory kind '{}'", name));
}

namespace
{

Vec2 direction(double yaw) { return {std::cos(yaw), std::sin(yaw)}; }
Vec2 left_normal(double yaw) { return {-std::sin(yaw), std::cos(yaw)}; }

double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }

struct Lateral
{
  double offset = 0.0;
  double rate = 0.0;
};

Lateral lateral_profile(const TrajectorySpec &spec, double t)
{
  const double u = (t - spec.shift_start) / spec.shift_duration;
  if (u <= 0.0)
    return {};
  if (u >= 1.0)
    return {spec.lateral_shift, 0.0};
  return {spec.lateral_shift * smoothstep(u), spec.lateral_shift * 6.0 * u * (1.0 - u) / spec.shift_duration};
}

} // namespace

Vec2 TrajectorySpec::position(double t) const
{
  const Vec2 p0 = start.xy();
  switch (kind)
  {
  case TrajectoryKind::straight:
    return p0 + speed * t * direction(start.yaw);
  case TrajectoryKind::arc: {
    const Vec2 center = p0 + radius * left_normal(start.yaw);
    const double theta = start.yaw + speed * t / radius;
    return center + radius * Vec2(std::sin(theta), -std::cos(theta));
  }
  case TrajectoryKind::lane_change: {
    const auto lat = lateral_profile(*this, t);
    return p0 + speed * t * direction(start.yaw) + lat.offset * left_normal(start.yaw);
  }
  }
  return p0;
}

double TrajectorySpec::heading(double t) const
{
  switch (kind)
  {
  case TrajectoryKind::straight:
    return start.yaw;
  case TrajectoryKind::arc:
    return start.yaw + speed * t / radius;
  case TrajectoryKind::lane_change: {
    const auto lat = lateral_profile(*this, t);
    return start.yaw + std::atan2(lat.rate, speed);
  }
  }
  return start.yaw;
}

Pose TrajectorySpec::pose(double t) const
{
  const Vec2 p = position(t);
  return Pose(p.x(), p.y(), start.z, heading(t));
}

double TrajectorySpec::yaw_change_deg(double t0, double t1) const
{
  if (kind == TrajectoryKind::arc)
  {
    return to_degrees(speed * (t1 - t0) / radius);
  }
  return to_degrees(heading(t1) - heading(t0));
}

double TrajectorySpec::path_length(double t0, double t1) const
{
  if (kind != TrajectoryKind::lane_change)
  {
    return speed * (t1 - t0);
  }
  // Simpson's rule on |p'(t)|
  constexpr int n = 2000;
  const double h = (t1 - t0) / n;
  auto speed_at = [this](double t) {
    const auto lat = lateral_profile(*this, t);
    return std::hypot(speed, lat.rate);
  };
  double sum = speed_at(t0) + speed_at(t1);
  for (int i = 1; i < n; ++i)
  {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * speed_at(t0 + i * h);
  }
  return sum * h / 3.0;
}

std::vector<std::string> trajectory_problems(const TrajectorySpec &spec)
{
  std::vector<std::string> out;
  if (!std::isfinite(spec.speed) || spec.speed < 0.0)
    out.emplace_back("speed must be finite and >= 0");
  if (!std::isfinite(spec.duration) || !(spec.duration > 0.0))
    out.emplace_back("duration must be > 0");
  if (spec.kind == TrajectoryKind::arc && (!std::isfinite(spec.radius) || spec.radius == 0.0))
    out.emplace_back("arc radius must be finite and non-zero");
  if (spec.kind == TrajectoryKind::lane_change)
  {
    if (!std::isfinite(spec.shift_duration) || !(spec.shift_duration > 0.0))
      out.emplace_back("lane change shift_duration must be > 0");
    if (!std::isfinite(spec.lateral_shift) || !std::isfinite(spec.shift_start))
      out.emplace_back("lane change shift parameters must be finite");
  }
  return out;
}

std::vector<std::string> road_problems(const RoadSpec &road)
{
  std::vector<std::string> out;
  if (road.lanes_per_direction < 1)
    out.emplace_back("lanes_per_direction must be >= 1");
  if (!std::isfinite(road.lane_width) || !(road.lane_width > 0.0))
    out.emplace_back("lane_width must be > 0");
  if (!std::isfinite(road.length) || !(road.length > 0.0))
    out.emplace_back("length must be > 0");
  if (!std::isfinite(road.segment_length) || !(road.segment_length > 0.0))
    out.emplace_back("segment_length must be > 0");
  if (!std::isfinite(road.curvature))
  {
    out.emplace_back("curvature must be finite");
  }
  else if (road.curvature != 0.0)
  {
    const double half_width = road.lanes_per_direction * road.lane_width;
    if (std::abs(road.curvature) * half_width >= 1.0)
      out.emplace_back("curvature too tight for the road width");
    if (std::abs(road.curvature) * road.length > kPi)
      out.emplace_back("curved road may span at most a half circle");
  }
  return out;
}

Vec2 road_point(const RoadSpec &road, double s, double d)
{
  if (road.curvature == 0.0)
  {
    return {s, d};
  }
  const double k = road.curvature;
  const double theta = k * s;
  const Vec2 ref(std::sin(theta) / k, (1.0 - std::cos(theta)) / k);
  return ref + d * left_normal(theta);
}

double road_heading(const RoadSpec &road, double s) { return road.curvature * s; }

RoadCoord to_road(const RoadSpec &road, const Vec2 &world)
{
  if (road.curvature == 0.0)
  {
    return {world.x(), world.y()};
  }
  const double k = road.curvature;
  const double r0 = 1.0 / k;
  const Vec2 v = world - Vec2(0.0, r0);
  const double sgn = k > 0.0 ? 1.0 : -1.0;
  const double theta = std::atan2(v.x() * sgn, -v.y() * sgn);
  return {theta / k, r0 - sgn * v.norm()};
}

namespace
{

std::string lane_name(char side, int index, int segment)
{
  return fmt::format("{}{}_S{}", side, index, segment);
}

int segment_count(const RoadSpec &road)
{
  return std::max(1, static_cast<int>(std::ceil(road.length / road.segment_length - 1e-9)));
}

std::vector<Vec2> sample_offset(const RoadSpec &road, double s0, double s1, double d)
{
  std::vector<Vec2> pts;
  const int steps = road.curvature == 0.0 ? 1 : std::max(2, static_cast<int>(std::ceil(s1 - s0)));
  for (int i = 0; i <= steps; ++i)
  {
    pts.push_back(road_point(road, s0 + (s1 - s0) * i / steps, d));
  }
  return pts;
}

} // namespace

LaneGraph build_lane_graph(const RoadSpec &road)
{
  const int n = road.lanes_per_direction;
  const int segments = segment_count(road);
  const double w = road.lane_width;
  std::vector<LaneSegment> lanes;

  for (const char side : {'F', 'B'})
  {
    if (side == 'B' && !road.two_way)
      continue;
    // forward lanes at negative offsets, oncoming at positive
    const double sgn = side == 'F' ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i)
    {
      for (int k = 0; k < segments; ++k)
      {
        const double s0 = k * road.segment_length;
        const double s1 = std::min(road.length, (k + 1) * road.segment_length);
        LaneSegment lane;
        lane.lane_id = lane_name(side, i, k);
        const double inner = sgn * i * w;
        const double outer = sgn * (i + 1) * w;
        lane.centerline = sample_offset(road, s0, s1, sgn * (i + 0.5) * w);
        auto inner_pts = sample_offset(road, s0, s1, inner);
        auto outer_pts = sample_offset(road, s0, s1, outer);
        lane.boundary_polygon = inner_pts;
        lane.boundary_polygon.insert(lane.boundary_polygon.end(), outer_pts.rbegin(), outer_pts.rend());
        if (side == 'B')
        {
          std::reverse(lane.centerline.begin(), lane.centerline.end());
        }
        // neighbors are numbered outward on both sides; index + 1 is to the right
        if (i > 0)
          lane.left_neighbor_id = lane_name(side, i - 1, k);
        if (i + 1 < n)
          lane.right_neighbor_id = lane_name(side, i + 1, k);
        const int next = side == 'F' ? k + 1 : k - 1;
        const int prev = side == 'F' ? k - 1 : k + 1;
        if (next >= 0 && next < segments)
          lane.successor_ids.push_back(lane_name(side, i, next));
        if (prev >= 0 && prev < segments)
          lane.predecessor_ids.push_back(lane_name(side, i, prev));
        lanes.push_back(std::move(lane));
      }
    }
  }
  return LaneGraph(std::move(lanes));
}

std::optional<std::string> analytic_lane(const RoadSpec &road, const Vec2 &world)
{
  const RoadCoord rc = to_road(road, world);
  if (rc.s < 0.0 || rc.s > road.length)
    return std::nullopt;
  const int segments = segment_count(road);
  const int k = std::min(segments - 1, static_cast<int>(std::floor(rc.s / road.segment_length)));
  const double w = road.lane_width;
  if (rc.d <= 0.0)
  {
    const int i = static_cast<int>(std::floor(-rc.d / w));
    if (i >= road.lanes_per_direction)
      return std::nullopt;
    return lane_name('F', i, k);
  }
  if (!road.two_way)
    return std::nullopt;
  const int j = static_cast<int>(std::floor(rc.d / w));
  if (j >= road.lanes_per_direction)
    return std::nullopt;
  return lane_name('B', j, k);
}

std::vector<std::string> scenario_problems(const ScenarioSpec &spec)
{
  std::vector<std::string> out;
  for (const auto &p : road_problems(spec.road))
    out.push_back("road: " + p);
  for (const auto &p : trajectory_problems(spec.ego))
    out.push_back("ego: " + p);
  std::vector<std::string> ids{"ego"};
  for (const auto &o : spec.others)
  {
    for (const auto &p : trajectory_problems(o.trajectory))
      out.push_back(fmt::format("{}: {}", o.id, p));
    if (o.id.empty())
      out.emplace_back("agent id must be non-empty");
    if (std::find(ids.begin(), ids.end(), o.id) != ids.end())
      out.push_back(fmt::format("duplicate agent id '{}'", o.id));
    ids.push_back(o.id);
    if (!(o.dimensions.length > 0.0) || !(o.dimensions.width > 0.0) || !(o.dimensions.height > 0.0))
      out.push_back(fmt::format("{}: dimensions must be positive", o.id));
  }
  if (!std::isfinite(spec.hz) || !(spec.hz > 0.0))
    out.emplace_back("hz must be > 0");
  if (spec.position_jitter < 0.0 || spec.yaw_jitter < 0.0)
    out.emplace_back("jitter must be >= 0");
  if (spec.camera)
  {
    for (const auto &p : calibration_problems(*spec.camera))
      out.push_back("camera: " + p);
  }
  return out;
}

const AgentLabels *AnalyticLabels::agent(std::string_view id) const
{
  if (id == ego.id)
    return &ego;
  for (const auto &o : others)
  {
    if (o.id == id)
      return &o;
  }
  return nullptr;
}

std::vector<double> frame_times(double duration, double hz)
{
  const auto n = static_cast<std::size_t>(std::floor(duration * hz + 1e-9));
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k)
  {
    out[k] = static_cast<double>(k) / hz;
  }
  return out;
}

namespace
{

struct LaneIndex
{
  char side;
  int index;
};

std::optional<LaneIndex> parse_lane_index(const std::string &id)
{
  if (id.size() < 4 || (id[0] != 'F' && id[0] != 'B'))
    return std::nullopt;
  return LaneIndex{id[0], std::stoi(id.substr(1, id.find('_') - 1))};
}

AgentLabels label_agent(const ScenarioSpec &spec, const std::string &id, const TrajectorySpec &traj,
                        const std::vector<double> &times)
{
  AgentLabels out;
  out.id = id;
  for (const double t : times)
  {
    const Pose p = traj.pose(t);
    out.world_poses.push_back(p);
    out.lanes.push_back(analytic_lane(spec.road, p.xy()));
  }
  for (std::size_t k = 1; k < out.lanes.size(); ++k)
  {
    if (!out.lanes[k - 1] || !out.lanes[k])
      continue;
    const auto a = parse_lane_index(*out.lanes[k - 1]);
    const auto b = parse_lane_index(*out.lanes[k]);
    if (a && b && a->side == b->side && std::abs(a->index - b->index) == 1)
    {
      out.lane_change_frame = k;
      out.lane_change_direction = b->index > a->index ? -1 : +1;
      break;
    }
  }
  return out;
}

} // namespace

AnalyticLabels analytic_labels(const ScenarioSpec &spec)
{
  AnalyticLabels labels;
  labels.timestamps = frame_times(spec.ego.duration, spec.hz);
  labels.ego = label_agent(spec, "ego", spec.ego, labels.timestamps);
  for (const auto &o : spec.others)
  {
    labels.others.push_back(label_agent(spec, o.id, o.trajectory, labels.timestamps));
  }

  std::vector<const AgentLabels *> agents{&labels.ego};
  for (const auto &o : labels.others)
    agents.push_back(&o);
  labels.pairs.resize(labels.timestamps.size());
  for (std::size_t k = 0; k < labels.timestamps.size(); ++k)
  {
    for (const auto *ref : agents)
    {
      for (const auto *tgt : agents)
      {
        if (ref == tgt)
          continue;
        const Pose &a = ref->world_poses[k];
        const Pose &b = tgt->world_poses[k];
        PairLabel pl;
        pl.reference = ref->id;
        pl.target = tgt->id;
        pl.distance = relative_distance(a, b);
        pl.bearing_deg = pl.distance > 1e-12 ? bearing_angle(a, b) : 0.0;
        pl.heading_difference_deg = heading_difference(a, b);
        labels.pairs[k].push_back(std::move(pl));
      }
    }
  }
  return labels;
}

SimulationResult simulate(const ScenarioSpec &spec)
{
  const auto problems = scenario_problems(spec);
  if (!problems.empty())
  {
    std::string msg = "invalid scenario:";
    for (const auto &p : problems)
      msg += " " + p + ";";
    throw InvalidArgument(msg);
  }

  SimulationResult result;
  result.labels = analytic_labels(spec);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> pos_noise(0.0, 1.0);
  auto jitter = [&](Pose p) {
    if (spec.position_jitter > 0.0 || spec.yaw_jitter > 0.0)
    {
      p = Pose(p.x + spec.position_jitter * pos_noise(rng), p.y + spec.position_jitter * pos_noise(rng), p.z,
               p.yaw + spec.yaw_jitter * pos_noise(rng));
    }
    return p;
  };

  auto &seq = result.sequence;
  seq.meta.name = spec.name;
  seq.meta.dataset = "synthetic";
  seq.meta.frequency_hz = spec.hz;
  seq.lane_graph = build_lane_graph(spec.road);

  const auto &times = result.labels.timestamps;
  for (std::size_t k = 0; k < times.size(); ++k)
  {
    FrameObservation frame;
    frame.timestamp = times[k];
    frame.ego_pose = jitter(result.labels.ego.world_poses[k]);
    for (std::size_t a = 0; a < spec.others.size(); ++a)
    {
      const auto &agent = spec.others[a];
      const Pose world = jitter(result.labels.others[a].world_poses[k]);
      EntityObservation e;
      e.entity_id = agent.id;
      e.class_label = agent.class_label;
      e.dimensions = agent.dimensions;
      e.pose = relative_to(frame.ego_pose, world);
      frame.entities.push_back(std::move(e));
    }
    frame.image_ref = fmt::format("{}/{}/{:06d}.ppm", spec.image_prefix, spec.name, k);
    frame.calibration = spec.camera;
    seq.frames.push_back(std::move(frame));
  }
  return result;
}

} // namespace tbx::sim
