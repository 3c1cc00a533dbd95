#include "tbx/scenario_io.hpp"

#include <random>

#include <fmt/format.h>

#include "tbx/errors.hpp"
#include "tbx/hashing.hpp"

namespace tbx::sim
{

namespace
{

using json = nlohmann::json;

double num(const json &j, const char *key, double fallback, const std::string &where)
{
  if (!j.contains(key))
    return fallback;
  if (!j[key].is_number())
    throw ConfigError(fmt::format("scenario: '{}.{}' must be a number", where, key));
  return j[key].get<double>();
}

const json &obj(const json &j, const char *key, const std::string &where)
{
  if (!j.contains(key) || !j[key].is_object())
    throw ConfigError(fmt::format("scenario: '{}.{}' must be an object", where, key));
  return j[key];
}

json pose_json(const Pose &p)
{
  return {{"x", p.x}, {"y", p.y}, {"z", p.z}, {"yaw", p.yaw}};
}

json trajectory_json(const TrajectorySpec &t)
{
  return {{"kind", to_string(t.kind)},
          {"speed", t.speed},
          {"radius", t.radius},
          {"lateral_shift", t.lateral_shift},
          {"shift_start", t.shift_start},
          {"shift_duration", t.shift_duration},
          {"start", pose_json(t.start)},
          {"duration", t.duration}};
}

TrajectorySpec trajectory_from(const json &j, const std::string &where)
{
  if (!j.is_object())
    throw ConfigError(fmt::format("scenario: '{}' must be an object", where));
  TrajectorySpec t;
  if (j.contains("kind"))
  {
    if (!j["kind"].is_string())
      throw ConfigError(fmt::format("scenario: '{}.kind' must be a string", where));
    try
    {
      t.kind = parse_trajectory_kind(j["kind"].get<std::string>());
    }
    catch (const InvalidArgument &e)
    {
      throw ConfigError(fmt::format("scenario: '{}.kind': {}", where, e.what()));
    }
  }
  t.speed = num(j, "speed", 0.0, where);
  t.radius = num(j, "radius", 0.0, where);
  t.lateral_shift = num(j, "lateral_shift", 0.0, where);
  t.shift_start = num(j, "shift_start", 0.0, where);
  t.shift_duration = num(j, "shift_duration", 0.0, where);
  t.duration = num(j, "duration", 0.0, where);
  if (j.contains("start"))
  {
    const auto &s = obj(j, "start", where);
    const auto w = where + ".start";
    try
    {
      t.start = Pose(num(s, "x", 0.0, w), num(s, "y", 0.0, w), num(s, "z", 0.0, w), num(s, "yaw", 0.0, w));
    }
    catch (const InvalidArgument &e)
    {
      throw ConfigError(fmt::format("scenario: '{}': {}", w, e.what()));
    }
  }
  return t;
}

json camera_json(const CameraCalibration &c)
{
  std::vector<double> k;
  std::vector<double> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
    {
      k.push_back(c.intrinsics(i, j));
      r.push_back(c.ego_to_camera.linear()(i, j));
    }
  const Vec3 t = c.ego_to_camera.translation();
  return {{"K", k}, {"R", r}, {"t", {t.x(), t.y(), t.z()}}, {"width", c.image_width}, {"height", c.image_height}};
}

std::vector<double> numbers(const json &j, const char *key, std::size_t n, const std::string &where)
{
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != n)
    throw ConfigError(fmt::format("scenario: '{}.{}' must be an array of {} numbers", where, key, n));
  std::vector<double> out;
  for (const auto &v : j[key])
  {
    if (!v.is_number())
      throw ConfigError(fmt::format("scenario: '{}.{}' must be an array of {} numbers", where, key, n));
    out.push_back(v.get<double>());
  }
  return out;
}

int integer(const json &j, const char *key, const std::string &where)
{
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ConfigError(fmt::format("scenario: '{}.{}' must be an integer", where, key));
  return j[key].get<int>();
}

CameraCalibration camera_from(const json &j, const std::string &where)
{
  if (!j.is_object())
    throw ConfigError(fmt::format("scenario: '{}' must be an object", where));
  const int w = integer(j, "width", where);
  const int h = integer(j, "height", where);
  if (j.contains("K"))
  {
    const auto k = numbers(j, "K", 9, where);
    const auto r = numbers(j, "R", 9, where);
    const auto t = numbers(j, "t", 3, where);
    CameraCalibration c;
    Eigen::Matrix3d rm;
    for (int i = 0; i < 9; ++i)
    {
      c.intrinsics(i / 3, i % 3) = k[static_cast<std::size_t>(i)];
      rm(i / 3, i % 3) = r[static_cast<std::size_t>(i)];
    }
    c.ego_to_camera.linear() = rm;
    c.ego_to_camera.translation() = Vec3(t[0], t[1], t[2]);
    c.image_width = w;
    c.image_height = h;
    return c;
  }
  return forward_camera(num(j, "fx", 0.0, where), num(j, "fy", 0.0, where), num(j, "cx", w / 2.0, where),
                        num(j, "cy", h / 2.0, where), w, h, num(j, "mount_height", 1.6, where));
}

} // namespace

nlohmann::json to_json(const ScenarioSpec &s)
{
  json others = json::array();
  for (const auto &a : s.others)
  {
    others.push_back({{"id", a.id},
                      {"class", tbx::to_string(a.class_label)},
                      {"l", a.dimensions.length},
                      {"w", a.dimensions.width},
                      {"h", a.dimensions.height},
                      {"trajectory", trajectory_json(a.trajectory)}});
  }
  return {{"name", s.name},
          {"hz", s.hz},
          {"seed", s.seed},
          {"position_jitter", s.position_jitter},
          {"yaw_jitter", s.yaw_jitter},
          {"image_prefix", s.image_prefix},
          {"road",
           {{"lanes_per_direction", s.road.lanes_per_direction},
            {"lane_width", s.road.lane_width},
            {"length", s.road.length},
            {"curvature", s.road.curvature},
            {"two_way", s.road.two_way},
            {"segment_length", s.road.segment_length}}},
          {"ego", trajectory_json(s.ego)},
          {"others", others},
          {"camera", s.camera ? camera_json(*s.camera) : json(nullptr)}};
}

ScenarioSpec scenario_from_json(const nlohmann::json &j)
{
  if (!j.is_object())
    throw ConfigError("scenario: expected an object");
  ScenarioSpec s;
  if (j.contains("name"))
  {
    if (!j["name"].is_string())
      throw ConfigError("scenario: 'name' must be a string");
    s.name = j["name"].get<std::string>();
  }
  if (j.contains("image_prefix"))
  {
    if (!j["image_prefix"].is_string())
      throw ConfigError("scenario: 'image_prefix' must be a string");
    s.image_prefix = j["image_prefix"].get<std::string>();
  }
  s.hz = num(j, "hz", s.hz, "scenario");
  if (j.contains("seed"))
  {
    if (!(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0))
      throw ConfigError("scenario: 'seed' must be a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  s.position_jitter = num(j, "position_jitter", 0.0, "scenario");
  s.yaw_jitter = num(j, "yaw_jitter", 0.0, "scenario");
  if (j.contains("road"))
  {
    const auto &r = obj(j, "road", "scenario");
    if (r.contains("lanes_per_direction"))
      s.road.lanes_per_direction = integer(r, "lanes_per_direction", "road");
    s.road.lane_width = num(r, "lane_width", s.road.lane_width, "road");
    s.road.length = num(r, "length", s.road.length, "road");
    s.road.curvature = num(r, "curvature", s.road.curvature, "road");
    s.road.segment_length = num(r, "segment_length", s.road.segment_length, "road");
    if (r.contains("two_way"))
    {
      if (!r["two_way"].is_boolean())
        throw ConfigError("scenario: 'road.two_way' must be a boolean");
      s.road.two_way = r["two_way"].get<bool>();
    }
  }
  if (!j.contains("ego"))
    throw ConfigError("scenario: 'ego' trajectory is required");
  s.ego = trajectory_from(j["ego"], "ego");
  if (j.contains("others"))
  {
    if (!j["others"].is_array())
      throw ConfigError("scenario: 'others' must be an array");
    for (std::size_t i = 0; i < j["others"].size(); ++i)
    {
      const auto &o = j["others"][i];
      const auto where = fmt::format("others[{}]", i);
      if (!o.is_object() || !o.contains("id") || !o["id"].is_string())
        throw ConfigError(fmt::format("scenario: '{}' needs a string id", where));
      AgentSpec a;
      a.id = o["id"].get<std::string>();
      if (o.contains("class"))
      {
        try
        {
          a.class_label = parse_entity_class(o["class"].is_string() ? o["class"].get<std::string>() : "");
        }
        catch (const InvalidArgument &e)
        {
          throw ConfigError(fmt::format("scenario: '{}.class': {}", where, e.what()));
        }
      }
      a.dimensions = {num(o, "l", a.dimensions.length, where), num(o, "w", a.dimensions.width, where),
                      num(o, "h", a.dimensions.height, where)};
      if (!o.contains("trajectory"))
        throw ConfigError(fmt::format("scenario: '{}.trajectory' is required", where));
      a.trajectory = trajectory_from(o["trajectory"], where + ".trajectory");
      s.others.push_back(std::move(a));
    }
  }
  if (j.contains("camera") && !j["camera"].is_null())
    s.camera = camera_from(j["camera"], "camera");
  return s;
}

std::vector<ScenarioSpec> scenarios_from_json(const nlohmann::json &j)
{
  std::vector<ScenarioSpec> out;
  if (j.is_object() && j.contains("scenarios"))
  {
    if (!j["scenarios"].is_array())
      throw ConfigError("scenario: 'scenarios' must be an array");
    for (const auto &s : j["scenarios"])
      out.push_back(scenario_from_json(s));
  }
  else
  {
    out.push_back(scenario_from_json(j));
  }
  return out;
}

std::vector<ScenarioSpec> demo_corpus(std::uint64_t seed, std::size_t count, double duration)
{
  std::vector<ScenarioSpec> out;
  for (std::size_t k = 0; k < count; ++k)
  {
    auto rng = keyed_rng(seed, fmt::format("demo-corpus/{}", k));
    auto uni = [&rng](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    auto coin = [&rng](double p) { return std::bernoulli_distribution(p)(rng); };

    ScenarioSpec s;
    s.name = fmt::format("demo_{:03d}", k);
    s.seed = seed + k;
    s.hz = 10.0;
    s.road.lanes_per_direction = 2;
    s.road.lane_width = 3.5;
    s.road.length = 400.0;
    s.road.segment_length = 25.0;
    s.camera = forward_camera(700.0, 700.0, 640.0, 360.0, 1280, 720);

    const double w = s.road.lane_width;
    auto forward_d = [w](int lane) { return -(lane + 0.5) * w; };
    auto oncoming_d = [w](int lane) { return (lane + 0.5) * w; };

    const int ego_lane = coin(0.5) ? 0 : 1;
    const double x0 = 20.0;
    const double v = uni(6.0, 14.0);
    s.ego.speed = v;
    s.ego.duration = duration;
    s.ego.start = Pose(x0, forward_d(ego_lane), 0.0, 0.0);
    if (coin(0.35))
    {
      s.ego.kind = TrajectoryKind::arc;
      s.ego.radius = (coin(0.5) ? 1.0 : -1.0) * uni(20.0, 90.0);
    }

    auto agent = [&](std::string id, EntityClass cls, Dimensions dims, TrajectorySpec t) {
      t.duration = duration;
      s.others.push_back({std::move(id), cls, dims, t});
    };
    const Dimensions car{4.5, 1.9, 1.6};

    {
      TrajectorySpec t;
      t.speed = std::max(0.0, v + uni(-2.0, 2.0));
      t.start = Pose(x0 + uni(12.0, 30.0), forward_d(ego_lane), 0.0, 0.0);
      agent("lead", EntityClass::vehicle, car, t);
    }
    {
      const int lane = 1 - ego_lane;
      TrajectorySpec t;
      t.speed = v + uni(-1.5, 3.0);
      t.start = Pose(x0 + uni(-8.0, 30.0), forward_d(lane), 0.0, 0.0);
      if (coin(0.6))
      {
        t.kind = TrajectoryKind::lane_change;
        // lane 0 borders the oncoming side, so it can only move right
        t.lateral_shift = lane == 0 ? -w : w;
        t.shift_start = uni(0.5, duration - 4.0);
        t.shift_duration = uni(2.0, 4.0);
      }
      agent("nb", EntityClass::vehicle, car, t);
    }
    const int oncoming = coin(0.5) ? 2 : 1;
    for (int i = 0; i < oncoming; ++i)
    {
      TrajectorySpec t;
      t.speed = uni(6.0, 14.0);
      t.start = Pose(x0 + uni(40.0, 160.0), oncoming_d(i), 0.0, kPi);
      agent(fmt::format("onc{}", i), EntityClass::vehicle, car, t);
    }
    if (coin(0.6))
    {
      TrajectorySpec t;
      t.kind = TrajectoryKind::arc;
      t.speed = uni(4.0, 9.0);
      t.radius = (coin(0.5) ? 1.0 : -1.0) * uni(12.0, 45.0);
      t.start = Pose(x0 + uni(10.0, 40.0), forward_d(coin(0.5) ? 0 : 1), 0.0, 0.0);
      agent("turn", EntityClass::vehicle, car, t);
    }
    if (coin(0.5))
    {
      TrajectorySpec t;
      t.speed = 1.4;
      t.start = Pose(x0 + uni(5.0, 40.0), -(2.0 * w + 1.5), 0.0, coin(0.5) ? 0.0 : kPi);
      agent("ped", EntityClass::pedestrian, {0.6, 0.6, 1.75}, t);
    }
    if (coin(0.3))
    {
      TrajectorySpec t;
      t.speed = uni(3.0, 6.0);
      t.start = Pose(x0 + uni(5.0, 30.0), forward_d(1) - 1.0, 0.0, 0.0);
      agent("cyc", EntityClass::cyclist, {1.8, 0.6, 1.7}, t);
    }
    out.push_back(std::move(s));
  }
  return out;
}

} // namespace tbx::sim
