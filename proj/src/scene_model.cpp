#include "tbx/scene_model.hpp"

#include <cmath>
#include <set>
#include <unordered_set>

#include <fmt/format.h>

namespace tbx
{

double normalize_angle(double radians)
{
  if (!std::isfinite(radians))
  {
    throw InvalidArgument("normalize_angle: non-finite angle");
  }
  double r = std::remainder(radians, 2.0 * kPi);
  if (r <= -kPi)
  {
    r += 2.0 * kPi;
  }
  return r;
}

double normalize_degrees(double degrees)
{
  if (!std::isfinite(degrees))
  {
    throw InvalidArgument("normalize_degrees: non-finite angle");
  }
  double r = std::remainder(degrees, 360.0);
  if (r <= -180.0)
  {
    r += 360.0;
  }
  return r;
}

Pose::Pose(double x_, double y_, double z_, double yaw_) : x(x_), y(y_), z(z_)
{
  if (!std::isfinite(x_) || !std::isfinite(y_) || !std::isfinite(z_))
  {
    throw InvalidArgument("Pose: non-finite position");
  }
  yaw = normalize_angle(yaw_);
}

Pose compose(const Pose &frame, const Pose &local)
{
  const double c = std::cos(frame.yaw);
  const double s = std::sin(frame.yaw);
  return Pose(frame.x + c * local.x - s * local.y, frame.y + s * local.x + c * local.y,
              frame.z + local.z, frame.yaw + local.yaw);
}

Pose relative_to(const Pose &frame, const Pose &world)
{
  const double c = std::cos(frame.yaw);
  const double s = std::sin(frame.yaw);
  const double dx = world.x - frame.x;
  const double dy = world.y - frame.y;
  return Pose(c * dx + s * dy, -s * dx + c * dy, world.z - frame.z, world.yaw - frame.yaw);
}

std::string_view to_string(EntityClass c)
{
  switch (c)
  {
  case EntityClass::vehicle:
    return "vehicle";
  case EntityClass::pedestrian:
    return "pedestrian";
  case EntityClass::cyclist:
    return "cyclist";
  case EntityClass::other:
    return "other";
  }
  return "other";
}

EntityClass parse_entity_class(std::string_view name)
{
  if (name == "vehicle")
    return EntityClass::vehicle;
  if (name == "pedestrian")
    return EntityClass::pedestrian;
  if (name == "cyclist")
    return EntityClass::cyclist;
  if (name == "other")
    return EntityClass::other;
  throw InvalidArgument(fmt::format("unknown entity class '{}'", name));
}

bool CameraCalibration::operator==(const CameraCalibration &other) const
{
  return intrinsics == other.intrinsics && ego_to_camera.matrix() == other.ego_to_camera.matrix() &&
         image_width == other.image_width && image_height == other.image_height;
}

std::vector<std::string> calibration_problems(const CameraCalibration &calib)
{
  std::vector<std::string> out;
  if (!calib.intrinsics.allFinite() || !calib.ego_to_camera.matrix().allFinite())
  {
    out.emplace_back("non-finite calibration entries");
    return out;
  }
  if (!(calib.fx() > 0.0) || !(calib.fy() > 0.0))
  {
    out.emplace_back("focal lengths must be positive");
  }
  const Eigen::Matrix3d r = calib.ego_to_camera.linear();
  if ((r.transpose() * r - Eigen::Matrix3d::Identity()).norm() >= 1e-9)
  {
    out.emplace_back("extrinsic rotation is not orthonormal");
  }
  if (calib.image_width <= 0 || calib.image_height <= 0)
  {
    out.emplace_back("image size must be positive");
  }
  return out;
}

CameraCalibration forward_camera(double fx, double fy, double cx, double cy, int width, int height,
                                 double mount_height)
{
  CameraCalibration calib;
  calib.intrinsics << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  Eigen::Matrix3d r;
  // ego x -> camera z, ego y -> camera -x, ego z -> camera -y
  r << 0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0;
  calib.ego_to_camera = Eigen::Isometry3d::Identity();
  calib.ego_to_camera.linear() = r;
  calib.ego_to_camera.translation() = -r * Vec3(0.0, 0.0, mount_height);
  calib.image_width = width;
  calib.image_height = height;
  return calib;
}

const EntityObservation *FrameObservation::find_entity(std::string_view id) const
{
  for (const auto &e : entities)
  {
    if (e.entity_id == id)
    {
      return &e;
    }
  }
  return nullptr;
}

LaneGraph::LaneGraph(std::vector<LaneSegment> lanes) : lanes_(std::move(lanes))
{
  for (std::size_t i = 0; i < lanes_.size(); ++i)
  {
    index_.emplace(lanes_[i].lane_id, i);
  }
}

const LaneSegment *LaneGraph::find(std::string_view id) const
{
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &lanes_[it->second];
}

const LaneSegment &LaneGraph::at(std::string_view id) const
{
  if (const auto *lane = find(id))
  {
    return *lane;
  }
  throw InvalidArgument(fmt::format("unknown lane id '{}'", id));
}

namespace
{

double cross(const Vec2 &a, const Vec2 &b) { return a.x() * b.y() - a.y() * b.x(); }

int orientation(const Vec2 &a, const Vec2 &b, const Vec2 &c)
{
  const double v = cross(b - a, c - a);
  if (std::abs(v) < 1e-12)
    return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Vec2 &a, const Vec2 &b, const Vec2 &p)
{
  return p.x() <= std::max(a.x(), b.x()) && p.x() >= std::min(a.x(), b.x()) &&
         p.y() <= std::max(a.y(), b.y()) && p.y() >= std::min(a.y(), b.y());
}

bool segments_intersect(const Vec2 &p1, const Vec2 &p2, const Vec2 &q1, const Vec2 &q2)
{
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4)
    return true;
  if (o1 == 0 && on_segment(p1, p2, q1))
    return true;
  if (o2 == 0 && on_segment(p1, p2, q2))
    return true;
  if (o3 == 0 && on_segment(q1, q2, p1))
    return true;
  if (o4 == 0 && on_segment(q1, q2, p2))
    return true;
  return false;
}

bool finite_pose(const Pose &p)
{
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z) && std::isfinite(p.yaw);
}

} // namespace

bool is_simple_polygon(const std::vector<Vec2> &polygon)
{
  const std::size_t n = polygon.size();
  if (n < 3)
    return false;
  for (std::size_t i = 0; i < n; ++i)
  {
    const Vec2 &a1 = polygon[i];
    const Vec2 &a2 = polygon[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j)
    {
      // adjacent edges share a vertex
      if (j == i + 1 || (i == 0 && j == n - 1))
        continue;
      if (segments_intersect(a1, a2, polygon[j], polygon[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

std::vector<ValidationIssue> validate(const SequenceObservation &seq)
{
  std::vector<ValidationIssue> issues;
  auto add = [&issues](std::string path, std::string msg) {
    issues.push_back({std::move(path), std::move(msg)});
  };

  for (std::size_t i = 0; i < seq.frames.size(); ++i)
  {
    const auto &f = seq.frames[i];
    const std::string base = fmt::format("/frames/{}", i);
    if (!std::isfinite(f.timestamp))
    {
      add(base + "/t", "timestamp is not finite");
    }
    else if (i > 0 && std::isfinite(seq.frames[i - 1].timestamp) &&
             !(f.timestamp > seq.frames[i - 1].timestamp))
    {
      add(base + "/t", fmt::format("timestamp {} does not increase over frame {} ({})", f.timestamp,
                                   i - 1, seq.frames[i - 1].timestamp));
    }
    if (!finite_pose(f.ego_pose))
    {
      add(base + "/ego", "ego pose is not finite");
    }
    std::unordered_set<std::string> ids;
    for (std::size_t k = 0; k < f.entities.size(); ++k)
    {
      const auto &e = f.entities[k];
      const std::string ep = fmt::format("{}/entities/{}", base, k);
      if (e.entity_id.empty())
      {
        add(ep + "/id", "entity id is empty");
      }
      else if (!ids.insert(e.entity_id).second)
      {
        add(ep + "/id", fmt::format("duplicate entity id '{}' within frame", e.entity_id));
      }
      if (!finite_pose(e.pose))
      {
        add(ep, "entity pose is not finite");
      }
      const auto &d = e.dimensions;
      if (!(d.length > 0.0) || !(d.width > 0.0) || !(d.height > 0.0) || !std::isfinite(d.length) ||
          !std::isfinite(d.width) || !std::isfinite(d.height))
      {
        add(ep, "dimensions must be finite and strictly positive");
      }
    }
    if (f.calibration)
    {
      for (const auto &p : calibration_problems(*f.calibration))
      {
        add(base + "/calib", p);
      }
    }
  }

  if (seq.lane_graph)
  {
    const auto &lanes = seq.lane_graph->lanes();
    std::unordered_set<std::string> ids;
    for (const auto &l : lanes)
    {
      ids.insert(l.lane_id);
    }
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < lanes.size(); ++i)
    {
      const auto &l = lanes[i];
      const std::string base = fmt::format("/lanes/{}", i);
      if (l.lane_id.empty())
      {
        add(base + "/id", "lane id is empty");
      }
      else if (!seen.insert(l.lane_id).second)
      {
        add(base + "/id", fmt::format("duplicate lane id '{}'", l.lane_id));
      }
      if (l.centerline.size() < 2)
      {
        add(base + "/centerline", "centerline needs at least 2 points");
      }
      bool finite = true;
      for (const auto &p : l.centerline)
        finite = finite && p.allFinite();
      for (const auto &p : l.boundary_polygon)
        finite = finite && p.allFinite();
      if (!finite)
      {
        add(base, "lane geometry is not finite");
      }
      if (l.boundary_polygon.size() < 3)
      {
        add(base + "/boundary", "boundary polygon needs at least 3 points");
      }
      else if (finite && !is_simple_polygon(l.boundary_polygon))
      {
        add(base + "/boundary", "boundary polygon self-intersects");
      }
      auto check_ref = [&](const std::optional<std::string> &ref, const char *key) {
        if (ref && !ids.count(*ref))
        {
          add(fmt::format("{}/{}", base, key), fmt::format("unresolved lane id '{}'", *ref));
        }
      };
      check_ref(l.left_neighbor_id, "left_neighbor");
      check_ref(l.right_neighbor_id, "right_neighbor");
      for (std::size_t k = 0; k < l.successor_ids.size(); ++k)
      {
        if (!ids.count(l.successor_ids[k]))
          add(fmt::format("{}/successors/{}", base, k),
              fmt::format("unresolved lane id '{}'", l.successor_ids[k]));
      }
      for (std::size_t k = 0; k < l.predecessor_ids.size(); ++k)
      {
        if (!ids.count(l.predecessor_ids[k]))
          add(fmt::format("{}/predecessors/{}", base, k),
              fmt::format("unresolved lane id '{}'", l.predecessor_ids[k]));
      }
    }
  }
  return issues;
}

} // namespace tbx
