#include "tbx/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace tbx
{

std::string_view to_string(SpatialRelation r)
{
  switch (r)
  {
  case SpatialRelation::front:
    return "front";
  case SpatialRelation::front_left:
    return "front left";
  case SpatialRelation::front_right:
    return "front right";
  case SpatialRelation::back_left:
    return "back left";
  case SpatialRelation::back_right:
    return "back right";
  case SpatialRelation::back:
    return "back";
  }
  return "back";
}

std::string_view to_string(OrientationRelation r)
{
  switch (r)
  {
  case OrientationRelation::similar:
    return "similar";
  case OrientationRelation::opposite:
    return "opposite";
  case OrientationRelation::perpendicular:
    return "perpendicular";
  }
  return "perpendicular";
}

double relative_distance(const Pose &a, const Pose &b) { return std::hypot(b.x - a.x, b.y - a.y); }

double bearing_angle(const Pose &reference, const Pose &target)
{
  const double dx = target.x - reference.x;
  const double dy = target.y - reference.y;
  if (std::hypot(dx, dy) < 1e-12)
  {
    throw DegenerateGeometry("bearing_angle: target coincides with reference");
  }
  const double c = std::cos(reference.yaw);
  const double s = std::sin(reference.yaw);
  const double forward = c * dx + s * dy;
  const double left = -s * dx + c * dy;
  double deg = to_degrees(std::atan2(left, forward));
  if (deg <= -180.0)
  {
    deg += 360.0;
  }
  return deg;
}

SpatialRelation spatial_relation(double theta)
{
  if (!std::isfinite(theta) || theta <= -180.0 || theta > 180.0)
  {
    throw InvalidArgument(fmt::format("spatial_relation: angle {} outside (-180, 180]", theta));
  }
  if (theta > -30.0 && theta <= 30.0)
    return SpatialRelation::front;
  if (theta > 30.0 && theta <= 90.0)
    return SpatialRelation::front_left;
  if (theta > -90.0 && theta <= -30.0)
    return SpatialRelation::front_right;
  if (theta > 90.0 && theta <= 150.0)
    return SpatialRelation::back_left;
  if (theta > -150.0 && theta <= -90.0)
    return SpatialRelation::back_right;
  return SpatialRelation::back;
}

double heading_difference(const Pose &a, const Pose &b)
{
  return std::abs(to_degrees(normalize_angle(a.yaw - b.yaw)));
}

OrientationRelation orientation_relation(double abs_theta)
{
  if (!std::isfinite(abs_theta) || abs_theta < 0.0 || abs_theta > 180.0)
  {
    throw InvalidArgument(fmt::format("orientation_relation: angle {} outside [0, 180]", abs_theta));
  }
  if (abs_theta <= 45.0)
    return OrientationRelation::similar;
  if (abs_theta >= 135.0)
    return OrientationRelation::opposite;
  return OrientationRelation::perpendicular;
}

std::array<Vec3, 8> box_corners_3d(const EntityObservation &entity)
{
  const double hl = entity.dimensions.length / 2.0;
  const double hw = entity.dimensions.width / 2.0;
  const double h = entity.dimensions.height;
  const std::array<Vec2, 4> face{Vec2(hl, hw), Vec2(hl, -hw), Vec2(-hl, -hw), Vec2(-hl, hw)};

  const Eigen::Rotation2Dd rot(entity.pose.yaw);
  const Vec2 origin = entity.pose.xy();
  std::array<Vec3, 8> out;
  for (std::size_t i = 0; i < 4; ++i)
  {
    const Vec2 p = origin + rot * face[i];
    out[i] = Vec3(p.x(), p.y(), entity.pose.z);
    out[i + 4] = Vec3(p.x(), p.y(), entity.pose.z + h);
  }
  return out;
}

std::optional<PolylineProjection> project_onto_polyline(std::span<const Vec2> polyline,
                                                        const Vec2 &point)
{
  std::optional<PolylineProjection> best;
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i)
  {
    const Vec2 a = polyline[i];
    const Vec2 d = polyline[i + 1] - a;
    const double len2 = d.squaredNorm();
    if (len2 <= 0.0)
      continue;
    const double t = std::clamp((point - a).dot(d) / len2, 0.0, 1.0);
    const Vec2 q = a + t * d;
    const double dist = (point - q).norm();
    if (!best || dist < best->distance)
    {
      best = PolylineProjection{q, i, dist};
    }
  }
  return best;
}

double polyline_length(std::span<const Vec2> points)
{
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
  {
    total += (points[i] - points[i - 1]).norm();
  }
  return total;
}

bool polygon_contains(std::span<const Vec2> polygon, const Vec2 &point)
{
  const std::size_t n = polygon.size();
  if (n < 3)
    return false;
  // winding number, with an explicit on-edge test first
  int winding = 0;
  for (std::size_t i = 0; i < n; ++i)
  {
    const Vec2 &a = polygon[i];
    const Vec2 &b = polygon[(i + 1) % n];
    const Vec2 ab = b - a;
    const Vec2 ap = point - a;
    const double cr = ab.x() * ap.y() - ab.y() * ap.x();
    const double scale = std::max(1.0, ab.norm() * ap.norm());
    if (std::abs(cr) <= 1e-12 * scale && ap.dot(ab) >= 0.0 && ap.dot(ab) <= ab.squaredNorm())
    {
      return true;
    }
    if (a.y() <= point.y())
    {
      if (b.y() > point.y() && cr > 0.0)
        ++winding;
    }
    else if (b.y() <= point.y() && cr < 0.0)
    {
      --winding;
    }
  }
  return winding != 0;
}

} // namespace tbx
