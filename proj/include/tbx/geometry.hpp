#pragma once

#include <array>
#include <span>
#include <string_view>

#include "tbx/scene_model.hpp"

namespace tbx
{

enum class SpatialRelation
{
  front,
  front_left,
  front_right,
  back_left,
  back_right,
  back
};

enum class OrientationRelation
{
  similar,
  opposite,
  perpendicular
};

/// Human-readable label ("front left"), the form used in answers and keyword tables.
std::string_view to_string(SpatialRelation r);
std::string_view to_string(OrientationRelation r);

/// Planar (x, y) Euclidean distance in meters.
double relative_distance(const Pose &a, const Pose &b);

/// Angle in degrees from the reference facing direction to the ray toward the
/// target position, counter-clockwise (left) positive, in (-180, 180].
/// The target's own heading plays no role. Throws DegenerateGeometry when the
/// positions coincide.
double bearing_angle(const Pose &reference, const Pose &target);

/// Six-way binning of a bearing angle:
///   front       (-30, 30]
///   front left  (30, 90]
///   front right (-90, -30]
///   back left   (90, 150]
///   back right  (-150, -90]
///   back        otherwise
/// Throws InvalidArgument outside (-180, 180].
SpatialRelation spatial_relation(double theta_deg);

/// Absolute difference of the two headings in degrees, in [0, 180].
double heading_difference(const Pose &a, const Pose &b);

/// similar for [0, 45], opposite for [135, 180], perpendicular otherwise.
/// Throws InvalidArgument outside [0, 180].
OrientationRelation orientation_relation(double abs_theta_deg);

/// Corners of the entity box in the entity's parent (ego) frame.
///
/// Order is fixed: bottom face first (z = pose.z), then the top face in the
/// same sequence. Within a face, starting at the front-left corner and going
/// clockwise seen from above: front-left, front-right, rear-right, rear-left.
std::array<Vec3, 8> box_corners_3d(const EntityObservation &entity);

/// The 12 box edges as corner index pairs, matching box_corners_3d order.
inline constexpr std::array<std::array<int, 2>, 12> kBoxEdges{{{0, 1},
                                                              {1, 2},
                                                              {2, 3},
                                                              {3, 0},
                                                              {4, 5},
                                                              {5, 6},
                                                              {6, 7},
                                                              {7, 4},
                                                              {0, 4},
                                                              {1, 5},
                                                              {2, 6},
                                                              {3, 7}}};

/// Closest point on a polyline and the index of the segment it lies on.
struct PolylineProjection
{
  Vec2 point = Vec2::Zero();
  std::size_t segment = 0;
  double distance = 0.0;
};

/// Projects onto the nearest non-degenerate segment. Returns nullopt when the
/// polyline has no segment of positive length.
std::optional<PolylineProjection> project_onto_polyline(std::span<const Vec2> polyline,
                                                        const Vec2 &point);

/// Arc length of the polyline through the points.
double polyline_length(std::span<const Vec2> points);

/// Point containment for a closed polygon; points on the boundary count as inside.
bool polygon_contains(std::span<const Vec2> polygon, const Vec2 &point);

} // namespace tbx
