#pragma once

// Canonical scene types.
//
// Coordinate convention: x forward, y left, z up; yaw is counter-clockwise
// about +z with zero along +x. The ego pose of a frame lives in the world
// frame, entity poses of the same frame live in that frame's ego frame.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tbx/errors.hpp"

namespace tbx
{

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle in radians into (-pi, pi]. Throws InvalidArgument on non-finite input.
double normalize_angle(double radians);

/// Degree counterpart of normalize_angle, result in (-180, 180].
double normalize_degrees(double degrees);

inline double to_degrees(double radians) { return radians * 180.0 / kPi; }
inline double to_radians(double degrees) { return degrees * kPi / 180.0; }

struct Pose
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;

  Pose() = default;
  /// Normalizes yaw; throws InvalidArgument if any field is non-finite.
  Pose(double x, double y, double z, double yaw);

  Vec2 xy() const { return {x, y}; }
  Vec3 xyz() const { return {x, y, z}; }

  bool operator==(const Pose &) const = default;
};

/// Pose of `local` (expressed in the frame of `frame`) in the parent frame of `frame`.
Pose compose(const Pose &frame, const Pose &local);

/// Inverse of compose: expresses `world` in the frame given by `frame`.
Pose relative_to(const Pose &frame, const Pose &world);

enum class EntityClass
{
  vehicle,
  pedestrian,
  cyclist,
  other
};

std::string_view to_string(EntityClass c);
/// Throws InvalidArgument for unknown names.
EntityClass parse_entity_class(std::string_view name);

struct Dimensions
{
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;

  bool operator==(const Dimensions &) const = default;
};

struct EntityObservation
{
  std::string entity_id;
  EntityClass class_label = EntityClass::other;
  Pose pose; ///< box bottom-center, ego frame
  Dimensions dimensions;

  bool operator==(const EntityObservation &) const = default;
};

/// Pinhole camera. Extrinsics map ego-frame points into the camera frame
/// (z forward, x right, y down).
struct CameraCalibration
{
  Eigen::Matrix3d intrinsics = Eigen::Matrix3d::Identity();
  Eigen::Isometry3d ego_to_camera = Eigen::Isometry3d::Identity();
  int image_width = 0;
  int image_height = 0;

  double fx() const { return intrinsics(0, 0); }
  double fy() const { return intrinsics(1, 1); }
  double cx() const { return intrinsics(0, 2); }
  double cy() const { return intrinsics(1, 2); }

  bool operator==(const CameraCalibration &other) const;
};

/// Problems with a calibration, empty when valid.
std::vector<std::string> calibration_problems(const CameraCalibration &calib);

/// Front camera mounted at `height` meters above the ego origin, looking along +x.
CameraCalibration forward_camera(double fx, double fy, double cx, double cy, int width, int height,
                                 double mount_height = 1.6);

struct FrameObservation
{
  double timestamp = 0.0;
  Pose ego_pose;
  std::vector<EntityObservation> entities;
  std::optional<std::string> image_ref;
  std::optional<CameraCalibration> calibration;

  const EntityObservation *find_entity(std::string_view id) const;

  bool operator==(const FrameObservation &) const = default;
};

struct LaneSegment
{
  std::string lane_id;
  std::vector<Vec2> centerline;       ///< order defines travel direction
  std::vector<Vec2> boundary_polygon; ///< simple polygon, implicitly closed
  std::optional<std::string> left_neighbor_id;
  std::optional<std::string> right_neighbor_id;
  std::vector<std::string> successor_ids;
  std::vector<std::string> predecessor_ids;
  bool is_intersection = false;

  bool operator==(const LaneSegment &) const = default;
};

/// Lane list with id lookup. Lane order is preserved.
class LaneGraph
{
public:
  LaneGraph() = default;
  explicit LaneGraph(std::vector<LaneSegment> lanes);

  const std::vector<LaneSegment> &lanes() const noexcept { return lanes_; }
  bool empty() const noexcept { return lanes_.empty(); }
  std::size_t size() const noexcept { return lanes_.size(); }

  const LaneSegment *find(std::string_view id) const;
  /// Throws InvalidArgument when the id does not resolve.
  const LaneSegment &at(std::string_view id) const;

  bool operator==(const LaneGraph &other) const { return lanes_ == other.lanes_; }

private:
  std::vector<LaneSegment> lanes_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct SequenceMeta
{
  std::string name;
  std::string dataset;
  double frequency_hz = 0.0;

  bool operator==(const SequenceMeta &) const = default;
};

struct SequenceObservation
{
  SequenceMeta meta;
  std::vector<FrameObservation> frames;
  std::optional<LaneGraph> lane_graph;

  bool operator==(const SequenceObservation &) const = default;
};

/// True when the closed polygon has no crossing non-adjacent edges.
bool is_simple_polygon(const std::vector<Vec2> &polygon);

/// Every invariant violation of the sequence, located by JSON pointer into
/// the interchange layout (e.g. "/frames/3/t"). Empty when valid.
std::vector<ValidationIssue> validate(const SequenceObservation &seq);

} // namespace tbx
