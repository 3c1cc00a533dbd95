#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tbx/scene_model.hpp"

namespace tbx
{

enum class TurnClass
{
  left_turn,
  go_straight,
  right_turn
};

std::string_view to_string(TurnClass c);

struct ClipOptions
{
  std::size_t frame_count = 8;
  double dt = 0.2;
  double tolerance = 0.02;
};

/// A fixed number of frames sampled at a fixed period from one sequence.
///
/// The clip stands for a half-open analysis window of frame_count * dt
/// seconds (1.6 s by default); its sampled frames span (frame_count - 1) * dt.
struct Clip
{
  std::vector<FrameObservation> frames;
  std::vector<std::size_t> source_indices;
  double nominal_dt = 0.2;

  double window() const { return static_cast<double>(frames.size()) * nominal_dt; }
  double sampled_span() const
  {
    return frames.empty() ? 0.0 : frames.back().timestamp - frames.front().timestamp;
  }
};

/// Samples the clip starting at frame `anchor`: frame k is the sequence frame
/// nearest to t(anchor) + k * dt, which must lie within the tolerance.
/// Throws ClipUnavailable when the sequence cannot supply every frame.
Clip extract_clip(const SequenceObservation &seq, std::size_t anchor, const ClipOptions &options = {});

/// Anchors of consecutive, non-overlapping clips (greedy from the first
/// frame). A clip's window is half-open, so the next anchor is the first
/// frame at or after t(anchor) + window.
std::vector<std::size_t> clip_anchors(const SequenceObservation &seq, const ClipOptions &options = {});

/// Sum of wrapped consecutive yaw changes, in degrees. Left turns are positive.
double accumulated_yaw(std::span<const Pose> poses);
double accumulated_yaw(std::span<const double> yaws);

/// left_turn above +threshold, right_turn below -threshold, otherwise go_straight.
TurnClass classify_turn(double accumulated_yaw_deg, double threshold_deg = 25.0);

/// Path length of the ego positions across the clip (planar).
double ego_traverse_distance(const Clip &clip);

/// Ego world poses across the clip.
std::vector<Pose> ego_track(const Clip &clip);

/// World poses of one entity across the clip; nullopt where it is absent.
std::vector<std::optional<Pose>> entity_world_track(const Clip &clip, std::string_view entity_id);

} // namespace tbx
