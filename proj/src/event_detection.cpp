#include "tbx/event_detection.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace tbx
{

std::string_view to_string(TurnClass c)
{
  switch (c)
  {
  case TurnClass::left_turn:
    return "left turn";
  case TurnClass::go_straight:
    return "go straight";
  case TurnClass::right_turn:
    return "right turn";
  }
  return "go straight";
}

namespace
{

// Index of the frame whose timestamp is closest to t.
std::size_t nearest_frame(const std::vector<FrameObservation> &frames, double t)
{
  auto it = std::lower_bound(frames.begin(), frames.end(), t,
                             [](const FrameObservation &f, double v) { return f.timestamp < v; });
  if (it == frames.end())
    return frames.size() - 1;
  std::size_t i = static_cast<std::size_t>(it - frames.begin());
  if (i > 0 && std::abs(frames[i - 1].timestamp - t) <= std::abs(frames[i].timestamp - t))
    --i;
  return i;
}

} // namespace

Clip extract_clip(const SequenceObservation &seq, std::size_t anchor, const ClipOptions &options)
{
  if (options.frame_count == 0 || !(options.dt > 0.0) || options.tolerance < 0.0)
  {
    throw InvalidArgument("extract_clip: invalid clip options");
  }
  if (anchor >= seq.frames.size())
  {
    throw ClipUnavailable(
        fmt::format("anchor {} outside a sequence of {} frames", anchor, seq.frames.size()));
  }
  if (seq.frames.size() - anchor < options.frame_count)
  {
    throw ClipUnavailable(fmt::format("{} frames from anchor {}, clip needs {}",
                                      seq.frames.size() - anchor, anchor, options.frame_count));
  }

  Clip clip;
  clip.nominal_dt = options.dt;
  const double t0 = seq.frames[anchor].timestamp;
  for (std::size_t k = 0; k < options.frame_count; ++k)
  {
    const double target = t0 + static_cast<double>(k) * options.dt;
    const std::size_t i = nearest_frame(seq.frames, target);
    if (std::abs(seq.frames[i].timestamp - target) > options.tolerance + 1e-9 ||
        (!clip.source_indices.empty() && i <= clip.source_indices.back()))
    {
      throw ClipUnavailable(fmt::format("no frame within {} s of t={:.3f} (clip frame {})",
                                        options.tolerance, target, k));
    }
    clip.source_indices.push_back(i);
    clip.frames.push_back(seq.frames[i]);
  }
  return clip;
}

std::vector<std::size_t> clip_anchors(const SequenceObservation &seq, const ClipOptions &options)
{
  std::vector<std::size_t> anchors;
  const double window = static_cast<double>(options.frame_count) * options.dt;
  std::size_t anchor = 0;
  while (anchor < seq.frames.size())
  {
    try
    {
      extract_clip(seq, anchor, options);
    }
    catch (const ClipUnavailable &)
    {
      ++anchor;
      continue;
    }
    anchors.push_back(anchor);
    const double next_t = seq.frames[anchor].timestamp + window - 1e-9;
    auto it = std::lower_bound(seq.frames.begin() + static_cast<std::ptrdiff_t>(anchor), seq.frames.end(),
                               next_t,
                               [](const FrameObservation &f, double v) { return f.timestamp < v; });
    anchor = static_cast<std::size_t>(it - seq.frames.begin());
  }
  return anchors;
}

double accumulated_yaw(std::span<const double> yaws)
{
  double total = 0.0;
  for (std::size_t i = 1; i < yaws.size(); ++i)
  {
    total += normalize_angle(yaws[i] - yaws[i - 1]);
  }
  return to_degrees(total);
}

double accumulated_yaw(std::span<const Pose> poses)
{
  std::vector<double> yaws;
  yaws.reserve(poses.size());
  for (const auto &p : poses)
    yaws.push_back(p.yaw);
  return accumulated_yaw(std::span<const double>(yaws));
}

TurnClass classify_turn(double acc, double threshold)
{
  if (acc > threshold)
    return TurnClass::left_turn;
  if (acc < -threshold)
    return TurnClass::right_turn;
  return TurnClass::go_straight;
}

std::vector<Pose> ego_track(const Clip &clip)
{
  std::vector<Pose> out;
  out.reserve(clip.frames.size());
  for (const auto &f : clip.frames)
    out.push_back(f.ego_pose);
  return out;
}

double ego_traverse_distance(const Clip &clip)
{
  double total = 0.0;
  for (std::size_t i = 1; i < clip.frames.size(); ++i)
  {
    total += (clip.frames[i].ego_pose.xy() - clip.frames[i - 1].ego_pose.xy()).norm();
  }
  return total;
}

std::vector<std::optional<Pose>> entity_world_track(const Clip &clip, std::string_view entity_id)
{
  std::vector<std::optional<Pose>> out;
  out.reserve(clip.frames.size());
  for (const auto &f : clip.frames)
  {
    if (const auto *e = f.find_entity(entity_id))
      out.emplace_back(compose(f.ego_pose, e->pose));
    else
      out.emplace_back(std::nullopt);
  }
  return out;
}

} // namespace tbx
