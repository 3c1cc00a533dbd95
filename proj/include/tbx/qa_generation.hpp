#pragma once

// Routing scene and clip attributes into benchmark samples.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tbx/augmentation.hpp"
#include "tbx/event_detection.hpp"
#include "tbx/lane_analysis.hpp"
#include "tbx/qa_sample.hpp"
#include "tbx/scene_model.hpp"

namespace tbx
{

struct BalanceConfig
{
  std::uint64_t seed = 0;
  /// Upper bound on samples per task; absent means uncapped.
  std::map<TaskTag, std::size_t> task_caps;
  /// Upper bound per (task, category); category is the class label or "numerical value".
  std::map<TaskTag, std::map<std::string, std::size_t>> category_caps;
  /// For event tasks: negatives kept per positive sample.
  std::map<TaskTag, double> negative_ratio;
};

/// Negative-to-positive ratios of the balanced training split (no change or
/// go straight versus the two event classes).
BalanceConfig default_balance_config();

struct GenerationConfig
{
  std::uint64_t seed = 0;
  std::set<TaskTag> tasks{kAllTasks.begin(), kAllTasks.end()};

  // entity eligibility
  double max_range_m = 60.0;
  double frustum_margin_px = 0.0;
  std::set<EntityClass> lane_task_classes{EntityClass::vehicle};

  // single-frame tasks
  bool include_ego_pairs = true;
  std::size_t max_pairs_per_frame = 4;
  std::size_t frame_stride = 10;
  /// Share of OR samples asked as a numeric question.
  double or_numeric_ratio = 122.0 / 250.0;

  // clip tasks
  ClipOptions clip;
  double turn_threshold_deg = 25.0;
  LaneClassifyOptions lane;
  std::size_t max_entities_per_clip = 4;

  int augmentation_retries = 1;
  BalanceConfig balance = default_balance_config();
};

struct FrameContext
{
  std::string sequence;
  std::size_t frame_index = 0;
  /// Clip the frame closes, when EGO_LANE samples should be emitted for it.
  const Clip *clip = nullptr;
};

/// Generation output plus any warnings raised along the way.
struct GenerationResult
{
  std::vector<QASample> samples;
  std::vector<std::string> warnings;

  void append(GenerationResult &&other);
};

/// Entity counts as referable: within range of the ego and, when the frame is
/// calibrated, with its box center projecting inside the image.
bool entity_eligible(const EntityObservation &entity, const FrameObservation &frame, const GenerationConfig &config);

/// RD / SR / OR samples for entity pairs of one frame, and EGO_LANE samples
/// when `context.clip` is set and a lane graph is available.
GenerationResult generate_for_frame(const FrameObservation &frame, const LaneGraph *graph,
                                    const FrameContext &context, const GenerationConfig &config,
                                    Augmenter *augmenter = nullptr);

struct ClipContext
{
  std::string sequence;
};

/// OBJ_LANE / OBJ_TURN / EGO_TURN / EGO_TRA samples for one clip.
GenerationResult generate_for_clip(const Clip &clip, const LaneGraph *graph, const ClipContext &context,
                                   const GenerationConfig &config, Augmenter *augmenter = nullptr);

/// Every sample of one sequence: single-frame tasks every `frame_stride`
/// frames, clip tasks on non-overlapping clips. Deterministic per seed.
GenerationResult generate_for_sequence(const SequenceObservation &seq, const GenerationConfig &config,
                                       Augmenter *augmenter = nullptr);

/// Applies category caps, event negative ratios, then task caps. Each cap
/// keeps a seeded uniform subset; retained samples keep their input order.
std::vector<QASample> balance_dataset(const std::vector<QASample> &samples, const BalanceConfig &config);

} // namespace tbx
