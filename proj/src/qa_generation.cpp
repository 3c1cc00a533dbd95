#include "tbx/qa_generation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "tbx/bbox_render.hpp"
#include "tbx/geometry.hpp"
#include "tbx/hashing.hpp"
#include "tbx/templates.hpp"

namespace tbx
{

BalanceConfig default_balance_config()
{
  BalanceConfig c;
  c.negative_ratio[TaskTag::OBJ_LANE] = 807.0 / (414.0 + 279.0);
  c.negative_ratio[TaskTag::OBJ_TURN] = 744.0 / (435.0 + 321.0);
  c.negative_ratio[TaskTag::EGO_TURN] = 753.0 / (331.0 + 416.0);
  return c;
}

void GenerationResult::append(GenerationResult &&other)
{
  samples.insert(samples.end(), std::make_move_iterator(other.samples.begin()),
                 std::make_move_iterator(other.samples.end()));
  warnings.insert(warnings.end(), std::make_move_iterator(other.warnings.begin()),
                  std::make_move_iterator(other.warnings.end()));
}

bool entity_eligible(const EntityObservation &entity, const FrameObservation &frame, const GenerationConfig &config)
{
  if (std::hypot(entity.pose.x, entity.pose.y) > config.max_range_m)
    return false;
  if (!frame.calibration)
    return true;
  const Vec3 center(entity.pose.x, entity.pose.y, entity.pose.z + entity.dimensions.height / 2.0);
  const auto px = project_point(center, *frame.calibration);
  if (!px)
    return false;
  const double m = config.frustum_margin_px;
  return px->x() >= -m && px->y() >= -m && px->x() <= frame.calibration->image_width - 1 + m &&
         px->y() <= frame.calibration->image_height - 1 + m;
}

namespace
{

constexpr std::string_view kEgoId = "ego";

std::string frame_ref(const FrameObservation &frame, const std::string &sequence, std::size_t index)
{
  if (frame.image_ref && !frame.image_ref->empty())
    return *frame.image_ref;
  return fmt::format("{}/{:06d}", sequence, index);
}

/// A participant of a question: an entity (by id) or the ego vehicle.
struct Participant
{
  const EntityObservation *entity = nullptr; ///< nullptr for the ego vehicle

  std::string id() const { return entity ? entity->entity_id : std::string(kEgoId); }
  Pose pose() const { return entity ? entity->pose : Pose(); }
};

/// Assigns entity numbers in question order and returns the referents.
struct ReferentSet
{
  std::vector<std::string> referents;
  std::vector<EntityRef> entities;
};

ReferentSet name_participants(const std::vector<Participant> &parts)
{
  ReferentSet out;
  int next = 1;
  for (const auto &p : parts)
  {
    if (!p.entity)
    {
      out.referents.emplace_back(kEgoReferent);
      continue;
    }
    const auto color = entity_color(next);
    out.referents.push_back(entity_referent(next));
    out.entities.push_back({next, p.entity->entity_id, color.rgb});
    ++next;
  }
  return out;
}

struct SampleDraft
{
  std::string id;
  TaskTag task = TaskTag::RD;
  std::optional<OrSubtype> subtype;
  GroundTruth truth;
  std::vector<std::string> frame_refs;
  SampleSource source;
  ReferentSet names;
  bool negative = false;
};

QASample finish(SampleDraft d, std::mt19937_64 &rng, const GenerationConfig &config, Augmenter *augmenter,
                std::vector<std::string> &warnings)
{
  QASample s;
  s.id = std::move(d.id);
  s.task = d.task;
  s.or_subtype = d.subtype;
  s.frame_refs = std::move(d.frame_refs);
  s.source = std::move(d.source);
  s.entities = d.names.entities;
  s.negative = d.negative;
  s.ground_truth = d.truth;
  if (const auto *n = std::get_if<NumericTruth>(&d.truth))
    s.answer_short = format_numeric_answer(n->value, n->unit);
  else
    s.answer_short = std::get<ClassTruth>(d.truth).label;

  s.question = render_question(d.task, d.subtype, d.names.referents, rng);
  AugmentRequest req{d.task, d.subtype, s.question, s.answer_short, d.names.referents};
  auto aug = augment_answer(req, augmenter, config.augmentation_retries);
  s.answer_text = std::move(aug.text);
  for (auto &w : aug.warnings)
    warnings.push_back(fmt::format("{}: {}", s.id, w));
  return s;
}

template <typename T>
std::vector<T> pick_subset(std::vector<T> items, std::size_t cap, std::mt19937_64 &rng)
{
  if (items.size() <= cap)
    return items;
  std::vector<std::size_t> idx(items.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  std::vector<T> out;
  out.reserve(cap);
  for (const auto i : idx)
    out.push_back(std::move(items[i]));
  return out;
}

void single_frame_tasks(const FrameObservation &frame, const FrameContext &ctx, const GenerationConfig &config,
                        Augmenter *augmenter, GenerationResult &out)
{
  std::vector<const EntityObservation *> eligible;
  for (const auto &e : frame.entities)
  {
    if (entity_eligible(e, frame, config))
      eligible.push_back(&e);
  }
  std::vector<std::pair<Participant, Participant>> pairs;
  for (std::size_t i = 0; i < eligible.size(); ++i)
  {
    for (std::size_t j = i + 1; j < eligible.size(); ++j)
      pairs.push_back({{eligible[i]}, {eligible[j]}});
    if (config.include_ego_pairs)
      pairs.push_back({{eligible[i]}, {}});
  }
  const std::string frame_key = fmt::format("{}/{:06d}", ctx.sequence, ctx.frame_index);
  auto pair_rng = keyed_rng(config.seed, frame_key + "/pairs");
  pairs = pick_subset(std::move(pairs), config.max_pairs_per_frame, pair_rng);

  const std::vector<std::string> refs{frame_ref(frame, ctx.sequence, ctx.frame_index)};
  const SampleSource source{ctx.sequence, {ctx.frame_index}};

  for (const auto &[a, b] : pairs)
  {
    const std::string pair_key = fmt::format("{}+{}", a.id(), b.id());
    for (const TaskTag task : {TaskTag::RD, TaskTag::SR, TaskTag::OR})
    {
      if (!config.tasks.count(task))
        continue;
      SampleDraft d;
      d.id = fmt::format("{}/{}/{}", frame_key, to_string(task), pair_key);
      d.task = task;
      d.frame_refs = refs;
      d.source = source;
      auto rng = keyed_rng(config.seed, d.id);
      // first participant is the target, second the reference
      std::vector<Participant> order{a, b};
      if (std::bernoulli_distribution(0.5)(rng))
        std::swap(order[0], order[1]);
      const Pose target = order[0].pose();
      const Pose reference = order[1].pose();
      try
      {
        switch (task)
        {
        case TaskTag::RD:
          d.truth = NumericTruth{relative_distance(target, reference), Unit::meters};
          break;
        case TaskTag::SR:
          d.truth = ClassTruth{std::string(to_string(spatial_relation(bearing_angle(reference, target))))};
          break;
        default: {
          const double diff = heading_difference(target, reference);
          if (std::bernoulli_distribution(config.or_numeric_ratio)(rng))
          {
            d.subtype = OrSubtype::numeric;
            d.truth = NumericTruth{diff, Unit::degrees};
          }
          else
          {
            d.subtype = OrSubtype::class_label;
            d.truth = ClassTruth{std::string(to_string(orientation_relation(diff)))};
          }
        }
        }
      }
      catch (const DegenerateGeometry &e)
      {
        out.warnings.push_back(fmt::format("{}: skipped, {}", d.id, e.what()));
        continue;
      }
      d.names = name_participants(order);
      out.samples.push_back(finish(std::move(d), rng, config, augmenter, out.warnings));
    }
  }
}

std::vector<std::string> clip_refs(const Clip &clip, const std::string &sequence)
{
  std::vector<std::string> refs;
  for (std::size_t k = 0; k < clip.frames.size(); ++k)
    refs.push_back(frame_ref(clip.frames[k], sequence, clip.source_indices[k]));
  return refs;
}

/// Entities present and eligible in every clip frame, of a lane-task class.
std::vector<const EntityObservation *> tracked_entities(const Clip &clip, const GenerationConfig &config)
{
  std::vector<const EntityObservation *> out;
  if (clip.frames.empty())
    return out;
  const auto &last = clip.frames.back();
  for (const auto &e : last.entities)
  {
    if (!config.lane_task_classes.count(e.class_label))
      continue;
    bool ok = true;
    for (const auto &f : clip.frames)
    {
      const auto *fe = f.find_entity(e.entity_id);
      if (fe == nullptr || !entity_eligible(*fe, f, config))
      {
        ok = false;
        break;
      }
    }
    if (ok)
      out.push_back(&e);
  }
  return out;
}

void ego_lane_task(const FrameObservation &frame, const LaneGraph &graph, const FrameContext &ctx,
                   const GenerationConfig &config, Augmenter *augmenter, GenerationResult &out)
{
  const Clip &clip = *ctx.clip;
  const auto ego_lane = assign_lane(frame.ego_pose.xy(), graph);
  if (!ego_lane)
    return;
  const std::string clip_key = fmt::format("{}/c{:06d}", ctx.sequence, clip.source_indices.front());
  auto pick_rng = keyed_rng(config.seed, clip_key + "/EGO_LANE/pick");
  const auto candidates = pick_subset(tracked_entities(clip, config), config.max_entities_per_clip, pick_rng);
  for (const auto *e : candidates)
  {
    const Pose world = compose(frame.ego_pose, e->pose);
    const auto lane = assign_lane(world.xy(), graph);
    if (!lane)
      continue;
    SampleDraft d;
    d.id = fmt::format("{}/EGO_LANE/{}", clip_key, e->entity_id);
    d.task = TaskTag::EGO_LANE;
    d.frame_refs = clip_refs(clip, ctx.sequence);
    d.source = {ctx.sequence, clip.source_indices};
    try
    {
      d.truth = ClassTruth{
          std::string(to_string(classify_lane_to_ego(*lane, *ego_lane, frame.ego_pose, graph, config.lane)))};
    }
    catch (const Error &err)
    {
      out.warnings.push_back(fmt::format("{}: skipped, {}", d.id, err.what()));
      continue;
    }
    d.names = name_participants({Participant{e}});
    auto rng = keyed_rng(config.seed, d.id);
    out.samples.push_back(finish(std::move(d), rng, config, augmenter, out.warnings));
  }
}

} // namespace

GenerationResult generate_for_frame(const FrameObservation &frame, const LaneGraph *graph, const FrameContext &context,
                                    const GenerationConfig &config, Augmenter *augmenter)
{
  GenerationResult out;
  if (context.clip == nullptr)
  {
    single_frame_tasks(frame, context, config, augmenter, out);
  }
  else if (graph != nullptr && !graph->empty() && config.tasks.count(TaskTag::EGO_LANE))
  {
    ego_lane_task(frame, *graph, context, config, augmenter, out);
  }
  return out;
}

GenerationResult generate_for_clip(const Clip &clip, const LaneGraph *graph, const ClipContext &context,
                                   const GenerationConfig &config, Augmenter *augmenter)
{
  GenerationResult out;
  if (clip.frames.empty())
    return out;
  const std::string clip_key = fmt::format("{}/c{:06d}", context.sequence, clip.source_indices.front());
  const auto refs = clip_refs(clip, context.sequence);
  const SampleSource source{context.sequence, clip.source_indices};

  auto base = [&](TaskTag task, const std::string &subject) {
    SampleDraft d;
    d.id = subject.empty() ? fmt::format("{}/{}", clip_key, to_string(task))
                           : fmt::format("{}/{}/{}", clip_key, to_string(task), subject);
    d.task = task;
    d.frame_refs = refs;
    d.source = source;
    return d;
  };
  auto emit = [&](SampleDraft d) {
    auto rng = keyed_rng(config.seed, d.id);
    out.samples.push_back(finish(std::move(d), rng, config, augmenter, out.warnings));
  };

  if (config.tasks.count(TaskTag::EGO_TURN))
  {
    const auto track = ego_track(clip);
    const auto turn = classify_turn(accumulated_yaw(track), config.turn_threshold_deg);
    auto d = base(TaskTag::EGO_TURN, "");
    d.truth = ClassTruth{std::string(to_string(turn))};
    d.negative = turn == TurnClass::go_straight;
    emit(std::move(d));
  }
  if (config.tasks.count(TaskTag::EGO_TRA))
  {
    auto d = base(TaskTag::EGO_TRA, "");
    d.truth = NumericTruth{ego_traverse_distance(clip), Unit::meters};
    emit(std::move(d));
  }

  const bool want_turn = config.tasks.count(TaskTag::OBJ_TURN) > 0;
  const bool want_lane = config.tasks.count(TaskTag::OBJ_LANE) > 0 && graph != nullptr && !graph->empty();
  if (!want_turn && !want_lane)
    return out;

  auto pick_rng = keyed_rng(config.seed, clip_key + "/entities/pick");
  const auto candidates = pick_subset(tracked_entities(clip, config), config.max_entities_per_clip, pick_rng);
  for (const auto *e : candidates)
  {
    const auto track = entity_world_track(clip, e->entity_id);
    std::vector<Pose> poses;
    for (const auto &p : track)
      poses.push_back(*p);
    const auto names = name_participants({Participant{e}});

    if (want_turn)
    {
      const auto turn = classify_turn(accumulated_yaw(poses), config.turn_threshold_deg);
      auto d = base(TaskTag::OBJ_TURN, e->entity_id);
      d.truth = ClassTruth{std::string(to_string(turn))};
      d.negative = turn == TurnClass::go_straight;
      d.names = names;
      emit(std::move(d));
    }
    if (want_lane)
    {
      std::vector<std::optional<std::string>> lanes;
      bool usable = true;
      for (const auto &p : poses)
      {
        auto lane = assign_lane(p.xy(), *graph);
        if (!lane || graph->at(*lane).is_intersection)
        {
          usable = false;
          break;
        }
        lanes.push_back(std::move(lane));
      }
      if (!usable)
        continue;
      const auto event = lane_change_over_timeline(lanes, *graph);
      auto d = base(TaskTag::OBJ_LANE, e->entity_id);
      d.truth = ClassTruth{std::string(to_string(event.label))};
      d.negative = event.label == LaneChangeClass::no_change;
      d.names = names;
      emit(std::move(d));
    }
  }
  return out;
}

GenerationResult generate_for_sequence(const SequenceObservation &seq, const GenerationConfig &config,
                                       Augmenter *augmenter)
{
  GenerationResult out;
  const std::string name = seq.meta.name.empty() ? std::string("seq") : seq.meta.name;
  const LaneGraph *graph = seq.lane_graph ? &*seq.lane_graph : nullptr;
  const std::size_t stride = std::max<std::size_t>(1, config.frame_stride);

  if (config.tasks.count(TaskTag::RD) || config.tasks.count(TaskTag::SR) || config.tasks.count(TaskTag::OR))
  {
    for (std::size_t i = 0; i < seq.frames.size(); i += stride)
    {
      out.append(generate_for_frame(seq.frames[i], graph, FrameContext{name, i, nullptr}, config, augmenter));
    }
  }

  for (const auto anchor : clip_anchors(seq, config.clip))
  {
    const Clip clip = extract_clip(seq, anchor, config.clip);
    out.append(generate_for_clip(clip, graph, ClipContext{name}, config, augmenter));
    out.append(generate_for_frame(clip.frames.back(), graph, FrameContext{name, clip.source_indices.back(), &clip},
                                  config, augmenter));
  }
  return out;
}

namespace
{

/// Keeps `cap` members of `members` (indices into samples) chosen by a keyed
/// shuffle; marks the rest as dropped.
void keep_subset(const std::vector<QASample> &samples, const std::vector<std::size_t> &members, std::size_t cap,
                 std::uint64_t seed, const std::string &stage, std::vector<bool> &keep)
{
  if (members.size() <= cap)
    return;
  std::vector<std::pair<std::uint64_t, std::size_t>> order;
  order.reserve(members.size());
  for (const auto i : members)
    order.emplace_back(stable_seed(seed, stage + "/" + samples[i].id), i);
  std::sort(order.begin(), order.end());
  for (std::size_t k = cap; k < order.size(); ++k)
    keep[order[k].second] = false;
}

} // namespace

std::vector<QASample> balance_dataset(const std::vector<QASample> &samples, const BalanceConfig &config)
{
  std::vector<bool> keep(samples.size(), true);

  auto members_where = [&](auto pred) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
      if (keep[i] && pred(samples[i]))
        out.push_back(i);
    }
    return out;
  };

  for (const auto &[task, caps] : config.category_caps)
  {
    for (const auto &[category, cap] : caps)
    {
      const auto members =
          members_where([&](const QASample &s) { return s.task == task && s.category() == category; });
      keep_subset(samples, members, cap, config.seed,
                  fmt::format("balance/category/{}/{}", to_string(task), category), keep);
    }
  }

  for (const auto &[task, ratio] : config.negative_ratio)
  {
    const auto negatives = members_where([&](const QASample &s) { return s.task == task && s.negative; });
    const auto positives = members_where([&](const QASample &s) { return s.task == task && !s.negative; });
    const auto cap = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(positives.size()) - 1e-9));
    keep_subset(samples, negatives, cap, config.seed, fmt::format("balance/negative/{}", to_string(task)), keep);
  }

  for (const auto &[task, cap] : config.task_caps)
  {
    const auto members = members_where([&](const QASample &s) { return s.task == task; });
    keep_subset(samples, members, cap, config.seed, fmt::format("balance/task/{}", to_string(task)), keep);
  }

  std::vector<QASample> out;
  for (std::size_t i = 0; i < samples.size(); ++i)
  {
    if (keep[i])
      out.push_back(samples[i]);
  }
  return out;
}

} // namespace tbx
