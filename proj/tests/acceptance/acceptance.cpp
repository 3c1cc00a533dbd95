// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "oracles/binning.hpp"
#include "oracles/kinematics.hpp"
#include "oracles/tmpdir.hpp"
#include "tbx/cli_commands.hpp"
#include "tbx/event_detection.hpp"
#include "tbx/evaluator.hpp"
#include "tbx/geometry.hpp"
#include "tbx/lane_analysis.hpp"
#include "tbx/qa_generation.hpp"
#include "tbx/synthetic_scenes.hpp"

using namespace tbx;
namespace fs = std::filesystem;

namespace
{

int failures = 0;

void report(int id, const std::string &name, bool ok, const std::string &detail)
{
  std::cout << (ok ? "PASS" : "FAIL") << fmt::format(" [{}] {}: {}", id, name, detail) << std::endl;
  if (!ok)
    ++failures;
}

// (task, category) -> count of the benchmark composition
const std::vector<std::tuple<TaskTag, std::string, int>> kBench{
    {TaskTag::RD, "", 250},
    {TaskTag::SR, "back", 61},
    {TaskTag::SR, "back left", 30},
    {TaskTag::SR, "back right", 9},
    {TaskTag::SR, "front", 87},
    {TaskTag::SR, "front left", 45},
    {TaskTag::SR, "front right", 18},
    {TaskTag::OR, "", 122},
    {TaskTag::OR, "opposite", 51},
    {TaskTag::OR, "perpendicular", 16},
    {TaskTag::OR, "similar", 61},
    {TaskTag::EGO_LANE, "front lane", 71},
    {TaskTag::EGO_LANE, "front left lane", 40},
    {TaskTag::EGO_LANE, "front right lane", 31},
    {TaskTag::EGO_LANE, "oncoming traffic lane", 108},
    {TaskTag::OBJ_LANE, "left lane change", 62},
    {TaskTag::OBJ_LANE, "no change", 142},
    {TaskTag::OBJ_LANE, "right lane change", 46},
    {TaskTag::OBJ_TURN, "go straight", 126},
    {TaskTag::OBJ_TURN, "left turn", 67},
    {TaskTag::OBJ_TURN, "right turn", 57},
    {TaskTag::EGO_TURN, "go straight", 122},
    {TaskTag::EGO_TURN, "left turn", 38},
    {TaskTag::EGO_TURN, "right turn", 90},
    {TaskTag::EGO_TRA, "", 250},
};

std::vector<QASample> bench_samples()
{
  std::vector<QASample> out;
  for (const auto &[task, label, n] : kBench)
    for (int i = 0; i < n; ++i)
    {
      QASample s;
      s.id = fmt::format("{}/{}/{}", to_string(task), label, i);
      s.task = task;
      if (label.empty())
      {
        s.ground_truth = NumericTruth{12.0, task == TaskTag::OR ? Unit::degrees : Unit::meters};
        if (task == TaskTag::OR)
          s.or_subtype = OrSubtype::numeric;
      }
      else
      {
        s.ground_truth = ClassTruth{label};
        if (task == TaskTag::OR)
          s.or_subtype = OrSubtype::class_label;
      }
      out.push_back(s);
    }
  return out;
}

void random_responder()
{
  const auto start = std::chrono::steady_clock::now();
  const auto samples = bench_samples();
  std::mt19937_64 rng(2024);
  std::map<TaskTag, double> sum;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial)
  {
    std::vector<Verdict> verdicts;
    for (const auto &s : samples)
    {
      // a random guesser has no numeric answer; numeric questions score zero
      std::string response;
      if (!s.is_numeric())
      {
        const auto labels = class_labels(s.task);
        response = std::string(labels[std::uniform_int_distribution<std::size_t>(0, labels.size() - 1)(rng)]);
      }
      verdicts.push_back(score_sample(s, {s.id, response}));
    }
    const auto r = aggregate(verdicts);
    for (const auto &t : r.tasks)
      sum[t.task] += t.accuracy();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::map<TaskTag, std::pair<double, double>> expected{
      {TaskTag::RD, {0.0, 0.0}},        {TaskTag::SR, {16.7, 1.0}},       {TaskTag::OR, {17.1, 1.0}},
      {TaskTag::EGO_LANE, {25.0, 1.2}}, {TaskTag::OBJ_LANE, {33.3, 1.3}}, {TaskTag::OBJ_TURN, {33.3, 1.3}},
      {TaskTag::EGO_TURN, {33.3, 1.3}}, {TaskTag::EGO_TRA, {0.0, 0.0}}};
  bool ok = secs < 60.0;
  std::string detail;
  for (const auto t : kAllTasks)
  {
    const double mean = sum[t] / trials;
    const auto [want, tol] = expected.at(t);
    ok = ok && std::abs(mean - want) <= tol + 1e-9;
    detail += fmt::format("{} {:.2f} ", to_string(t), mean);
  }
  report(1, "random responder matches chance rates", ok, detail + fmt::format("({:.1f} s)", secs));
}

void binning_sweep()
{
  std::size_t mismatches = 0, checked = 0;
  for (int k = -359; k <= 360; ++k)
  {
    const double theta = 0.5 * k;
    ++checked;
    if (std::string(to_string(spatial_relation(theta))) != oracle::spatial_label(theta))
      ++mismatches;
    if (theta >= 0.0)
    {
      ++checked;
      if (std::string(to_string(orientation_relation(theta))) != oracle::orientation_label(theta))
        ++mismatches;
    }
  }
  report(2, "angle binning sweep at 0.5 deg", mismatches == 0,
         fmt::format("{} mismatches in {} checks", mismatches, checked));
}

void arc_clips()
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> yaw_dist(-180.0, 180.0);
  const double speed = 10.0;
  int class_ok = 0, dist_ok = 0, n = 0;
  double worst = 0.0;
  while (n < 200)
  {
    const double target = yaw_dist(rng);
    if (std::abs(std::abs(target) - 25.0) <= 1.0)
      continue;
    ++n;
    const double span = 1.4;
    sim::ScenarioSpec s;
    s.name = "arc";
    s.road.length = 400;
    s.ego.speed = speed;
    s.ego.start = Pose(10, -1.75, 0, 0);
    s.ego.duration = 2.0;
    if (std::abs(target) < 1e-6)
      s.ego.kind = sim::TrajectoryKind::straight;
    else
    {
      s.ego.kind = sim::TrajectoryKind::arc;
      s.ego.radius = speed * span / to_radians(target);
    }
    const auto res = sim::simulate(s);
    const Clip clip = extract_clip(res.sequence, 0);
    const double yaw = accumulated_yaw(ego_track(clip));
    if (std::string(to_string(classify_turn(yaw))) == oracle::turn_label(target, 25.0))
      ++class_ok;
    const double arc = oracle::arc_length(speed, clip.sampled_span());
    const double rel = std::abs(ego_traverse_distance(clip) - arc) / arc;
    worst = std::max(worst, rel);
    if (rel <= 0.01)
      ++dist_ok;
  }
  report(3, "arc clips: turn class and traverse distance", class_ok == n && dist_ok == n,
         fmt::format("class {}/{}, distance {}/{} (worst {:.3f}%)", class_ok, n, dist_ok, n, 100 * worst));
}

void lane_change_clips()
{
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int ok = 0;
  const int n = 50;
  std::string first_bad;
  for (int i = 0; i < n; ++i)
  {
    const int dir = i % 3 == 0 ? 1 : (i % 3 == 1 ? -1 : 0);
    sim::ScenarioSpec s;
    s.name = fmt::format("lc{}", i);
    s.road.lanes_per_direction = 3;
    s.road.two_way = false;
    s.road.length = 300;
    s.ego.kind = sim::TrajectoryKind::straight;
    s.ego.speed = 8.0 + 4.0 * u(rng);
    s.ego.start = Pose(5, -5.25, 0, 0);
    s.ego.duration = 3.0;
    sim::AgentSpec a;
    a.id = "car";
    a.trajectory.kind = dir == 0 ? sim::TrajectoryKind::straight : sim::TrajectoryKind::lane_change;
    a.trajectory.speed = s.ego.speed + 2.0 * (u(rng) - 0.5);
    a.trajectory.start = Pose(20 + 15 * u(rng), -5.25, 0, 0);
    a.trajectory.duration = 3.0;
    a.trajectory.lateral_shift = 3.5 * dir;
    a.trajectory.shift_start = 0.1 + 0.4 * u(rng);
    a.trajectory.shift_duration = 0.6 + 0.4 * u(rng);
    s.others.push_back(a);
    const auto res = sim::simulate(s);
    const auto *labels = res.labels.agent("car");

    const Clip clip = extract_clip(res.sequence, 0);
    GenerationConfig g;
    g.tasks = {TaskTag::OBJ_LANE};
    const auto out = generate_for_clip(clip, &*res.sequence.lane_graph, ClipContext{s.name}, g);
    std::string got = "(none)";
    for (const auto &q : out.samples)
      if (q.task == TaskTag::OBJ_LANE && !q.entities.empty() && q.entities[0].entity_id == "car")
        got = std::get<ClassTruth>(q.ground_truth).label;
    const std::string want = labels->lane_change_direction > 0   ? "left lane change"
                             : labels->lane_change_direction < 0 ? "right lane change"
                                                                 : "no change";
    const int want_dir = labels->lane_change_direction;
    if (got == want && want_dir == dir)
      ++ok;
    else if (first_bad.empty())
      first_bad = fmt::format(" first mismatch #{}: got '{}', simulator '{}'", i, got, want);
  }
  report(4, "lane-change clips agree with simulator labels", ok == n, fmt::format("{}/{}{}", ok, n, first_bad));
}

void tolerance_boundaries()
{
  auto sample = [](TaskTag t, double v, Unit u) {
    QASample s;
    s.id = "x";
    s.task = t;
    s.ground_truth = NumericTruth{v, u};
    if (t == TaskTag::OR)
      s.or_subtype = OrSubtype::numeric;
    return s;
  };
  const auto rd = sample(TaskTag::RD, 100.0, Unit::meters);
  const auto orr = sample(TaskTag::OR, 90.0, Unit::degrees);
  const bool a = score_sample(rd, {"x", "125 meters"}).correct;
  const bool b = score_sample(rd, {"x", "125.01 meters"}).correct;
  const bool c = score_sample(orr, {"x", "105 degrees"}).correct;
  const bool d = score_sample(orr, {"x", "105.01 degrees"}).correct;
  report(5, "tolerance boundaries", a && !b && c && !d,
         fmt::format("125/100 {}, 125.01/100 {}, 105/90 {}, 105.01/90 {}", a, b, c, d));
}

void clip_sampling()
{
  sim::ScenarioSpec s;
  s.ego.kind = sim::TrajectoryKind::straight;
  s.ego.speed = 10;
  s.ego.duration = 15.0;
  s.road.length = 400;
  s.ego.start = Pose(5, -1.75, 0, 0);
  const auto seq = sim::simulate(s).sequence;
  const Clip c = extract_clip(seq, 0);
  bool ok = c.frames.size() == 8;
  double worst = 0.0;
  for (std::size_t k = 1; k < c.frames.size(); ++k)
    worst = std::max(worst, std::abs(c.frames[k].timestamp - c.frames[k - 1].timestamp - 0.2));
  ok = ok && worst <= 0.001;
  report(6, "clip sampling at 10 Hz", ok,
         fmt::format("{} frames from {} s, max |dt - 0.2| = {:.2e}", c.frames.size(), seq.frames.back().timestamp,
                     worst));
}

void generate_determinism()
{
  const auto root = testutil::scratch("acceptance_generate");
  ToolConfig config;
  config.seed = 42;
  resolve_seed(config);
  std::ostringstream out, err;
  SimulateArgs sa;
  sa.out_dir = (root / "sims").string();
  bool ok = cmd_simulate(sa, config, out, err) == kExitOk;
  std::string runs[2];
  for (int i = 0; i < 2 && ok; ++i)
  {
    GenerateArgs g;
    g.inputs = {sa.out_dir};
    g.out_dir = (root / fmt::format("run{}", i)).string();
    ok = cmd_generate(g, config, out, err) == kExitOk;
    runs[i] = testutil::slurp(fs::path(g.out_dir) / "dataset.jsonl");
  }
  double total = 0.0;
  std::size_t samples = 0;
  if (ok)
  {
    const auto data = read_dataset_jsonl((root / "run0" / "dataset.jsonl").string());
    samples = data.samples.size();
    for (const double p : compute_stats(data.samples).printed_percentages())
      total += p;
  }
  ok = ok && !runs[0].empty() && runs[0] == runs[1] && std::abs(total - 100.0) <= 0.1;
  report(7, "generation is byte-identical and stats close", ok,
         fmt::format("{} samples, identical {}, percentages sum {:.1f}", samples, runs[0] == runs[1], total));
}

void reference_row_fixture()
{
  const std::map<TaskTag, int> correct{{TaskTag::RD, 21},        {TaskTag::SR, 80},        {TaskTag::OR, 102},
                                       {TaskTag::EGO_LANE, 136}, {TaskTag::OBJ_LANE, 99},  {TaskTag::OBJ_TURN, 108},
                                       {TaskTag::EGO_TURN, 101}, {TaskTag::EGO_TRA, 40}};
  std::map<TaskTag, int> seen;
  std::vector<Verdict> verdicts;
  for (const auto &s : bench_samples())
  {
    const bool right = seen[s.task]++ < correct.at(s.task);
    std::string response;
    if (const auto *n = std::get_if<NumericTruth>(&s.ground_truth))
      response = right ? fmt::format("{:.1f}", n->value) : "no idea";
    else
      response = right ? std::get<ClassTruth>(s.ground_truth).label : "";
    verdicts.push_back(score_sample(s, {s.id, response}));
  }
  const auto r = aggregate(verdicts);
  std::string row;
  for (const auto &t : r.tasks)
    row += fmt::format("{:.1f} ", round_1dp(t.accuracy()));
  const double avg = round_1dp(r.average());
  report(8, "fixture report average", std::abs(avg - 34.4) < 1e-9, row + fmt::format("Avg {:.1f}", avg));
}

} // namespace

int main()
{
  const std::vector<std::function<void()>> criteria{random_responder,      binning_sweep, arc_clips,
                                                    lane_change_clips,     tolerance_boundaries,
                                                    clip_sampling,         generate_determinism, reference_row_fixture};
  for (const auto &c : criteria)
  {
    try
    {
      c();
    }
    catch (const std::exception &e)
    {
      std::cout << "FAIL exception: " << e.what() << std::endl;
      ++failures;
    }
  }
  std::cout << (failures == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failures)) << std::endl;
  return failures == 0 ? 0 : 1;
}
