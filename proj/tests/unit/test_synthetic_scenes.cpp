#include <cmath>

#include <gtest/gtest.h>

#include "oracles/kinematics.hpp"
#include "tbx/errors.hpp"
#include "tbx/geometry.hpp"
#include "tbx/scenario_io.hpp"
#include "tbx/synthetic_scenes.hpp"

using namespace tbx;
using namespace tbx::sim;

TEST(Synthetic, StraightTrajectory)
{
  TrajectorySpec t;
  t.speed = 5;
  t.start = Pose(1, 2, 0, kPi / 2);
  t.duration = 10;
  EXPECT_TRUE(t.position(2.0).isApprox(Vec2(1, 12)));
  EXPECT_DOUBLE_EQ(t.path_length(0, 4), 20.0);
  EXPECT_DOUBLE_EQ(t.yaw_change_deg(0, 4), 0.0);
}

TEST(Synthetic, ArcClosedForm)
{
  TrajectorySpec t;
  t.kind = TrajectoryKind::arc;
  t.speed = 10;
  t.radius = -20;
  t.duration = 10;
  // quarter circle to the right after pi*20/2 meters
  const double tq = kPi * 20 / 2 / 10;
  EXPECT_TRUE(t.position(tq).isApprox(Vec2(20, -20), 1e-9));
  EXPECT_NEAR(t.yaw_change_deg(0, tq), -90.0, 1e-9);
  EXPECT_NEAR(t.path_length(0, tq), oracle::arc_length(10, tq), 1e-9);
  // every point stays on the circle
  for (double s = 0; s < 10; s += 0.37)
    EXPECT_NEAR((t.position(s) - Vec2(0, -20)).norm(), 20.0, 1e-9);
}

TEST(Synthetic, LaneChangeSmoothstep)
{
  TrajectorySpec t;
  t.kind = TrajectoryKind::lane_change;
  t.speed = 10;
  t.lateral_shift = 3.5;
  t.shift_start = 2;
  t.shift_duration = 4;
  t.duration = 10;
  EXPECT_NEAR(t.position(1.0).y(), 0.0, 1e-12);
  EXPECT_NEAR(t.position(4.0).y(), 1.75, 1e-12);
  EXPECT_NEAR(t.position(8.0).y(), 3.5, 1e-12);
  // u = 0.25 -> 3/16 - 2/64
  EXPECT_NEAR(t.position(3.0).y(), 3.5 * (3 * 0.0625 - 2 * 0.015625), 1e-12);
  EXPECT_GT(t.heading(4.0), 0.0);
  EXPECT_NEAR(t.heading(8.0), 0.0, 1e-12);
}

TEST(Synthetic, SpecProblems)
{
  TrajectorySpec t;
  t.kind = TrajectoryKind::arc;
  t.duration = 1;
  EXPECT_FALSE(trajectory_problems(t).empty());
  RoadSpec r;
  r.lane_width = -1;
  EXPECT_FALSE(road_problems(r).empty());
  ScenarioSpec s;
  s.ego.duration = 0;
  EXPECT_THROW(simulate(s), InvalidArgument);
}

TEST(Synthetic, RoadCoordinatesRoundTrip)
{
  RoadSpec r;
  r.curvature = 1.0 / 80.0;
  r.length = 120;
  for (double s = 0; s <= 120; s += 7.5)
    for (double d = -6; d <= 6; d += 1.5)
    {
      const auto rc = to_road(r, road_point(r, s, d));
      EXPECT_NEAR(rc.s, s, 1e-6);
      EXPECT_NEAR(rc.d, d, 1e-6);
    }
}

TEST(Synthetic, FrameTimes)
{
  const auto t = frame_times(15.0, 10.0);
  ASSERT_EQ(t.size(), 150u);
  EXPECT_DOUBLE_EQ(t[37], 3.7);
}

TEST(Synthetic, EntitiesAreEgoRelativeAndLabelsConsistent)
{
  ScenarioSpec s;
  s.ego.speed = 8;
  s.ego.start = Pose(10, -1.75, 0, 0);
  s.ego.duration = 5;
  AgentSpec a;
  a.id = "lead";
  a.trajectory.speed = 8;
  a.trajectory.start = Pose(25, -1.75, 0, 0);
  a.trajectory.duration = 5;
  s.others.push_back(a);
  const auto res = simulate(s);
  ASSERT_EQ(res.sequence.frames.size(), 50u);
  for (const auto &f : res.sequence.frames)
  {
    const auto *e = f.find_entity("lead");
    ASSERT_NE(e, nullptr);
    EXPECT_NEAR(e->pose.x, 15.0, 1e-9);
    EXPECT_NEAR(e->pose.y, 0.0, 1e-9);
  }
  for (const auto &pl : res.labels.pairs[10])
  {
    EXPECT_NEAR(pl.distance, 15.0, 1e-9);
    EXPECT_NEAR(std::abs(pl.bearing_deg), pl.reference == "ego" ? 0.0 : 180.0, 1e-9);
  }
  EXPECT_TRUE(validate(res.sequence).empty());
}

TEST(Synthetic, LaneChangeLabelsMatchAnalyticLanes)
{
  ScenarioSpec s;
  s.ego.start = Pose(0, -1.75, 0, 0);
  s.ego.duration = 8;
  s.ego.speed = 5;
  AgentSpec a;
  a.id = "changer";
  a.trajectory.kind = TrajectoryKind::lane_change;
  a.trajectory.speed = 10;
  a.trajectory.start = Pose(5, -1.75, 0, 0);
  a.trajectory.lateral_shift = -3.5;
  a.trajectory.shift_start = 2;
  a.trajectory.shift_duration = 3;
  a.trajectory.duration = 8;
  s.others.push_back(a);
  const auto labels = analytic_labels(s);
  const auto *l = labels.agent("changer");
  ASSERT_NE(l, nullptr);
  EXPECT_EQ(l->lane_change_direction, -1);
  ASSERT_TRUE(l->lane_change_frame);
  const std::size_t k = *l->lane_change_frame;
  EXPECT_EQ(l->lanes[k - 1]->substr(0, 2), "F0");
  EXPECT_EQ(l->lanes[k]->substr(0, 2), "F1");
  // crossing happens when the smoothstep reaches one half, at t = 3.5 s
  EXPECT_NEAR(labels.timestamps[k], 3.5, 0.1 + 1e-9);
}

TEST(Synthetic, JitterIsSeeded)
{
  ScenarioSpec s;
  s.ego.speed = 5;
  s.ego.duration = 2;
  s.position_jitter = 0.1;
  s.seed = 9;
  EXPECT_EQ(simulate(s).sequence, simulate(s).sequence);
  auto other = s;
  other.seed = 10;
  EXPECT_NE(simulate(s).sequence, simulate(other).sequence);
}

TEST(Synthetic, ScenarioJsonRoundTrip)
{
  auto corpus = demo_corpus(4, 3);
  ASSERT_EQ(corpus.size(), 3u);
  for (const auto &spec : corpus)
  {
    const auto back = scenario_from_json(to_json(spec));
    EXPECT_EQ(simulate(back).sequence, simulate(spec).sequence);
  }
  EXPECT_THROW(scenario_from_json(nlohmann::json{{"bogus", 1}}), ConfigError);
}

TEST(Synthetic, DemoCorpusDeterministic)
{
  const auto a = demo_corpus(1, 4);
  const auto b = demo_corpus(1, 4);
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_EQ(to_json(a[i]), to_json(b[i]));
  EXPECT_NE(to_json(demo_corpus(2, 1)[0]), to_json(a[0]));
}
