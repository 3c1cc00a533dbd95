#include <gtest/gtest.h>

#include "tbx/errors.hpp"
#include "tbx/lane_analysis.hpp"
#include "tbx/synthetic_scenes.hpp"

using namespace tbx;

namespace
{

sim::RoadSpec straight_road()
{
  sim::RoadSpec r;
  r.lanes_per_direction = 2;
  r.lane_width = 3.5;
  r.length = 100.0;
  r.segment_length = 25.0;
  return r;
}

LaneSegment rect_lane(const std::string &id, double y0, double y1, bool reversed = false)
{
  LaneSegment l;
  l.lane_id = id;
  const double yc = (y0 + y1) / 2.0;
  l.centerline = {{0, yc}, {50, yc}};
  if (reversed)
    std::swap(l.centerline[0], l.centerline[1]);
  l.boundary_polygon = {{0, y0}, {50, y0}, {50, y1}, {0, y1}};
  return l;
}

} // namespace

TEST(LaneAnalysis, AssignLaneAgreesWithRoadCoordinates)
{
  const auto road = straight_road();
  const auto graph = sim::build_lane_graph(road);
  for (double s = 0.5; s < 100.0; s += 3.7)
  {
    for (double d = -6.9; d < 7.0; d += 0.83)
    {
      const Vec2 p = sim::road_point(road, s, d);
      EXPECT_EQ(assign_lane(p, graph), sim::analytic_lane(road, p)) << s << "," << d;
    }
  }
}

TEST(LaneAnalysis, AssignLaneOffRoad)
{
  const auto road = straight_road();
  const auto graph = sim::build_lane_graph(road);
  EXPECT_FALSE(assign_lane(Vec2(50, 20), graph));
  EXPECT_FALSE(assign_lane(Vec2(-5, -1), graph));
}

TEST(LaneAnalysis, OverlapPrefersNearestCenterline)
{
  auto a = rect_lane("a", 0, 4);
  auto b = rect_lane("b", 3, 7);
  const LaneGraph g({a, b});
  EXPECT_EQ(assign_lane(Vec2(10, 3.2), g), "a");
  EXPECT_EQ(assign_lane(Vec2(10, 3.8), g), "b");
}

TEST(LaneAnalysis, LaneDirection)
{
  const auto l = rect_lane("r", 0, 4, true);
  EXPECT_NEAR(std::abs(lane_direction_at(l, Vec2(20, 2))), kPi, 1e-12);
  LaneSegment bad = l;
  bad.centerline = {{1, 1}, {1, 1}};
  EXPECT_THROW(lane_direction_at(bad, Vec2(0, 0)), InvalidLane);
}

TEST(LaneAnalysis, LaneChainFollowsTopology)
{
  const auto graph = sim::build_lane_graph(straight_road());
  const auto chain = lane_chain(graph, "F0_S1", 5);
  EXPECT_TRUE(chain.count("F0_S0"));
  EXPECT_TRUE(chain.count("F0_S1"));
  EXPECT_TRUE(chain.count("F0_S3"));
  EXPECT_FALSE(chain.count("F1_S1"));
  EXPECT_EQ(lane_chain(graph, "F0_S0", 1).size(), 2u);
}

TEST(LaneAnalysis, ClassifyLaneToEgo)
{
  const auto graph = sim::build_lane_graph(straight_road());
  // ego in F0 segment 1 heading +x
  const Pose ego(30, -1.75, 0, 0);
  EXPECT_EQ(classify_lane_to_ego("F0_S2", "F0_S1", ego, graph), LaneToEgoClass::front_lane);
  EXPECT_EQ(classify_lane_to_ego("F1_S2", "F0_S1", ego, graph), LaneToEgoClass::front_right_lane);
  EXPECT_EQ(classify_lane_to_ego("B0_S1", "F0_S1", ego, graph), LaneToEgoClass::oncoming_traffic_lane);
  EXPECT_EQ(classify_lane_to_ego("B1_S3", "F0_S1", ego, graph), LaneToEgoClass::oncoming_traffic_lane);
  const Pose ego_right(30, -5.25, 0, 0);
  EXPECT_EQ(classify_lane_to_ego("F0_S1", "F1_S1", ego_right, graph), LaneToEgoClass::front_left_lane);
  EXPECT_THROW(classify_lane_to_ego("nope", "F0_S1", ego, graph), InvalidArgument);
}

TEST(LaneAnalysis, OncomingThresholdIsConfigurable)
{
  auto a = rect_lane("ego", 0, 4);
  auto b = rect_lane("slanted", 4, 8);
  // heading 140 degrees
  b.centerline = {{50, 6}, {50 + 50 * std::cos(to_radians(140)), 6 + 50 * std::sin(to_radians(140))}};
  const LaneGraph g({a, b});
  const Pose ego(10, 2, 0, 0);
  EXPECT_EQ(classify_lane_to_ego("slanted", "ego", ego, g), LaneToEgoClass::oncoming_traffic_lane);
  LaneClassifyOptions strict;
  strict.oncoming_threshold_deg = 150;
  EXPECT_EQ(classify_lane_to_ego("slanted", "ego", ego, g, strict), LaneToEgoClass::front_left_lane);
}

TEST(LaneAnalysis, DetectLaneChangeChecksRightFirst)
{
  EXPECT_EQ(detect_lane_change("x", {"x"}, {"x"}), LaneChangeClass::right_lane_change);
  EXPECT_EQ(detect_lane_change("x", {"x"}, {}), LaneChangeClass::left_lane_change);
  EXPECT_EQ(detect_lane_change("x", {"y"}, {"z"}), LaneChangeClass::no_change);
}

TEST(LaneAnalysis, TimelineEvents)
{
  const auto graph = sim::build_lane_graph(straight_road());
  using L = std::vector<std::optional<std::string>>;
  auto r = lane_change_over_timeline(L{"F0_S0", "F0_S0", "F1_S0", "F1_S0"}, graph);
  EXPECT_EQ(r.label, LaneChangeClass::right_lane_change);
  EXPECT_EQ(r.frame, 2u);
  r = lane_change_over_timeline(L{"F1_S0", std::nullopt, "F0_S0"}, graph);
  EXPECT_EQ(r.label, LaneChangeClass::no_change);
  r = lane_change_over_timeline(L{"F1_S0", "F0_S1"}, graph);
  EXPECT_EQ(r.label, LaneChangeClass::left_lane_change);
  EXPECT_EQ(r.frame, 1u);
  r = lane_change_over_timeline(L{"F0_S0", "F0_S1", "F0_S2"}, graph);
  EXPECT_EQ(r.label, LaneChangeClass::no_change);
  EXPECT_FALSE(r.frame);
}

TEST(LaneAnalysis, LoneLaneCentroid)
{
  const LaneGraph g({rect_lane("only", 0, 4)});
  EXPECT_EQ(assign_lane(Vec2(25, 2), g), "only");
}

TEST(LaneAnalysis, OverlapMatchesPointToPolylineOracle)
{
  auto a = rect_lane("a", 0, 4);
  auto b = rect_lane("b", 2, 6);
  a.is_intersection = b.is_intersection = true;
  const LaneGraph g({a, b});
  for (double y = 2.05; y < 4.0; y += 0.1)
  {
    // centerlines are horizontal lines at y = 2 and y = 4
    const std::string want = std::abs(y - 2.0) <= std::abs(y - 4.0) ? "a" : "b";
    EXPECT_EQ(assign_lane(Vec2(17, y), g), want) << y;
  }
}

TEST(LaneAnalysis, DirectionOfAxisAndArcCenterlines)
{
  LaneSegment up;
  up.lane_id = "up";
  up.centerline = {{0, 0}, {0, 50}};
  EXPECT_NEAR(lane_direction_at(up, Vec2(0.5, 20)), kPi / 2, 1e-12);
  EXPECT_NEAR(lane_direction_at(rect_lane("x", 0, 4), Vec2(3, 2)), 0.0, 1e-12);

  LaneSegment arc;
  arc.lane_id = "arc";
  const double r = 30.0;
  for (int k = 0; k <= 2000; ++k)
  {
    const double phi = k * (kPi / 2) / 2000;
    arc.centerline.emplace_back(r * std::sin(phi), r - r * std::cos(phi));
  }
  for (double phi : {0.2, 0.7, 1.3})
  {
    const Vec2 p(r * std::sin(phi), r - r * std::cos(phi));
    // finite-difference tangent of the analytic circle
    const double e = 1e-7;
    const Vec2 q(r * std::sin(phi + e), r - r * std::cos(phi + e));
    const double tangent = std::atan2(q.y() - p.y(), q.x() - p.x());
    EXPECT_NEAR(lane_direction_at(arc, p), tangent, 1e-3);
  }
}

TEST(LaneAnalysis, LeftNeighborMatchesLateralOffsetOracle)
{
  auto ego = rect_lane("ego", 0, 4);
  auto left = rect_lane("left", 4, 8);
  ego.left_neighbor_id = "left";
  left.right_neighbor_id = "ego";
  const LaneGraph g({ego, left});
  for (double yaw : {-0.3, 0.0, 0.25})
  {
    const Pose p(20, 2, 0, yaw);
    // lateral offset of the left centerline's closest point, in the ego frame
    const double dx = 20 - p.x, dy = 6 - p.y;
    const double lateral = -std::sin(yaw) * dx + std::cos(yaw) * dy;
    const auto want = lateral > 0 ? LaneToEgoClass::front_left_lane : LaneToEgoClass::front_right_lane;
    EXPECT_EQ(classify_lane_to_ego("left", "ego", p, g), want);
  }
  EXPECT_EQ(classify_lane_to_ego("ego", "left", Pose(20, 6, 0, 0), g), LaneToEgoClass::front_right_lane);
  auto anti = rect_lane("anti", 4, 8, true);
  const LaneGraph g2({ego, anti});
  EXPECT_EQ(classify_lane_to_ego("anti", "ego", Pose(20, 2, 0, 0), g2), LaneToEgoClass::oncoming_traffic_lane);
}

TEST(LaneAnalysis, SimulatedLaneChangeFlaggedAtCrossingFrame)
{
  sim::ScenarioSpec s;
  s.ego.speed = 5;
  s.ego.start = Pose(0, -1.75, 0, 0);
  s.ego.duration = 10;
  sim::AgentSpec a;
  a.id = "x";
  a.trajectory.kind = sim::TrajectoryKind::lane_change;
  a.trajectory.speed = 9;
  a.trajectory.start = Pose(5, -1.75, 0, 0);
  a.trajectory.lateral_shift = -3.5;
  a.trajectory.shift_start = 3.0;
  a.trajectory.shift_duration = 2.5;
  a.trajectory.duration = 10;
  s.others.push_back(a);
  const auto res = sim::simulate(s);
  const auto *labels = res.labels.agent("x");
  std::vector<std::optional<std::string>> lanes;
  for (const auto &p : labels->world_poses)
    lanes.push_back(assign_lane(p.xy(), *res.sequence.lane_graph));
  const auto ev = lane_change_over_timeline(lanes, *res.sequence.lane_graph);
  EXPECT_EQ(ev.label, LaneChangeClass::right_lane_change);
  EXPECT_EQ(ev.frame, labels->lane_change_frame);
}
