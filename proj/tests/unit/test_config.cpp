#include <gtest/gtest.h>

#include "oracles/tmpdir.hpp"
#include "tbx/config.hpp"
#include "tbx/errors.hpp"

using namespace tbx;
using nlohmann::json;

TEST(Config, DefaultsMatchDocumentedValues)
{
  const ToolConfig c;
  EXPECT_DOUBLE_EQ(c.evaluation.distance_tol, 0.25);
  EXPECT_DOUBLE_EQ(c.evaluation.angle_tol_deg, 15.0);
  EXPECT_DOUBLE_EQ(c.generation.turn_threshold_deg, 25.0);
  EXPECT_EQ(c.generation.clip.frame_count, 8u);
  EXPECT_DOUBLE_EQ(c.generation.clip.dt, 0.2);
  EXPECT_EQ(c.generation.tasks.size(), 8u);
}

TEST(Config, DefaultsSurviveEmptyOverlayAndRoundTrip)
{
  const ToolConfig c;
  EXPECT_EQ(to_json(apply_config_json(c, json::object())), to_json(c));
  // the serialized form is itself a valid overlay
  EXPECT_EQ(to_json(apply_config_json(ToolConfig{}, to_json(c))), to_json(c));
}

TEST(Config, OverlayChangesOnlyNamedKeys)
{
  const auto c = apply_config_json({}, json{{"seed", 9},
                                            {"generation", {{"clip", {{"dt", 0.5}}}, {"tasks", {"RD", "SR"}}}},
                                            {"evaluation", {{"distance_tol", 0.1}}},
                                            {"balance", {{"task_caps", {{"RD", 10}}}}}});
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.generation.seed, 9u);
  EXPECT_EQ(c.generation.balance.seed, 9u);
  EXPECT_DOUBLE_EQ(c.generation.clip.dt, 0.5);
  EXPECT_EQ(c.generation.clip.frame_count, 8u);
  EXPECT_EQ(c.generation.tasks, (std::set<TaskTag>{TaskTag::RD, TaskTag::SR}));
  EXPECT_DOUBLE_EQ(c.evaluation.distance_tol, 0.1);
  EXPECT_DOUBLE_EQ(c.evaluation.angle_tol_deg, 15.0);
  EXPECT_EQ(c.generation.balance.task_caps.at(TaskTag::RD), 10u);
}

TEST(Config, LayersApplyInOrder)
{
  const auto dir = testutil::scratch("config_layers");
  testutil::spit(dir / "a.json", R"({"seed": 4, "evaluation": {"angle_tol_deg": 10}})");
  testutil::spit(dir / "b.json", R"({"evaluation": {"angle_tol_deg": 5}})");
  auto c = load_config_file((dir / "a.json").string());
  c = load_config_file((dir / "b.json").string(), c);
  EXPECT_EQ(c.seed, 4u);
  EXPECT_DOUBLE_EQ(c.evaluation.angle_tol_deg, 5.0);
}

TEST(Config, RejectsUnknownKeysAndWrongTypes)
{
  const std::vector<json> bad{
      {{"sed", 1}},
      {{"seed", -1}},
      {{"seed", "1"}},
      {{"generation", {{"frame_strid", 2}}}},
      {{"generation", {{"frame_stride", 1.5}}}},
      {{"generation", {{"tasks", {"XX"}}}}},
      {{"generation", {{"tasks", "RD"}}}},
      {{"generation", {{"clip", {{"dt", 0}}}}}},
      {{"generation", {{"or_numeric_ratio", 1.5}}}},
      {{"generation", {{"lane_task_classes", {"boat"}}}}},
      {{"balance", {{"task_caps", {{"RD", -3}}}}}},
      {{"balance", {{"negative_ratio", 2}}}},
      {{"evaluation", {{"distance_tol", "wide"}}}},
      {{"evaluation", {{"keyword_table", 3}}}},
      {{"augmentation", {{"url", "http://x"}}}},
      json::array(),
  };
  for (const auto &j : bad)
    EXPECT_THROW(apply_config_json({}, j), ConfigError) << j.dump();
}

TEST(Config, UnknownKeyIsNamed)
{
  try
  {
    apply_config_json({}, json{{"generation", {{"lane", {{"depth", 1}}}}}});
    FAIL();
  }
  catch (const ConfigError &e)
  {
    EXPECT_NE(std::string(e.what()).find("generation.lane.depth"), std::string::npos);
  }
}

TEST(Config, FileErrors)
{
  const auto dir = testutil::scratch("config_errors");
  EXPECT_THROW(load_config_file((dir / "missing.json").string()), IoError);
  testutil::spit(dir / "bad.json", "{\"seed\": ");
  EXPECT_THROW(load_config_file((dir / "bad.json").string()), ConfigError);
}

TEST(Config, HashTracksContent)
{
  ToolConfig a, b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 64u);
  b.evaluation.angle_tol_deg = 14.0;
  EXPECT_NE(config_hash(a), config_hash(b));
  b = a;
  b.seed = 1;
  resolve_seed(b);
  EXPECT_NE(config_hash(a), config_hash(b));
}
