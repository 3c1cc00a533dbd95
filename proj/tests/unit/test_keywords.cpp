#include <gtest/gtest.h>

#include "oracles/tmpdir.hpp"
#include "tbx/errors.hpp"
#include "tbx/keywords.hpp"

using namespace tbx;

TEST(Keywords, DefaultTableIsClean)
{
  EXPECT_TRUE(keyword_table_problems(default_keyword_table()).empty());
}

TEST(Keywords, EveryLabelMatchesItself)
{
  const auto &m = default_matcher();
  for (auto t : kAllTasks)
    for (auto label : class_labels(t))
    {
      EXPECT_EQ(m.match(label, t), std::string(label));
      EXPECT_EQ(m.match("Answer: " + std::string(label) + ".", t), std::string(label));
    }
}

TEST(Keywords, ShippedFileEqualsDefaults)
{
  const auto table = load_keyword_table(std::string(TBX_DATA_DIR) + "/keywords.json");
  EXPECT_EQ(to_json(table), to_json(default_keyword_table()));
}

TEST(Keywords, JsonRoundTrip)
{
  const auto j = to_json(default_keyword_table());
  EXPECT_EQ(to_json(keyword_table_from_json(j)), j);
  auto bad = j;
  bad["version"] = 2;
  EXPECT_THROW(keyword_table_from_json(bad), ConfigError);
  bad = j;
  bad["tasks"]["SR"] = 3;
  EXPECT_THROW(keyword_table_from_json(bad), ConfigError);
}

TEST(Keywords, ProblemsAreReported)
{
  auto t = default_keyword_table();
  t.classes[TaskTag::SR]["front"].push_back("");
  t.classes[TaskTag::SR]["sideways"] = {"sideways"};
  t.classes[TaskTag::SR]["back"].push_back("ahead");
  t.classes[TaskTag::OBJ_TURN].erase("left turn");
  const auto problems = keyword_table_problems(t);
  EXPECT_GE(problems.size(), 4u);
  EXPECT_THROW(KeywordMatcher{t}, ConfigError);
}

TEST(Keywords, KeywordClaimedByTwoClassesRejected)
{
  auto t = default_keyword_table();
  // same words as a keyword of "front left lane" once normalized
  t.classes[TaskTag::EGO_LANE]["front lane"].push_back("Front-Left Lane");
  EXPECT_FALSE(keyword_table_problems(t).empty());
  // a longer phrase owned by one class is fine: it resolves to itself
  auto ok = default_keyword_table();
  ok.classes[TaskTag::EGO_LANE]["front lane"].push_back("front left lane please");
  EXPECT_TRUE(keyword_table_problems(ok).empty());
}

TEST(Keywords, Normalize)
{
  EXPECT_EQ(normalize_response("  Front-Left\tLANE__x "), "front left lane x");
}

TEST(Keywords, WordBoundaries)
{
  const auto &m = default_matcher();
  EXPECT_FALSE(m.match("the frontier", TaskTag::SR));
  EXPECT_EQ(m.match("(front)", TaskTag::SR), "front");
  EXPECT_EQ(m.match("left-turn", TaskTag::OBJ_TURN), "left turn");
}

TEST(Keywords, LoadErrors)
{
  const auto dir = testutil::scratch("keywords");
  EXPECT_THROW(load_keyword_table((dir / "none.json").string()), IoError);
  testutil::spit(dir / "bad.json", "{");
  EXPECT_THROW(load_keyword_table((dir / "bad.json").string()), ConfigError);
}
