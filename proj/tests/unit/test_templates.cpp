#include <random>
#include <set>

#include <gtest/gtest.h>

#include "tbx/errors.hpp"
#include "tbx/templates.hpp"

using namespace tbx;

namespace
{

std::size_t count_placeholders(std::string_view text)
{
  std::size_t n = 0;
  for (auto pos = text.find(kPlaceholder); pos != std::string_view::npos; pos = text.find(kPlaceholder, pos + 1))
    ++n;
  return n;
}

} // namespace

TEST(Templates, ArityMatchesPlaceholders)
{
  for (const auto &t : question_templates())
    EXPECT_EQ(count_placeholders(t.text), t.arity) << t.text;
}

TEST(Templates, EveryTaskHasATemplateItCanUse)
{
  EXPECT_EQ(templates_for(TaskTag::RD, std::nullopt, 2).size(), 4u);
  EXPECT_EQ(templates_for(TaskTag::SR, std::nullopt, 2).size(), 2u);
  EXPECT_EQ(templates_for(TaskTag::SR, std::nullopt, 3).size(), 1u);
  EXPECT_EQ(templates_for(TaskTag::OR, OrSubtype::class_label, 2).size(), 3u);
  EXPECT_EQ(templates_for(TaskTag::OR, OrSubtype::numeric, 2).size(), 3u);
  EXPECT_EQ(templates_for(TaskTag::EGO_LANE, std::nullopt, 1).size(), 1u);
  EXPECT_EQ(templates_for(TaskTag::OBJ_LANE, std::nullopt, 1).size(), 1u);
  EXPECT_EQ(templates_for(TaskTag::OBJ_TURN, std::nullopt, 1).size(), 1u);
  EXPECT_EQ(templates_for(TaskTag::EGO_TURN, std::nullopt, 0).size(), 1u);
  EXPECT_EQ(templates_for(TaskTag::EGO_TRA, std::nullopt, 0).size(), 1u);
}

TEST(Templates, RenderFillsLeftToRight)
{
  std::mt19937_64 rng(1);
  const std::vector<std::string> refs{"Entity #1", "Ego-vehicle"};
  for (int i = 0; i < 50; ++i)
  {
    const auto q = render_question(TaskTag::SR, std::nullopt, refs, rng);
    EXPECT_EQ(q.find(kPlaceholder), std::string::npos);
    const auto a = q.find("Entity #1");
    const auto b = q.find("Ego-vehicle");
    ASSERT_NE(a, std::string::npos);
    ASSERT_NE(b, std::string::npos);
    EXPECT_LT(a, b);
  }
}

TEST(Templates, RenderCoversAllCandidates)
{
  std::mt19937_64 rng(2);
  const std::vector<std::string> refs{"Entity #1", "Entity #2"};
  std::set<std::string> seen;
  for (int i = 0; i < 200; ++i)
    seen.insert(render_question(TaskTag::RD, std::nullopt, refs, rng));
  EXPECT_EQ(seen.size(), 4u);
}

TEST(Templates, RenderErrors)
{
  std::mt19937_64 rng(3);
  const std::vector<std::string> dup{"Entity #1", "Entity #1"};
  EXPECT_THROW(render_question(TaskTag::RD, std::nullopt, dup, rng), TemplateError);
  const std::vector<std::string> one{"Entity #1"};
  EXPECT_THROW(render_question(TaskTag::RD, std::nullopt, one, rng), TemplateError);
  const std::vector<std::string> none;
  EXPECT_NO_THROW(render_question(TaskTag::EGO_TRA, std::nullopt, none, rng));
}

TEST(Templates, SampleHelpers)
{
  EXPECT_EQ(entity_color(1).rgb, (Rgb{0, 255, 255}));
  EXPECT_EQ(entity_color(2).rgb, (Rgb{255, 0, 255}));
  EXPECT_THROW(entity_color(3), InvalidArgument);
  EXPECT_EQ(entity_referent(2), "Entity #2");
  EXPECT_EQ(format_numeric_answer(15.534, Unit::meters), "15.53 meters");
  EXPECT_EQ(format_numeric_answer(90.0, Unit::degrees), "90.00 degrees");
}
