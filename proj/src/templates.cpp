#include "tbx/templates.hpp"

#include <array>
#include <set>

#include <fmt/format.h>

#include "tbx/errors.hpp"

namespace tbx
{

namespace
{

constexpr auto kClass = OrSubtype::class_label;
constexpr auto kNumeric = OrSubtype::numeric;

const std::array<QuestionTemplate, 18> kTemplates{{
    {TaskTag::RD, std::nullopt,
     "Can you measure straight-line distance in meters between <entity_n> and <entity_n>?", 2},
    {TaskTag::RD, std::nullopt, "How far is <entity_n> from <entity_n> in meters?", 2},
    {TaskTag::RD, std::nullopt, "How many meters apart are <entity_n> and <entity_n>?", 2},
    {TaskTag::RD, std::nullopt, "What is distance from <entity_n> to <entity_n> along road's surface in meters?",
     2},

    // needs three distinct referents; the generator only ever uses two
    {TaskTag::SR, std::nullopt,
     "How are <entity_n> and <entity_n> spatially related, from <entity_n> perspective?", 3},
    {TaskTag::SR, std::nullopt, "What is spatial position of <entity_n> relative to <entity_n>?", 2},
    {TaskTag::SR, std::nullopt, "What is spatial relation of <entity_n> to <entity_n>?", 2},

    {TaskTag::OR, kClass,
     "How do you describe orientation of <entity_n> relative to <entity_n>, similar, opposite or perpendicular?",
     2},
    {TaskTag::OR, kClass,
     "How is <entity_n> oriented relative to <entity_n>, similar, opposite or perpendicular?", 2},
    {TaskTag::OR, kNumeric, "What is angle between <entity_n> and <entity_n>, in degrees?", 2},
    {TaskTag::OR, kNumeric, "What is facing angle of <entity_n> relative to <entity_n>, in degrees?", 2},
    {TaskTag::OR, kClass,
     "What is orientation of <entity_n> relative to <entity_n>, similar, opposite or perpendicular?", 2},
    {TaskTag::OR, kNumeric, "What is yaw angle different between <entity_n> and <entity_n>, in degrees?", 2},

    {TaskTag::EGO_LANE, std::nullopt,
     "How would you describe lane position of <entity_n>? Options: front lane, front left lane, front right "
     "lane, or oncoming traffic lane.",
     1},

    {TaskTag::OBJ_LANE, std::nullopt,
     "How would you describe driving scene involving <entity_n>? Please explain, focusing on vehicle's lane "
     "change maneuver.",
     1},

    {TaskTag::OBJ_TURN, std::nullopt,
     "How would you describe driving scene involving <entity_n>? Please explain, focusing on vehicle's turning "
     "maneuver.",
     1},

    {TaskTag::EGO_TURN, std::nullopt,
     "How would you describe driving scene involving our car? Please explain, focusing on our car's turning "
     "maneuver.",
     0},

    {TaskTag::EGO_TRA, std::nullopt,
     "How far has our car driven and what kind of steering maneuver did it perform in current scene?", 0},
}};

} // namespace

std::span<const QuestionTemplate> question_templates()
{ return kTemplates; }

std::vector<const QuestionTemplate *> templates_for(TaskTag task, std::optional<OrSubtype> subtype,
                                                    std::size_t arity)
{
  std::vector<const QuestionTemplate *> out;
  for (const auto &t : question_templates())
  {
    if (t.task != task || t.arity != arity)
      continue;
    if (task == TaskTag::OR && t.subtype != subtype)
      continue;
    out.push_back(&t);
  }
  return out;
}

std::string render_question(TaskTag task, std::optional<OrSubtype> subtype,
                            std::span<const std::string> referents, std::mt19937_64 &rng)
{
  if (task == TaskTag::OR && !subtype)
  {
    throw TemplateError("OR questions need a subtype");
  }
  std::set<std::string> unique(referents.begin(), referents.end());
  if (unique.size() != referents.size())
  {
    throw TemplateError("a question may not reference the same entity twice");
  }
  const auto candidates = templates_for(task, subtype, referents.size());
  if (candidates.empty())
  {
    throw TemplateError(
        fmt::format("no {} template takes {} entity placeholder(s)", to_string(task), referents.size()));
  }
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  const QuestionTemplate &tpl = *candidates[pick(rng)];

  std::string out;
  std::string_view rest = tpl.text;
  for (const auto &ref : referents)
  {
    const auto pos = rest.find(kPlaceholder);
    out.append(rest.substr(0, pos));
    out.append(ref);
    rest.remove_prefix(pos + kPlaceholder.size());
  }
  out.append(rest);
  return out;
}

} // namespace tbx
