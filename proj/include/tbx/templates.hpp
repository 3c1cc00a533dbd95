#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tbx/qa_sample.hpp"

namespace tbx
{

/// One question template. `<entity_n>` placeholders are filled left to right.
/// For SR and OR the first placeholder is the target and the second the
/// reference entity.
struct QuestionTemplate
{
  TaskTag task;
  std::optional<OrSubtype> subtype; ///< OR only
  std::string_view text;
  std::size_t arity;
};

inline constexpr std::string_view kPlaceholder = "<entity_n>";

/// The full template table in a fixed order.
std::span<const QuestionTemplate> question_templates();

/// Templates applicable to the task (and OR subtype) with the given arity.
std::vector<const QuestionTemplate *> templates_for(TaskTag task, std::optional<OrSubtype> subtype,
                                                    std::size_t arity);

/// Picks uniformly among templates_for(task, subtype, referents.size()) and
/// substitutes the referents ("Entity #1", "Entity #2", "Ego-vehicle").
/// Throws TemplateError when no template has that arity or a referent repeats.
std::string render_question(TaskTag task, std::optional<OrSubtype> subtype,
                            std::span<const std::string> referents, std::mt19937_64 &rng);

} // namespace tbx
