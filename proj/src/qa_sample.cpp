#include "tbx/qa_sample.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "tbx/errors.hpp"

namespace tbx
{

EntityColor entity_color(int index)
{
  switch (index)
  {
  case 1:
    return {1, {0, 255, 255}};
  case 2:
    return {2, {255, 0, 255}};
  default:
    throw InvalidArgument(fmt::format("entity index {} has no color (only 1 and 2)", index));
  }
}

std::string entity_referent(int index) { return fmt::format("Entity #{}", index); }

std::string QASample::category() const
{
  if (const auto *c = std::get_if<ClassTruth>(&ground_truth))
    return c->label;
  return std::string(kNumericCategory);
}

std::string format_numeric_answer(double value, Unit unit)
{
  return fmt::format("{:.2f} {}", value, to_string(unit));
}

std::vector<std::string> sample_problems(const QASample &s)
{
  std::vector<std::string> out;
  if (s.id.empty())
    out.emplace_back("empty id");
  if (s.frame_refs.size() != frames_for(s.task))
  {
    out.push_back(fmt::format("{} expects {} frame(s), got {}", to_string(s.task), frames_for(s.task),
                              s.frame_refs.size()));
  }
  if (s.entities.size() > 2)
    out.emplace_back("more than two referenced entities");
  std::set<std::string> ids;
  for (const auto &e : s.entities)
  {
    if (e.index != 1 && e.index != 2)
    {
      out.push_back(fmt::format("entity index {} not in {{1, 2}}", e.index));
      continue;
    }
    if (e.rgb != entity_color(e.index).rgb)
      out.push_back(fmt::format("entity #{} has the wrong color", e.index));
    if (!ids.insert(e.entity_id).second)
      out.push_back(fmt::format("entity '{}' referenced twice", e.entity_id));
  }

  const auto labels = class_labels(s.task);
  const bool numeric_task = s.task == TaskTag::RD || s.task == TaskTag::EGO_TRA;
  if (const auto *c = std::get_if<ClassTruth>(&s.ground_truth))
  {
    if (numeric_task)
      out.emplace_back("numeric task carries a class answer");
    else if (std::find(labels.begin(), labels.end(), c->label) == labels.end())
      out.push_back(fmt::format("label '{}' not allowed for {}", c->label, to_string(s.task)));
  }
  else
  {
    if (!numeric_task && s.task != TaskTag::OR)
      out.emplace_back("class task carries a numeric answer");
  }
  if (s.task == TaskTag::OR)
  {
    if (!s.or_subtype)
      out.emplace_back("OR sample without subtype");
    else if ((*s.or_subtype == OrSubtype::numeric) != s.is_numeric())
      out.emplace_back("OR subtype does not match the answer kind");
  }
  return out;
}

nlohmann::json to_json(const QASample &s)
{
  nlohmann::json j;
  j["id"] = s.id;
  j["task"] = std::string(to_string(s.task));
  j["frames"] = s.frame_refs;
  j["question"] = s.question;
  j["answer_short"] = s.answer_short;
  j["answer_text"] = s.answer_text;
  if (const auto *n = std::get_if<NumericTruth>(&s.ground_truth))
  {
    j["ground_truth"] = {{"kind", "numeric"}, {"value", n->value}, {"unit", std::string(to_string(n->unit))}};
  }
  else
  {
    j["ground_truth"] = {{"kind", "class"}, {"label", std::get<ClassTruth>(s.ground_truth).label}};
  }
  if (s.or_subtype)
  {
    j["or_subtype"] = *s.or_subtype == OrSubtype::numeric ? "numeric" : "class";
  }
  j["entities"] = nlohmann::json::array();
  for (const auto &e : s.entities)
  {
    j["entities"].push_back(
        {{"ref", entity_referent(e.index)}, {"entity_id", e.entity_id}, {"color", e.rgb}, {"index", e.index}});
  }
  j["source"] = {{"sequence", s.source.sequence}, {"frames", s.source.frames}};
  j["negative"] = s.negative;
  return j;
}

QASample sample_from_json(const nlohmann::json &j)
{
  try
  {
    QASample s;
    s.id = j.at("id").get<std::string>();
    const auto task = parse_task(j.at("task").get<std::string>());
    if (!task)
      throw InvalidArgument(fmt::format("sample '{}': unknown task", s.id));
    s.task = *task;
    s.frame_refs = j.at("frames").get<std::vector<std::string>>();
    s.question = j.at("question").get<std::string>();
    s.answer_short = j.value("answer_short", std::string());
    s.answer_text = j.value("answer_text", std::string());
    const auto &gt = j.at("ground_truth");
    const auto kind = gt.at("kind").get<std::string>();
    if (kind == "numeric")
    {
      const auto unit = parse_unit(gt.at("unit").get<std::string>());
      if (!unit)
        throw InvalidArgument(fmt::format("sample '{}': unknown unit", s.id));
      s.ground_truth = NumericTruth{gt.at("value").get<double>(), *unit};
    }
    else if (kind == "class")
    {
      s.ground_truth = ClassTruth{gt.at("label").get<std::string>()};
    }
    else
    {
      throw InvalidArgument(fmt::format("sample '{}': unknown ground truth kind '{}'", s.id, kind));
    }
    if (j.contains("or_subtype"))
    {
      const auto st = j.at("or_subtype").get<std::string>();
      if (st != "numeric" && st != "class")
        throw InvalidArgument(fmt::format("sample '{}': unknown OR subtype '{}'", s.id, st));
      s.or_subtype = st == "numeric" ? OrSubtype::numeric : OrSubtype::class_label;
    }
    if (j.contains("entities"))
    {
      for (const auto &e : j.at("entities"))
      {
        EntityRef ref;
        ref.index = e.at("index").get<int>();
        ref.entity_id = e.at("entity_id").get<std::string>();
        ref.rgb = e.at("color").get<Rgb>();
        s.entities.push_back(std::move(ref));
      }
    }
    if (j.contains("source"))
    {
      s.source.sequence = j.at("source").value("sequence", std::string());
      s.source.frames = j.at("source").value("frames", std::vector<std::size_t>());
    }
    s.negative = j.value("negative", false);
    return s;
  }
  catch (const nlohmann::json::exception &e)
  {
    throw InvalidArgument(fmt::format("malformed sample record: {}", e.what()));
  }
}

} // namespace tbx
