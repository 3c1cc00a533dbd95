#include "tbx/keywords.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "tbx/errors.hpp"

namespace tbx
{

namespace
{

using Classes = std::map<std::string, std::vector<std::string>>;

const Classes kTurning{
    {"go straight", {"go straight", "goes straight", "going straight", "straight", "straight ahead", "no turn"}},
    {"left turn", {"left turn", "turn left", "turns left", "turning left", "turned left"}},
    {"right turn", {"right turn", "turn right", "turns right", "turning right", "turned right"}},
};

bool is_word_char(char c)
{
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

struct Candidate
{
  std::string keyword;
  std::string label;
};

std::vector<Candidate> sorted_candidates(const Classes &classes)
{
  std::vector<Candidate> out;
  for (const auto &[label, words] : classes)
  {
    for (const auto &w : words)
    {
      auto n = normalize_response(w);
      if (!n.empty())
        out.push_back({std::move(n), label});
    }
  }
  // longest first; ties broken alphabetically so the order is stable
  std::stable_sort(out.begin(), out.end(), [](const Candidate &a, const Candidate &b) {
    if (a.keyword.size() != b.keyword.size())
      return a.keyword.size() > b.keyword.size();
    return a.keyword < b.keyword;
  });
  return out;
}

bool contains_word(const std::string &text, const std::string &keyword)
{
  for (auto pos = text.find(keyword); pos != std::string::npos; pos = text.find(keyword, pos + 1))
  {
    const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
    const auto end = pos + keyword.size();
    const bool right_ok = end == text.size() || !is_word_char(text[end]);
    if (left_ok && right_ok)
      return true;
  }
  return false;
}

template <typename Entries>
std::optional<std::string> first_match(const Entries &entries, const std::string &normalized)
{
  for (const auto &e : entries)
  {
    if (contains_word(normalized, e.keyword))
      return e.label;
  }
  return std::nullopt;
}

std::vector<std::string> string_list(const nlohmann::json &j, const std::string &where)
{
  if (!j.is_array())
    throw ConfigError(fmt::format("keyword table: {} must be an array of strings", where));
  std::vector<std::string> out;
  for (const auto &v : j)
  {
    if (!v.is_string())
      throw ConfigError(fmt::format("keyword table: {} must be an array of strings", where));
    out.push_back(v.get<std::string>());
  }
  return out;
}

} // namespace

std::string normalize_response(std::string_view text)
{
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (const char raw : text)
  {
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
    if (c == '-' || c == '_')
      c = ' ';
    if (std::isspace(static_cast<unsigned char>(c)))
    {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space)
      out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

KeywordTable default_keyword_table()
{
  KeywordTable t;
  t.classes[TaskTag::SR] = {
      {"front", {"front", "ahead", "in front"}},
      {"front left", {"front left", "left front", "ahead left", "ahead and to the left"}},
      {"front right", {"front right", "right front", "ahead right", "ahead and to the right"}},
      {"back", {"back", "behind", "rear"}},
      {"back left", {"back left", "rear left", "left rear", "behind left", "behind and to the left"}},
      {"back right", {"back right", "rear right", "right rear", "behind right", "behind and to the right"}},
  };
  t.classes[TaskTag::OR] = {
      {"similar", {"similar", "similar direction", "same direction", "parallel", "aligned"}},
      {"opposite", {"opposite", "opposite direction", "opposing", "reverse direction", "facing each other"}},
      {"perpendicular", {"perpendicular", "orthogonal", "right angle", "crosswise"}},
  };
  t.classes[TaskTag::EGO_LANE] = {
      {"front lane", {"front lane", "same lane", "ego lane", "our lane", "current lane"}},
      {"front left lane", {"front left lane", "left lane", "lane to the left", "left adjacent lane"}},
      {"front right lane", {"front right lane", "right lane", "lane to the right", "right adjacent lane"}},
      {"oncoming traffic lane",
       {"oncoming traffic lane", "oncoming lane", "oncoming traffic", "oncoming", "opposite lane", "opposing lane",
        "opposite side of the road"}},
  };
  t.classes[TaskTag::OBJ_LANE] = {
      {"left lane change",
       {"left lane change", "lane change to the left", "changes lanes to the left", "changing lanes to the left",
        "changes to the left lane", "moves to the left lane", "merges left"}},
      {"right lane change",
       {"right lane change", "lane change to the right", "changes lanes to the right", "changing lanes to the right",
        "changes to the right lane", "moves to the right lane", "merges right"}},
      {"no change",
       {"no change", "no lane change", "stays in its lane", "stays in the same lane", "keeps its lane",
        "remains in its lane", "does not change lanes"}},
  };
  t.classes[TaskTag::OBJ_TURN] = kTurning;
  t.classes[TaskTag::EGO_TURN] = kTurning;
  t.units[Unit::meters] = {{"meters", "metres", "meter", "metre"}, {"m"}};
  t.units[Unit::degrees] = {{"degrees", "degree"}, {"deg", "°"}};
  return t;
}

nlohmann::json to_json(const KeywordTable &table)
{
  nlohmann::json tasks = nlohmann::json::object();
  for (const auto &[task, classes] : table.classes)
    tasks[std::string(to_string(task))] = classes;
  nlohmann::json units = nlohmann::json::object();
  for (const auto &[unit, words] : table.units)
    units[std::string(to_string(unit))] = {{"words", words.words}, {"abbreviations", words.abbreviations}};
  return {{"version", table.version}, {"tasks", tasks}, {"units", units}};
}

KeywordTable keyword_table_from_json(const nlohmann::json &j)
{
  if (!j.is_object() || !j.contains("tasks") || !j["tasks"].is_object())
    throw ConfigError("keyword table: expected an object with a 'tasks' object");
  KeywordTable t;
  if (j.contains("version"))
  {
    if (!j["version"].is_number_integer())
      throw ConfigError("keyword table: 'version' must be an integer");
    t.version = j["version"].get<int>();
    if (t.version != 1)
      throw ConfigError(fmt::format("keyword table: unsupported version {}", t.version));
  }
  for (const auto &[name, classes] : j["tasks"].items())
  {
    const auto task = parse_task(name);
    if (!task)
      throw ConfigError(fmt::format("keyword table: unknown task '{}'", name));
    if (!classes.is_object())
      throw ConfigError(fmt::format("keyword table: tasks/{} must be an object", name));
    for (const auto &[label, words] : classes.items())
      t.classes[*task][label] = string_list(words, fmt::format("tasks/{}/{}", name, label));
  }
  const auto defaults = default_keyword_table();
  t.units = defaults.units;
  if (j.contains("units"))
  {
    if (!j["units"].is_object())
      throw ConfigError("keyword table: 'units' must be an object");
    for (const auto &[name, spec] : j["units"].items())
    {
      const auto unit = parse_unit(name);
      if (!unit)
        throw ConfigError(fmt::format("keyword table: unknown unit '{}'", name));
      if (!spec.is_object())
        throw ConfigError(fmt::format("keyword table: units/{} must be an object", name));
      UnitWords w;
      if (spec.contains("words"))
        w.words = string_list(spec["words"], fmt::format("units/{}/words", name));
      if (spec.contains("abbreviations"))
        w.abbreviations = string_list(spec["abbreviations"], fmt::format("units/{}/abbreviations", name));
      t.units[*unit] = std::move(w);
    }
  }
  return t;
}

KeywordTable load_keyword_table(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError(path, "cannot open keyword table");
  nlohmann::json j;
  try
  {
    j = nlohmann::json::parse(in);
  }
  catch (const nlohmann::json::parse_error &e)
  {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
  return keyword_table_from_json(j);
}

std::vector<std::string> keyword_table_problems(const KeywordTable &table)
{
  std::vector<std::string> problems;
  for (const auto &[task, classes] : table.classes)
  {
    const auto name = to_string(task);
    const auto allowed = class_labels(task);
    if (allowed.empty())
    {
      problems.push_back(fmt::format("{}: task has no class labels", name));
      continue;
    }
    for (const auto label : allowed)
    {
      const auto it = classes.find(std::string(label));
      if (it == classes.end() || it->second.empty())
        problems.push_back(fmt::format("{}: no keywords for '{}'", name, label));
    }
    std::map<std::string, std::string> owner;
    for (const auto &[label, words] : classes)
    {
      if (std::find(allowed.begin(), allowed.end(), label) == allowed.end())
        problems.push_back(fmt::format("{}: '{}' is not a label of this task", name, label));
      for (const auto &w : words)
      {
        const auto n = normalize_response(w);
        if (n.empty())
        {
          problems.push_back(fmt::format("{}/{}: empty keyword", name, label));
          continue;
        }
        const auto [it, fresh] = owner.emplace(n, label);
        if (!fresh && it->second != label)
          problems.push_back(fmt::format("{}: keyword '{}' belongs to both '{}' and '{}'", name, n, it->second, label));
      }
    }
    // each keyword, read on its own, must resolve to its own class
    const auto entries = sorted_candidates(classes);
    for (const auto &e : entries)
    {
      const auto hit = first_match(entries, e.keyword);
      if (hit && *hit != e.label)
        problems.push_back(
            fmt::format("{}: keyword '{}' of '{}' is shadowed by '{}'", name, e.keyword, e.label, *hit));
    }
  }
  for (const auto &[unit, words] : table.units)
  {
    if (words.words.empty() && words.abbreviations.empty())
      problems.push_back(fmt::format("unit {}: no words", to_string(unit)));
    for (const auto &w : words.words)
      if (w.empty())
        problems.push_back(fmt::format("unit {}: empty word", to_string(unit)));
    for (const auto &w : words.abbreviations)
      if (w.empty())
        problems.push_back(fmt::format("unit {}: empty abbreviation", to_string(unit)));
  }
  return problems;
}

KeywordMatcher::KeywordMatcher(KeywordTable table) : table_(std::move(table))
{
  const auto problems = keyword_table_problems(table_);
  if (!problems.empty())
  {
    std::string msg = "invalid keyword table:";
    for (const auto &p : problems)
      msg += "\n  " + p;
    throw ConfigError(msg);
  }
  for (const auto &[task, classes] : table_.classes)
  {
    for (auto &c : sorted_candidates(classes))
      sorted_[task].push_back({std::move(c.keyword), std::move(c.label)});
  }
}

std::optional<std::string> KeywordMatcher::match(std::string_view response, TaskTag task) const
{
  const auto it = sorted_.find(task);
  if (it == sorted_.end())
    return std::nullopt;
  return first_match(it->second, normalize_response(response));
}

const KeywordMatcher &default_matcher()
{
  static const KeywordMatcher m(default_keyword_table());
  return m;
}

} // namespace tbx
