#pragma once

// Keyword tables for rule-based class matching of free-text responses.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tbx/tasks.hpp"

namespace tbx
{

struct UnitWords
{
  std::vector<std::string> words;         ///< full unit words, preferred
  std::vector<std::string> abbreviations; ///< "m", "deg", "°"
};

struct KeywordTable
{
  int version = 1;
  /// task -> class label -> keywords. OR holds its class-subtype labels.
  std::map<TaskTag, std::map<std::string, std::vector<std::string>>> classes;
  std::map<Unit, UnitWords> units;
};

KeywordTable default_keyword_table();

/// {"version", "tasks": {"SR": {"front": [...]}}, "units": {"meters": {"words", "abbreviations"}}}
nlohmann::json to_json(const KeywordTable &table);
/// Throws ConfigError on a malformed document.
KeywordTable keyword_table_from_json(const nlohmann::json &j);
/// Throws IoError / ConfigError.
KeywordTable load_keyword_table(const std::string &path);

/// Lowercases and turns '-' and '_' into spaces, collapsing runs of blanks.
std::string normalize_response(std::string_view text);

/// Empty or duplicated keywords, labels outside the task's label set, missing
/// labels, and keywords that longest-first matching would assign to another class.
std::vector<std::string> keyword_table_problems(const KeywordTable &table);

/// Longest-first keyword matcher over a validated table.
class KeywordMatcher
{
public:
  /// Throws ConfigError listing keyword_table_problems.
  explicit KeywordMatcher(KeywordTable table);

  /// Label whose keyword is the longest one found (on word boundaries), or nullopt.
  std::optional<std::string> match(std::string_view response, TaskTag task) const;

  const KeywordTable &table() const noexcept { return table_; }

private:
  struct Entry
  {
    std::string keyword;
    std::string label;
  };

  KeywordTable table_;
  std::map<TaskTag, std::vector<Entry>> sorted_;
};

/// Matcher over the default table.
const KeywordMatcher &default_matcher();

} // namespace tbx
