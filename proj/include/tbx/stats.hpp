#pragma once

// Category statistics of a sample set: count and share of the whole set.

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tbx/qa_sample.hpp"

namespace tbx
{

enum class PercentRounding
{
  largest_remainder, ///< printed column sums to exactly 100.0
  nearest            ///< each value rounded on its own
};

struct StatsRow
{
  TaskTag task = TaskTag::RD;
  std::string category;
  std::size_t count = 0;
  double percent = 0.0; ///< exact share of the total, in percent
};

struct StatsTable
{
  std::vector<StatsRow> rows; ///< task column order, then category name
  std::size_t total = 0;

  /// Percentages rounded to one decimal.
  std::vector<double> printed_percentages(PercentRounding mode = PercentRounding::largest_remainder) const;
};

StatsTable compute_stats(const std::vector<QASample> &samples);
/// Same table from raw (task, category) counts.
StatsTable stats_from_counts(const std::map<TaskTag, std::map<std::string, std::size_t>> &counts);

/// "Task | Category | Count | Percentage (%)" aligned text.
std::string format_stats(const StatsTable &table, PercentRounding mode = PercentRounding::largest_remainder);
nlohmann::json to_json(const StatsTable &table, PercentRounding mode = PercentRounding::largest_remainder);

} // namespace tbx
