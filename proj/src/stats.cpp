#include "tbx/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace tbx
{

StatsTable stats_from_counts(const std::map<TaskTag, std::map<std::string, std::size_t>> &counts)
{
  StatsTable t;
  for (const auto &[task, cats] : counts)
    for (const auto &[cat, n] : cats)
      t.total += n;
  for (const auto task : kAllTasks)
  {
    const auto it = counts.find(task);
    if (it == counts.end())
      continue;
    for (const auto &[cat, n] : it->second)
    {
      const double pct = t.total == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(t.total) * 100.0;
      t.rows.push_back({task, cat, n, pct});
    }
  }
  return t;
}

StatsTable compute_stats(const std::vector<QASample> &samples)
{
  std::map<TaskTag, std::map<std::string, std::size_t>> counts;
  for (const auto &s : samples)
    ++counts[s.task][s.category()];
  return stats_from_counts(counts);
}

std::vector<double> StatsTable::printed_percentages(PercentRounding mode) const
{
  std::vector<double> out;
  if (mode == PercentRounding::nearest || total == 0)
  {
    for (const auto &r : rows)
      out.push_back(std::stod(fmt::format("{:.1f}", r.percent)));
    return out;
  }
  // Hare quota in tenths of a percent: floor everything, then hand the
  // remaining tenths to the largest remainders.
  std::vector<long long> tenths;
  std::vector<std::pair<std::size_t, std::size_t>> remainders;
  long long assigned = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    const auto scaled = rows[i].count * 1000;
    const auto base = static_cast<long long>(scaled / total);
    tenths.push_back(base);
    assigned += base;
    remainders.emplace_back(scaled % total, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto &a, const auto &b) { return a.first > b.first; });
  for (long long k = 0; k < 1000 - assigned && k < static_cast<long long>(remainders.size()); ++k)
    ++tenths[remainders[static_cast<std::size_t>(k)].second];
  for (const auto v : tenths)
    out.push_back(static_cast<double>(v) / 10.0);
  return out;
}

std::string format_stats(const StatsTable &table, PercentRounding mode)
{
  const auto pct = table.printed_percentages(mode);
  std::vector<std::array<std::string, 4>> cells{{"Task", "Category", "Count", "Percentage (%)"}};
  for (std::size_t i = 0; i < table.rows.size(); ++i)
  {
    const auto &r = table.rows[i];
    cells.push_back({std::string(column_name(r.task)), r.category, std::to_string(r.count),
                     fmt::format("{:.1f}", pct[i])});
  }
  cells.push_back({"Total", "", std::to_string(table.total),
                   fmt::format("{:.1f}", std::accumulate(pct.begin(), pct.end(), 0.0))});
  std::array<std::size_t, 4> width{};
  for (const auto &row : cells)
    for (std::size_t c = 0; c < 4; ++c)
      width[c] = std::max(width[c], row[c].size());
  std::string out;
  for (const auto &row : cells)
  {
    out += fmt::format("{:<{}} | {:<{}} | {:>{}} | {:>{}}\n", row[0], width[0], row[1], width[1], row[2], width[2],
                       row[3], width[3]);
  }
  return out;
}

nlohmann::json to_json(const StatsTable &table, PercentRounding mode)
{
  const auto pct = table.printed_percentages(mode);
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < table.rows.size(); ++i)
  {
    const auto &r = table.rows[i];
    rows.push_back({{"task", to_string(r.task)},
                    {"category", r.category},
                    {"count", r.count},
                    {"percent", r.percent},
                    {"percent_printed", pct[i]}});
  }
  return {{"total", table.total}, {"rows", rows}};
}

} // namespace tbx
