#pragma once

// Rule-based scoring of free-text responses and report aggregation.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tbx/keywords.hpp"
#include "tbx/qa_sample.hpp"

namespace tbx
{

struct PredictionRecord
{
  std::string sample_id;
  std::string response_text;
};

enum class VerdictReason
{
  keyword_match,
  within_tolerance,
  out_of_tolerance,
  no_parse,
  wrong_class
};

std::string_view to_string(VerdictReason r);
std::optional<VerdictReason> parse_verdict_reason(std::string_view name);

/// monostate when nothing could be parsed.
using ParsedAnswer = std::variant<std::monostate, double, std::string>;

struct Verdict
{
  std::string sample_id;
  TaskTag task = TaskTag::RD;
  GroundTruth ground_truth;
  bool correct = false;
  ParsedAnswer parsed;
  VerdictReason reason = VerdictReason::no_parse;
};

struct EvalOptions
{
  double distance_tol = 0.25; ///< relative, inclusive
  double angle_tol_deg = 15.0; ///< absolute, inclusive
  double zero_distance_abs_m = 0.5; ///< absolute threshold when the true distance is 0
  const KeywordMatcher *matcher = nullptr; ///< nullptr: default table
};

/// Unit-adjacent numbers win (full unit words before abbreviations), then the
/// first standalone number. Numbers written as "#1" are references, not values.
std::optional<double> parse_numeric(std::string_view response, Unit unit, const KeywordTable &table);
std::optional<double> parse_numeric(std::string_view response, Unit unit);

std::optional<std::string> match_class(std::string_view response, TaskTag task,
                                       const KeywordMatcher &matcher = default_matcher());

/// Throws InvalidArgument when the prediction id differs from the sample id.
Verdict score_sample(const QASample &sample, const PredictionRecord &prediction, const EvalOptions &options = {});

struct ConfusionMatrix
{
  std::vector<std::string> labels; ///< rows (ground truth) and the first columns
  /// counts[gt][pred]; the extra last column counts unparsed responses.
  std::vector<std::vector<std::size_t>> counts;

  std::vector<std::vector<double>> row_normalized() const;
  std::size_t row_total(std::size_t row) const;
};

struct NumericErrorStats
{
  std::size_t parsed = 0;
  std::size_t unparsed = 0;
  /// Absolute error quantiles over parsed responses: q -> value.
  std::map<double, double> abs_error_quantiles;
};

struct TaskSummary
{
  TaskTag task = TaskTag::RD;
  std::size_t n = 0;
  std::size_t correct = 0;
  std::map<VerdictReason, std::size_t> reasons;
  std::optional<ConfusionMatrix> confusion; ///< class answers
  std::optional<NumericErrorStats> numeric; ///< numeric answers

  /// correct / n * 100.
  double accuracy() const;
};

struct TaskReport
{
  /// Present tasks in column order.
  std::vector<TaskSummary> tasks;

  const TaskSummary *find(TaskTag t) const;
  /// Unweighted mean of the per-task accuracies.
  double average() const;
};

/// Half-up rounding to one decimal, as printed in reports.
double round_1dp(double value);

/// Throws EmptyReport on empty input.
TaskReport aggregate(const std::vector<Verdict> &verdicts);

/// Lossless: carries counts so accuracies can be recomputed.
nlohmann::json to_json(const TaskReport &report);
TaskReport report_from_json(const nlohmann::json &j);

/// "Model | RD | SR | ... | Avg." header plus one aligned row per report.
std::string format_report_table(const std::vector<std::pair<std::string, TaskReport>> &rows);

/// Header "truth\predicted,<labels>,unparsed", then one row per label.
std::string confusion_csv(const ConfusionMatrix &m);

/// Zero-shot option suffix: lettered class options or the numeric format line.
std::string build_option_prompt(const QASample &sample);
/// Question followed by the option suffix on a new line.
std::string zero_shot_prompt(const QASample &sample);

} // namespace tbx
