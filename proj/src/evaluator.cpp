#include "tbx/evaluator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "tbx/errors.hpp"
#include "tbx/scene_model.hpp"

namespace tbx
{

namespace
{

constexpr double kEps = 1e-9;

constexpr std::array<std::pair<VerdictReason, std::string_view>, 5> kReasonNames{{
    {VerdictReason::keyword_match, "keyword_match"},
    {VerdictReason::within_tolerance, "within_tolerance"},
    {VerdictReason::out_of_tolerance, "out_of_tolerance"},
    {VerdictReason::no_parse, "no_parse"},
    {VerdictReason::wrong_class, "wrong_class"},
}};

bool is_alpha(char c)
{
  return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

bool is_digit(char c)
{
  return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

struct NumberToken
{
  double value;
  std::size_t end;
};

std::vector<NumberToken> scan_numbers(const std::string &text)
{
  std::vector<NumberToken> out;
  std::size_t i = 0;
  while (i < text.size())
  {
    if (!is_digit(text[i]))
    {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && is_digit(text[i]))
      ++i;
    if (i + 1 < text.size() && text[i] == '.' && is_digit(text[i + 1]))
    {
      ++i;
      while (i < text.size() && is_digit(text[i]))
        ++i;
    }
    bool negative = false;
    if (start > 0 && text[start - 1] == '-' && (start == 1 || !std::isalnum(static_cast<unsigned char>(text[start - 2]))))
    {
      negative = true;
    }
    const std::size_t lead = negative ? start - 1 : start;
    const char before = lead > 0 ? text[lead - 1] : ' ';
    // "#1" and "abc1" are references and identifiers, not values
    if (before == '#' || is_alpha(before) || before == '.')
      continue;
    const double v = std::stod(text.substr(start, i - start));
    out.push_back({negative ? -v : v, i});
  }
  return out;
}

bool unit_follows(const std::string &text, std::size_t pos, const std::vector<std::string> &words)
{
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '-' || text[pos] == '\t'))
    ++pos;
  for (const auto &w : words)
  {
    if (w.empty() || text.compare(pos, w.size(), w) != 0)
      continue;
    const auto end = pos + w.size();
    if (!is_alpha(w.back()) || end == text.size() || !is_alpha(text[end]))
      return true;
  }
  return false;
}

std::string lowercase(std::string_view s)
{
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

double quantile(std::vector<double> sorted, double q)
{
  if (sorted.empty())
    return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

constexpr std::array<double, 4> kQuantiles{0.25, 0.5, 0.75, 0.9};

std::span<const std::string_view> labels_for(const QASample &s)
{
  return class_labels(s.task);
}

} // namespace

std::string_view to_string(VerdictReason r)
{
  for (const auto &[k, v] : kReasonNames)
    if (k == r)
      return v;
  return "no_parse";
}

std::optional<VerdictReason> parse_verdict_reason(std::string_view name)
{
  for (const auto &[k, v] : kReasonNames)
    if (v == name)
      return k;
  return std::nullopt;
}

std::optional<double> parse_numeric(std::string_view response, Unit unit, const KeywordTable &table)
{
  const std::string text = lowercase(response);
  const auto numbers = scan_numbers(text);
  if (numbers.empty())
    return std::nullopt;
  const auto it = table.units.find(unit);
  if (it != table.units.end())
  {
    for (const auto *list : {&it->second.words, &it->second.abbreviations})
    {
      for (const auto &n : numbers)
      {
        if (unit_follows(text, n.end, *list))
          return n.value;
      }
    }
  }
  return numbers.front().value;
}

std::optional<double> parse_numeric(std::string_view response, Unit unit)
{
  return parse_numeric(response, unit, default_matcher().table());
}

std::optional<std::string> match_class(std::string_view response, TaskTag task, const KeywordMatcher &matcher)
{
  return matcher.match(response, task);
}

Verdict score_sample(const QASample &sample, const PredictionRecord &prediction, const EvalOptions &options)
{
  if (sample.id != prediction.sample_id)
  {
    throw InvalidArgument(
        fmt::format("prediction '{}' scored against sample '{}'", prediction.sample_id, sample.id));
  }
  const KeywordMatcher &matcher = options.matcher != nullptr ? *options.matcher : default_matcher();
  Verdict v;
  v.sample_id = sample.id;
  v.task = sample.task;
  v.ground_truth = sample.ground_truth;

  if (const auto *num = std::get_if<NumericTruth>(&sample.ground_truth))
  {
    const auto pred = parse_numeric(prediction.response_text, num->unit, matcher.table());
    if (!pred)
    {
      v.reason = VerdictReason::no_parse;
      return v;
    }
    v.parsed = *pred;
    bool ok = false;
    if (num->unit == Unit::degrees)
    {
      ok = std::abs(normalize_degrees(*pred - num->value)) <= options.angle_tol_deg + kEps;
    }
    else if (num->value == 0.0)
    {
      ok = std::abs(*pred) <= options.zero_distance_abs_m + kEps;
    }
    else
    {
      ok = std::abs(*pred - num->value) / std::abs(num->value) <= options.distance_tol + kEps;
    }
    v.correct = ok;
    v.reason = ok ? VerdictReason::within_tolerance : VerdictReason::out_of_tolerance;
    return v;
  }

  const auto &truth = std::get<ClassTruth>(sample.ground_truth);
  const auto label = matcher.match(prediction.response_text, sample.task);
  if (!label)
  {
    v.reason = VerdictReason::no_parse;
    return v;
  }
  v.parsed = *label;
  v.correct = *label == truth.label;
  v.reason = v.correct ? VerdictReason::keyword_match : VerdictReason::wrong_class;
  return v;
}

std::vector<std::vector<double>> ConfusionMatrix::row_normalized() const
{
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < counts.size(); ++r)
  {
    const auto total = row_total(r);
    std::vector<double> row;
    for (const auto c : counts[r])
      row.push_back(total == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(total));
    out.push_back(std::move(row));
  }
  return out;
}

std::size_t ConfusionMatrix::row_total(std::size_t row) const
{
  std::size_t total = 0;
  for (const auto c : counts.at(row))
    total += c;
  return total;
}

double TaskSummary::accuracy() const
{
  return n == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(n);
}

const TaskSummary *TaskReport::find(TaskTag t) const
{
  for (const auto &s : tasks)
    if (s.task == t)
      return &s;
  return nullptr;
}

double TaskReport::average() const
{
  if (tasks.empty())
    return 0.0;
  double sum = 0.0;
  for (const auto &s : tasks)
    sum += s.accuracy();
  return sum / static_cast<double>(tasks.size());
}

double round_1dp(double value)
{
  return std::floor(value * 10.0 + 0.5 + kEps) / 10.0;
}

TaskReport aggregate(const std::vector<Verdict> &verdicts)
{
  if (verdicts.empty())
    throw EmptyReport("no verdicts to aggregate");

  std::map<TaskTag, TaskSummary> by_task;
  std::map<TaskTag, std::vector<double>> errors;
  for (const auto &v : verdicts)
  {
    auto &s = by_task[v.task];
    s.task = v.task;
    ++s.n;
    if (v.correct)
      ++s.correct;
    ++s.reasons[v.reason];

    if (const auto *ct = std::get_if<ClassTruth>(&v.ground_truth))
    {
      if (!s.confusion)
      {
        ConfusionMatrix m;
        for (const auto l : class_labels(v.task))
          m.labels.emplace_back(l);
        m.counts.assign(m.labels.size(), std::vector<std::size_t>(m.labels.size() + 1, 0));
        s.confusion = std::move(m);
      }
      auto &m = *s.confusion;
      const auto row = std::find(m.labels.begin(), m.labels.end(), ct->label);
      if (row == m.labels.end())
        throw InvalidArgument(fmt::format("{}: label '{}' is not a {} class", v.sample_id, ct->label, to_string(v.task)));
      std::size_t col = m.labels.size();
      if (const auto *p = std::get_if<std::string>(&v.parsed))
      {
        const auto hit = std::find(m.labels.begin(), m.labels.end(), *p);
        if (hit != m.labels.end())
          col = static_cast<std::size_t>(hit - m.labels.begin());
      }
      ++m.counts[static_cast<std::size_t>(row - m.labels.begin())][col];
    }
    else
    {
      const auto &nt = std::get<NumericTruth>(v.ground_truth);
      if (!s.numeric)
        s.numeric = NumericErrorStats{};
      if (const auto *p = std::get_if<double>(&v.parsed))
      {
        ++s.numeric->parsed;
        const double err =
            nt.unit == Unit::degrees ? std::abs(normalize_degrees(*p - nt.value)) : std::abs(*p - nt.value);
        errors[v.task].push_back(err);
      }
      else
      {
        ++s.numeric->unparsed;
      }
    }
  }

  TaskReport report;
  for (const auto t : kAllTasks)
  {
    auto it = by_task.find(t);
    if (it == by_task.end())
      continue;
    auto &s = it->second;
    if (s.numeric)
    {
      auto errs = errors[t];
      std::sort(errs.begin(), errs.end());
      if (!errs.empty())
        for (const auto q : kQuantiles)
          s.numeric->abs_error_quantiles[q] = quantile(errs, q);
    }
    report.tasks.push_back(std::move(s));
  }
  return report;
}

nlohmann::json to_json(const TaskReport &report)
{
  auto tasks = nlohmann::json::array();
  for (const auto &s : report.tasks)
  {
    nlohmann::json j{{"task", to_string(s.task)},
                     {"n", s.n},
                     {"correct", s.correct},
                     {"accuracy", round_1dp(s.accuracy())}};
    nlohmann::json reasons = nlohmann::json::object();
    for (const auto &[r, c] : s.reasons)
      reasons[std::string(to_string(r))] = c;
    j["reasons"] = reasons;
    if (s.confusion)
    {
      auto columns = s.confusion->labels;
      columns.emplace_back("unparsed");
      j["confusion"] = {{"labels", s.confusion->labels},
                        {"columns", columns},
                        {"counts", s.confusion->counts},
                        {"row_normalized", s.confusion->row_normalized()}};
    }
    if (s.numeric)
    {
      nlohmann::json q = nlohmann::json::object();
      for (const auto &[k, v] : s.numeric->abs_error_quantiles)
        q[fmt::format("{}", k)] = v;
      j["numeric"] = {{"parsed", s.numeric->parsed}, {"unparsed", s.numeric->unparsed}, {"abs_error_quantiles", q}};
    }
    tasks.push_back(std::move(j));
  }
  return {{"schema", "tbx-report/1"}, {"tasks", tasks}, {"average", round_1dp(report.average())}};
}

TaskReport report_from_json(const nlohmann::json &j)
{
  TaskReport report;
  try
  {
    for (const auto &t : j.at("tasks"))
    {
      TaskSummary s;
      const auto tag = parse_task(t.at("task").get<std::string>());
      if (!tag)
        throw InvalidArgument(fmt::format("unknown task '{}'", t.at("task").get<std::string>()));
      s.task = *tag;
      s.n = t.at("n").get<std::size_t>();
      s.correct = t.at("correct").get<std::size_t>();
      for (const auto &[name, count] : t.at("reasons").items())
      {
        const auto r = parse_verdict_reason(name);
        if (!r)
          throw InvalidArgument(fmt::format("unknown verdict reason '{}'", name));
        s.reasons[*r] = count.get<std::size_t>();
      }
      if (t.contains("confusion"))
      {
        ConfusionMatrix m;
        m.labels = t["confusion"].at("labels").get<std::vector<std::string>>();
        m.counts = t["confusion"].at("counts").get<std::vector<std::vector<std::size_t>>>();
        s.confusion = std::move(m);
      }
      if (t.contains("numeric"))
      {
        NumericErrorStats n;
        n.parsed = t["numeric"].at("parsed").get<std::size_t>();
        n.unparsed = t["numeric"].at("unparsed").get<std::size_t>();
        for (const auto &[k, v] : t["numeric"].at("abs_error_quantiles").items())
          n.abs_error_quantiles[std::stod(k)] = v.get<double>();
        s.numeric = std::move(n);
      }
      report.tasks.push_back(std::move(s));
    }
  }
  catch (const nlohmann::json::exception &e)
  {
    throw InvalidArgument(fmt::format("malformed report: {}", e.what()));
  }
  return report;
}

std::string format_report_table(const std::vector<std::pair<std::string, TaskReport>> &rows)
{
  std::vector<std::string> header{"Model"};
  for (const auto t : kAllTasks)
    header.emplace_back(column_name(t));
  header.emplace_back("Avg.");

  std::vector<std::vector<std::string>> cells{header};
  for (const auto &[model, report] : rows)
  {
    std::vector<std::string> row{model};
    for (const auto t : kAllTasks)
    {
      const auto *s = report.find(t);
      row.push_back(s ? fmt::format("{:.1f}", round_1dp(s->accuracy())) : std::string("-"));
    }
    row.push_back(report.tasks.empty() ? std::string("-") : fmt::format("{:.1f}", round_1dp(report.average())));
    cells.push_back(std::move(row));
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto &r : cells)
    for (std::size_t c = 0; c < r.size(); ++c)
      width[c] = std::max(width[c], r[c].size());

  std::string out;
  for (const auto &r : cells)
  {
    for (std::size_t c = 0; c < r.size(); ++c)
    {
      if (c > 0)
        out += " | ";
      out += c == 0 ? fmt::format("{:<{}}", r[c], width[c]) : fmt::format("{:>{}}", r[c], width[c]);
    }
    out += '\n';
  }
  return out;
}

std::string confusion_csv(const ConfusionMatrix &m)
{
  auto quote = [](const std::string &s) { return s.find(',') == std::string::npos ? s : "\"" + s + "\""; };
  std::string out = "truth\\predicted";
  for (const auto &l : m.labels)
    out += "," + quote(l);
  out += ",unparsed\n";
  for (std::size_t r = 0; r < m.labels.size(); ++r)
  {
    out += quote(m.labels[r]);
    for (const auto c : m.counts[r])
      out += fmt::format(",{}", c);
    out += '\n';
  }
  return out;
}

std::string build_option_prompt(const QASample &sample)
{
  if (const auto *n = std::get_if<NumericTruth>(&sample.ground_truth))
    return fmt::format("Answer in xx.x {} format.", to_string(n->unit));
  const auto labels = labels_for(sample);
  std::string out = "Options:";
  for (std::size_t i = 0; i < labels.size(); ++i)
  {
    out += fmt::format("\n{}. {}", static_cast<char>('A' + i), labels[i]);
    if (i + 1 < labels.size())
      out += ',';
  }
  return out;
}

std::string zero_shot_prompt(const QASample &sample)
{
  return sample.question + "\n" + build_option_prompt(sample);
}

} // namespace tbx
