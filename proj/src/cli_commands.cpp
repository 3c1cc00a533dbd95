#include "tbx/cli_commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "tbx/bbox_render.hpp"
#include "tbx/errors.hpp"
#include "tbx/ingestion.hpp"
#include "tbx/parallel.hpp"
#include "tbx/scenario_io.hpp"

namespace fs = std::filesystem;

namespace tbx
{

int exit_code_for(const std::exception &e)
{
  if (dynamic_cast<const ValidationError *>(&e) || dynamic_cast<const ParseError *>(&e))
    return kExitValidation;
  if (dynamic_cast<const IoError *>(&e))
    return kExitIo;
  if (dynamic_cast<const ConfigError *>(&e))
    return kExitUsage;
  return kExitFailure;
}

nlohmann::json provenance(std::string_view command, const ToolConfig &config)
{
  return {{"tool", "tbx"},
          {"version", kToolVersion},
          {"command", command},
          {"config", to_json(config)},
          {"config_hash", config_hash(config)}};
}

// ---- dataset files ------------------------------------------------------

namespace
{

std::ofstream open_out(const std::string &path)
{
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty())
  {
    std::error_code ec;
    fs::create_directories(parent, ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError(path, "cannot open for writing");
  return out;
}

void write_text(const std::string &path, const std::string &text)
{
  auto out = open_out(path);
  out << text;
  if (!out)
    throw IoError(path, "write failed");
}

template <typename Fn>
void for_each_line(const std::string &path, Fn &&fn)
{
  std::ifstream in(path);
  if (!in)
    throw IoError(path, "cannot open for reading");
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n)
  {
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    nlohmann::json j;
    try
    {
      j = nlohmann::json::parse(line);
    }
    catch (const nlohmann::json::parse_error &)
    {
      throw ParseError(n, fmt::format("{}: invalid JSON", path));
    }
    fn(n, j);
  }
}

} // namespace

void write_dataset_jsonl(const std::string &path, const nlohmann::json &prov, const std::vector<QASample> &samples)
{
  auto out = open_out(path);
  out << nlohmann::json{{"provenance", prov}}.dump() << '\n';
  for (const auto &s : samples)
    out << to_json(s).dump() << '\n';
  if (!out)
    throw IoError(path, "write failed");
}

Dataset read_dataset_jsonl(const std::string &path)
{
  Dataset d;
  for_each_line(path, [&](std::size_t n, const nlohmann::json &j) {
    if (j.is_object() && j.size() == 1 && j.contains("provenance"))
    {
      d.provenance = j["provenance"];
      return;
    }
    try
    {
      d.samples.push_back(sample_from_json(j));
    }
    catch (const InvalidArgument &e)
    {
      throw ParseError(n, fmt::format("{}: {}", path, e.what()));
    }
  });
  return d;
}

std::vector<PredictionRecord> read_predictions_jsonl(const std::string &path)
{
  std::vector<PredictionRecord> out;
  for_each_line(path, [&](std::size_t n, const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("response") ||
        !(j["response"].is_string() || j["response"].is_null()))
    {
      throw ParseError(n, fmt::format("{}: expected {{\"id\": string, \"response\": string}}", path));
    }
    out.push_back({j["id"].get<std::string>(), j["response"].is_null() ? "" : j["response"].get<std::string>()});
  });
  return out;
}

// ---- library entry points ------------------------------------------------

GenerateOutput generate_dataset(const std::vector<SequenceObservation> &sequences, const ToolConfig &config,
                                std::size_t jobs, bool balance)
{
  std::unique_ptr<HttpAugmenter> augmenter;
  if (config.augmentation)
    augmenter = std::make_unique<HttpAugmenter>(*config.augmentation);

  std::vector<GenerationResult> parts(sequences.size());
  parallel_for(sequences.size(), jobs, [&](std::size_t i) {
    parts[i] = generate_for_sequence(sequences[i], config.generation, augmenter.get());
  });

  GenerationResult all;
  for (auto &p : parts)
    all.append(std::move(p));

  GenerateOutput out;
  out.samples = balance ? balance_dataset(all.samples, config.generation.balance) : std::move(all.samples);
  out.warnings = std::move(all.warnings);
  out.stats = compute_stats(out.samples);
  return out;
}

EvaluationOutput evaluate_dataset(const std::vector<QASample> &samples,
                                  const std::vector<PredictionRecord> &predictions, const EvalOptions &options)
{
  EvaluationOutput out;
  std::map<std::string, const PredictionRecord *> by_id;
  for (const auto &p : predictions)
    by_id.emplace(p.sample_id, &p);

  std::set<std::string> known;
  for (const auto &s : samples)
  {
    known.insert(s.id);
    const auto it = by_id.find(s.id);
    if (it == by_id.end())
    {
      out.missing_predictions.push_back(s.id);
      out.verdicts.push_back(score_sample(s, {s.id, ""}, options));
    }
    else
    {
      out.verdicts.push_back(score_sample(s, *it->second, options));
    }
  }
  for (const auto &p : predictions)
  {
    if (!known.count(p.sample_id))
      out.unmatched_predictions.push_back(p.sample_id);
  }
  out.report = aggregate(out.verdicts);
  return out;
}

// ---- subcommands ---------------------------------------------------------

namespace
{

std::vector<std::string> expand_inputs(const std::vector<std::string> &inputs)
{
  std::vector<std::string> files;
  for (const auto &in : inputs)
  {
    std::error_code ec;
    if (fs::is_directory(in, ec))
    {
      std::vector<std::string> found;
      for (const auto &entry : fs::directory_iterator(in))
      {
        if (entry.is_regular_file() && entry.path().extension() == ".json")
          found.push_back(entry.path().string());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    }
    else if (fs::exists(in, ec))
    {
      files.push_back(in);
    }
    else
    {
      throw IoError(in, "no such file or directory");
    }
  }
  return files;
}

std::string sanitize(std::string s)
{
  for (auto &c : s)
  {
    if (c == '/' || c == '\\' || c == ' ' || c == ':')
      c = '_';
  }
  return s;
}

EvalOptions eval_options(const ToolConfig &config, std::unique_ptr<KeywordMatcher> &holder)
{
  EvalOptions o;
  o.distance_tol = config.evaluation.distance_tol;
  o.angle_tol_deg = config.evaluation.angle_tol_deg;
  o.zero_distance_abs_m = config.evaluation.zero_distance_abs_m;
  if (config.evaluation.keyword_table)
  {
    holder = std::make_unique<KeywordMatcher>(load_keyword_table(*config.evaluation.keyword_table));
    o.matcher = holder.get();
  }
  return o;
}

} // namespace

int cmd_generate(const GenerateArgs &args, const ToolConfig &config, std::ostream &out, std::ostream &err)
{
  std::vector<SequenceObservation> sequences;
  for (const auto &path : expand_inputs(args.inputs))
  {
    try
    {
      sequences.push_back(load_interchange(path));
    }
    catch (const ValidationError &e)
    {
      for (const auto &issue : e.issues())
        err << path << ": " << issue.path << ": " << issue.message << '\n';
      throw;
    }
    if (sequences.back().meta.name.empty())
      sequences.back().meta.name = fs::path(path).stem().string();
  }

  auto result = generate_dataset(sequences, config, args.jobs, args.balance);
  const auto prov = provenance("generate", config);
  const fs::path dir(args.out_dir);
  write_dataset_jsonl((dir / "dataset.jsonl").string(), prov, result.samples);
  write_text((dir / "stats.txt").string(), format_stats(result.stats));
  write_text((dir / "stats.json").string(),
             nlohmann::json{{"provenance", prov}, {"stats", to_json(result.stats)}}.dump(2) + "\n");
  if (!result.warnings.empty())
  {
    std::string text;
    for (const auto &w : result.warnings)
      text += w + "\n";
    write_text((dir / "warnings.txt").string(), text);
    err << result.warnings.size() << " warning(s), see " << (dir / "warnings.txt").string() << '\n';
  }
  out << format_stats(result.stats);
  out << fmt::format("{} samples from {} sequence(s) written to {}\n", result.samples.size(), sequences.size(),
                     (dir / "dataset.jsonl").string());
  return kExitOk;
}

int cmd_evaluate(const EvaluateArgs &args, const ToolConfig &config, std::ostream &out, std::ostream &err)
{
  const auto bench = read_dataset_jsonl(args.benchmark);
  const auto preds = read_predictions_jsonl(args.predictions);
  std::unique_ptr<KeywordMatcher> matcher;
  const auto options = eval_options(config, matcher);
  const auto result = evaluate_dataset(bench.samples, preds, options);

  for (const auto &id : result.missing_predictions)
    err << "warning: no prediction for sample " << id << " (scored incorrect)\n";
  for (const auto &id : result.unmatched_predictions)
    err << "warning: prediction " << id << " matches no benchmark sample\n";

  const fs::path dir(args.out_dir);
  auto report = to_json(result.report);
  report["provenance"] = provenance("evaluate", config);
  report["model"] = args.model;
  report["missing_predictions"] = result.missing_predictions;
  report["unmatched_predictions"] = result.unmatched_predictions;
  write_text((dir / "report.json").string(), report.dump(2) + "\n");
  const auto table = format_report_table({{args.model, result.report}});
  write_text((dir / "report.txt").string(), table);
  for (const auto &s : result.report.tasks)
  {
    if (s.confusion)
      write_text((dir / fmt::format("confusion_{}.csv", to_string(s.task))).string(), confusion_csv(*s.confusion));
  }
  out << table;
  return kExitOk;
}

int cmd_render(const RenderArgs &args, const ToolConfig &config, std::ostream &out, std::ostream &err)
{
  const auto seq = load_interchange(args.sequence);
  const auto prov = provenance("render", config);
  const fs::path dir(args.out_dir);
  const fs::path base = fs::path(args.sequence).parent_path();

  auto canvas = [&](const FrameObservation &f) {
    const auto &c = *f.calibration;
    if (f.image_ref)
    {
      for (const auto &candidate : {fs::path(*f.image_ref), base / *f.image_ref})
      {
        std::error_code ec;
        if (fs::is_regular_file(candidate, ec))
        {
          auto img = read_ppm(candidate.string());
          if (img.width() == c.image_width && img.height() == c.image_height)
            return img;
        }
      }
    }
    return Image(c.image_width, c.image_height, {32, 32, 32});
  };

  std::size_t written = 0;
  auto emit = [&](const FrameObservation &f, const std::vector<ColoredEntity> &entities, const std::string &stem,
                  const nlohmann::json &extra) {
    if (!f.calibration)
    {
      err << stem << ": skipped, frame has no calibration\n";
      return;
    }
    auto img = canvas(f);
    const auto report = draw_boxes(img, entities, f.calibration);
    write_ppm(img, (dir / (stem + ".ppm")).string());
    nlohmann::json j{{"provenance", prov}, {"entities", to_json(report)}, {"edges_drawn", report.edges_drawn},
                     {"edges_skipped", report.edges_skipped}};
    j.update(extra);
    write_text((dir / (stem + ".corners.json")).string(), j.dump(2) + "\n");
    ++written;
  };

  std::error_code ec;
  fs::create_directories(dir, ec);

  if (args.samples)
  {
    const auto data = read_dataset_jsonl(*args.samples);
    for (const auto &s : data.samples)
    {
      if (s.source.sequence != seq.meta.name)
        continue;
      for (std::size_t k = 0; k < s.source.frames.size(); ++k)
      {
        const auto idx = s.source.frames[k];
        if (idx >= seq.frames.size())
          throw InvalidArgument(fmt::format("sample {} refers to frame {} beyond the sequence", s.id, idx));
        const auto &f = seq.frames[idx];
        std::vector<ColoredEntity> entities;
        for (const auto &ref : s.entities)
        {
          if (const auto *e = f.find_entity(ref.entity_id))
            entities.push_back({*e, entity_color(ref.index)});
        }
        emit(f, entities, fmt::format("{}_{}", sanitize(s.id), k), {{"sample", s.id}, {"frame", idx}});
      }
    }
  }
  else
  {
    std::vector<std::size_t> frames = args.frames;
    if (frames.empty())
    {
      frames.resize(seq.frames.size());
      for (std::size_t i = 0; i < frames.size(); ++i)
        frames[i] = i;
    }
    for (const auto idx : frames)
    {
      if (idx >= seq.frames.size())
        throw InvalidArgument(fmt::format("frame {} beyond the sequence ({} frames)", idx, seq.frames.size()));
      const auto &f = seq.frames[idx];
      std::vector<const EntityObservation *> ahead;
      for (const auto &e : f.entities)
        if (e.pose.x > 0.0)
          ahead.push_back(&e);
      std::stable_sort(ahead.begin(), ahead.end(), [](const auto *a, const auto *b) {
        return std::hypot(a->pose.x, a->pose.y) < std::hypot(b->pose.x, b->pose.y);
      });
      std::vector<ColoredEntity> entities;
      for (std::size_t k = 0; k < std::min<std::size_t>(2, ahead.size()); ++k)
        entities.push_back({*ahead[k], entity_color(static_cast<int>(k) + 1)});
      emit(f, entities, fmt::format("{:06d}", idx), {{"frame", idx}});
    }
  }
  out << fmt::format("{} annotated frame(s) written to {}\n", written, dir.string());
  return kExitOk;
}

int cmd_validate(const std::vector<std::string> &paths, std::ostream &out, std::ostream &err)
{
  std::size_t total = 0;
  for (const auto &path : paths)
  {
    std::vector<ValidationIssue> issues;
    if (fs::path(path).extension() == ".jsonl")
    {
      try
      {
        const auto data = read_dataset_jsonl(path);
        std::set<std::string> ids;
        for (std::size_t i = 0; i < data.samples.size(); ++i)
        {
          const auto &s = data.samples[i];
          if (!ids.insert(s.id).second)
            issues.push_back({fmt::format("/{}", i), fmt::format("duplicate sample id '{}'", s.id)});
          for (const auto &p : sample_problems(s))
            issues.push_back({fmt::format("/{}", i), p});
        }
      }
      catch (const ParseError &e)
      {
        issues.push_back({"", e.what()});
      }
    }
    else
    {
      std::error_code ec;
      if (!fs::is_regular_file(path, ec))
        throw IoError(path, "no such file");
      issues = validate_interchange(path);
    }
    if (issues.empty())
    {
      out << path << ": OK\n";
      continue;
    }
    total += issues.size();
    for (const auto &i : issues)
      err << path << ": " << (i.path.empty() ? "/" : i.path) << ": " << i.message << '\n';
  }
  if (total > 0)
  {
    out << total << " issue(s)\n";
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_simulate(const SimulateArgs &args, const ToolConfig &config, std::ostream &out, std::ostream &)
{
  std::vector<sim::ScenarioSpec> specs;
  if (args.spec)
  {
    std::ifstream in(*args.spec);
    if (!in)
      throw IoError(*args.spec, "cannot open scenario file");
    nlohmann::json j;
    try
    {
      j = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::parse_error &e)
    {
      throw ConfigError(fmt::format("{}: {}", *args.spec, e.what()));
    }
    specs = sim::scenarios_from_json(j);
  }
  else
  {
    specs = sim::demo_corpus(config.seed, args.corpus_size);
  }
  const auto prov = provenance("simulate", config);
  const fs::path dir(args.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::set<std::string> names;
  for (const auto &spec : specs)
  {
    if (!names.insert(spec.name).second)
      throw ConfigError(fmt::format("duplicate scenario name '{}'", spec.name));
    sim::SimulationResult result;
    try
    {
      result = sim::simulate(spec);
    }
    catch (const InvalidArgument &e)
    {
      throw ConfigError(fmt::format("scenario '{}': {}", spec.name, e.what()));
    }
    const auto path = (dir / (spec.name + ".json")).string();
    save_interchange(result.sequence, path, std::optional<nlohmann::json>(prov));
    out << fmt::format("{}: {} frames\n", path, result.sequence.frames.size());
  }
  return kExitOk;
}

int cmd_stats(const StatsArgs &args, std::ostream &out, std::ostream &)
{
  const auto data = read_dataset_jsonl(args.dataset);
  const auto table = compute_stats(data.samples);
  if (args.json)
    out << to_json(table, args.rounding).dump(2) << '\n';
  else
    out << format_stats(table, args.rounding);
  return kExitOk;
}

} // namespace tbx
