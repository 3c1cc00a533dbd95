#include "tbx/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>

#include <fmt/format.h>

#include "tbx/errors.hpp"
#include "tbx/hashing.hpp"

namespace tbx
{

namespace
{

using json = nlohmann::json;

void check_keys(const json &obj, std::initializer_list<std::string_view> allowed, const std::string &where)
{
  if (!obj.is_object())
    throw ConfigError(fmt::format("config: {} must be an object", where.empty() ? "document" : where));
  for (const auto &[key, value] : obj.items())
  {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(fmt::format("config: unknown key '{}{}'", where.empty() ? "" : where + ".", key));
  }
}

// Parsed documents hold non-negative integers as unsigned, built ones as signed.
bool is_count(const json &v)
{
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::string key_name(const std::string &where, const char *key)
{
  return where.empty() ? std::string(key) : where + "." + key;
}

void read(const json &obj, const char *key, double &out, const std::string &where)
{
  if (!obj.contains(key))
    return;
  if (!obj[key].is_number())
    throw ConfigError(fmt::format("config: '{}' must be a number", key_name(where, key)));
  out = obj[key].get<double>();
}

void read(const json &obj, const char *key, std::size_t &out, const std::string &where)
{
  if (!obj.contains(key))
    return;
  if (!is_count(obj[key]))
    throw ConfigError(fmt::format("config: '{}' must be a non-negative integer", key_name(where, key)));
  out = obj[key].get<std::size_t>();
}

void read(const json &obj, const char *key, int &out, const std::string &where)
{
  if (!obj.contains(key))
    return;
  if (!obj[key].is_number_integer())
    throw ConfigError(fmt::format("config: '{}' must be an integer", key_name(where, key)));
  out = obj[key].get<int>();
}

void read(const json &obj, const char *key, bool &out, const std::string &where)
{
  if (!obj.contains(key))
    return;
  if (!obj[key].is_boolean())
    throw ConfigError(fmt::format("config: '{}' must be a boolean", key_name(where, key)));
  out = obj[key].get<bool>();
}

TaskTag task_key(const std::string &name, const std::string &where)
{
  const auto t = parse_task(name);
  if (!t)
    throw ConfigError(fmt::format("config: unknown task '{}' in {}", name, where));
  return *t;
}

json task_map_json(const std::map<TaskTag, std::size_t> &m)
{
  json out = json::object();
  for (const auto &[t, v] : m)
    out[std::string(to_string(t))] = v;
  return out;
}

} // namespace

nlohmann::json to_json(const ToolConfig &c)
{
  const auto &g = c.generation;
  json tasks = json::array();
  for (const auto t : kAllTasks)
    if (g.tasks.count(t))
      tasks.push_back(to_string(t));
  json classes = json::array();
  for (const auto cls : g.lane_task_classes)
    classes.push_back(to_string(cls));

  json category_caps = json::object();
  for (const auto &[t, caps] : g.balance.category_caps)
    category_caps[std::string(to_string(t))] = caps;
  json ratios = json::object();
  for (const auto &[t, r] : g.balance.negative_ratio)
    ratios[std::string(to_string(t))] = r;

  json augmentation = nullptr;
  if (c.augmentation)
    augmentation = {{"endpoint", c.augmentation->url}, {"timeout_s", c.augmentation->timeout_s}};

  return {
      {"seed", c.seed},
      {"generation",
       {{"tasks", tasks},
        {"max_range_m", g.max_range_m},
        {"frustum_margin_px", g.frustum_margin_px},
        {"lane_task_classes", classes},
        {"include_ego_pairs", g.include_ego_pairs},
        {"max_pairs_per_frame", g.max_pairs_per_frame},
        {"frame_stride", g.frame_stride},
        {"or_numeric_ratio", g.or_numeric_ratio},
        {"clip", {{"frame_count", g.clip.frame_count}, {"dt", g.clip.dt}, {"tolerance", g.clip.tolerance}}},
        {"turn_threshold_deg", g.turn_threshold_deg},
        {"lane",
         {{"oncoming_threshold_deg", g.lane.oncoming_threshold_deg}, {"front_chain_depth", g.lane.front_chain_depth}}},
        {"max_entities_per_clip", g.max_entities_per_clip},
        {"augmentation_retries", g.augmentation_retries}}},
      {"balance",
       {{"task_caps", task_map_json(g.balance.task_caps)},
        {"category_caps", category_caps},
        {"negative_ratio", ratios}}},
      {"evaluation",
       {{"distance_tol", c.evaluation.distance_tol},
        {"angle_tol_deg", c.evaluation.angle_tol_deg},
        {"zero_distance_abs_m", c.evaluation.zero_distance_abs_m},
        {"keyword_table", c.evaluation.keyword_table ? json(*c.evaluation.keyword_table) : json(nullptr)}}},
      {"augmentation", augmentation},
  };
}

ToolConfig apply_config_json(ToolConfig c, const nlohmann::json &j)
{
  check_keys(j, {"seed", "generation", "balance", "evaluation", "augmentation"}, "");
  if (j.contains("seed"))
  {
    if (!is_count(j["seed"]))
      throw ConfigError("config: 'seed' must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }

  if (j.contains("generation"))
  {
    const auto &g = j["generation"];
    const std::string w = "generation";
    check_keys(g,
               {"tasks", "max_range_m", "frustum_margin_px", "lane_task_classes", "include_ego_pairs",
                "max_pairs_per_frame", "frame_stride", "or_numeric_ratio", "clip", "turn_threshold_deg", "lane",
                "max_entities_per_clip", "augmentation_retries"},
               w);
    auto &gc = c.generation;
    if (g.contains("tasks"))
    {
      if (!g["tasks"].is_array())
        throw ConfigError("config: 'generation.tasks' must be an array");
      gc.tasks.clear();
      for (const auto &t : g["tasks"])
      {
        if (!t.is_string())
          throw ConfigError("config: 'generation.tasks' entries must be strings");
        gc.tasks.insert(task_key(t.get<std::string>(), "generation.tasks"));
      }
    }
    if (g.contains("lane_task_classes"))
    {
      if (!g["lane_task_classes"].is_array())
        throw ConfigError("config: 'generation.lane_task_classes' must be an array");
      gc.lane_task_classes.clear();
      for (const auto &t : g["lane_task_classes"])
      {
        try
        {
          gc.lane_task_classes.insert(parse_entity_class(t.is_string() ? t.get<std::string>() : std::string()));
        }
        catch (const InvalidArgument &e)
        {
          throw ConfigError(fmt::format("config: generation.lane_task_classes: {}", e.what()));
        }
      }
    }
    read(g, "max_range_m", gc.max_range_m, w);
    read(g, "frustum_margin_px", gc.frustum_margin_px, w);
    read(g, "include_ego_pairs", gc.include_ego_pairs, w);
    read(g, "max_pairs_per_frame", gc.max_pairs_per_frame, w);
    read(g, "frame_stride", gc.frame_stride, w);
    read(g, "or_numeric_ratio", gc.or_numeric_ratio, w);
    read(g, "turn_threshold_deg", gc.turn_threshold_deg, w);
    read(g, "max_entities_per_clip", gc.max_entities_per_clip, w);
    read(g, "augmentation_retries", gc.augmentation_retries, w);
    if (g.contains("clip"))
    {
      check_keys(g["clip"], {"frame_count", "dt", "tolerance"}, "generation.clip");
      read(g["clip"], "frame_count", gc.clip.frame_count, "generation.clip");
      read(g["clip"], "dt", gc.clip.dt, "generation.clip");
      read(g["clip"], "tolerance", gc.clip.tolerance, "generation.clip");
    }
    if (g.contains("lane"))
    {
      check_keys(g["lane"], {"oncoming_threshold_deg", "front_chain_depth"}, "generation.lane");
      read(g["lane"], "oncoming_threshold_deg", gc.lane.oncoming_threshold_deg, "generation.lane");
      read(g["lane"], "front_chain_depth", gc.lane.front_chain_depth, "generation.lane");
    }
    if (!(gc.or_numeric_ratio >= 0.0 && gc.or_numeric_ratio <= 1.0))
      throw ConfigError("config: 'generation.or_numeric_ratio' must lie in [0, 1]");
    if (gc.clip.frame_count < 2 || !(gc.clip.dt > 0.0) || !(gc.clip.tolerance >= 0.0))
      throw ConfigError("config: 'generation.clip' needs frame_count >= 2, dt > 0, tolerance >= 0");
    if (!(gc.max_range_m > 0.0))
      throw ConfigError("config: 'generation.max_range_m' must be positive");
  }

  if (j.contains("balance"))
  {
    const auto &b = j["balance"];
    check_keys(b, {"task_caps", "category_caps", "negative_ratio"}, "balance");
    auto &bc = c.generation.balance;
    for (const auto *name : {"task_caps", "category_caps", "negative_ratio"})
    {
      if (b.contains(name) && !b[name].is_object())
        throw ConfigError(fmt::format("config: 'balance.{}' must be an object", name));
    }
    if (b.contains("task_caps"))
    {
      bc.task_caps.clear();
      for (const auto &[t, v] : b["task_caps"].items())
      {
        if (!is_count(v))
          throw ConfigError(fmt::format("config: 'balance.task_caps.{}' must be a non-negative integer", t));
        bc.task_caps[task_key(t, "balance.task_caps")] = v.get<std::size_t>();
      }
    }
    if (b.contains("category_caps"))
    {
      bc.category_caps.clear();
      for (const auto &[t, cats] : b["category_caps"].items())
      {
        const auto task = task_key(t, "balance.category_caps");
        if (!cats.is_object())
          throw ConfigError(fmt::format("config: 'balance.category_caps.{}' must be an object", t));
        for (const auto &[cat, v] : cats.items())
        {
          if (!is_count(v))
            throw ConfigError(
                fmt::format("config: 'balance.category_caps.{}.{}' must be a non-negative integer", t, cat));
          bc.category_caps[task][cat] = v.get<std::size_t>();
        }
      }
    }
    if (b.contains("negative_ratio"))
    {
      bc.negative_ratio.clear();
      for (const auto &[t, v] : b["negative_ratio"].items())
      {
        if (!v.is_number() || v.get<double>() < 0.0)
          throw ConfigError(fmt::format("config: 'balance.negative_ratio.{}' must be a non-negative number", t));
        bc.negative_ratio[task_key(t, "balance.negative_ratio")] = v.get<double>();
      }
    }
  }

  if (j.contains("evaluation"))
  {
    const auto &e = j["evaluation"];
    check_keys(e, {"distance_tol", "angle_tol_deg", "zero_distance_abs_m", "keyword_table"}, "evaluation");
    read(e, "distance_tol", c.evaluation.distance_tol, "evaluation");
    read(e, "angle_tol_deg", c.evaluation.angle_tol_deg, "evaluation");
    read(e, "zero_distance_abs_m", c.evaluation.zero_distance_abs_m, "evaluation");
    if (e.contains("keyword_table"))
    {
      if (e["keyword_table"].is_null())
        c.evaluation.keyword_table.reset();
      else if (e["keyword_table"].is_string())
        c.evaluation.keyword_table = e["keyword_table"].get<std::string>();
      else
        throw ConfigError("config: 'evaluation.keyword_table' must be a path or null");
    }
    if (!(c.evaluation.distance_tol >= 0.0) || !(c.evaluation.angle_tol_deg >= 0.0))
      throw ConfigError("config: evaluation tolerances must be non-negative");
  }

  if (j.contains("augmentation"))
  {
    const auto &a = j["augmentation"];
    if (a.is_null())
    {
      c.augmentation.reset();
    }
    else
    {
      check_keys(a, {"endpoint", "timeout_s"}, "augmentation");
      EndpointConfig ep = c.augmentation.value_or(EndpointConfig{});
      if (a.contains("endpoint"))
      {
        if (!a["endpoint"].is_string())
          throw ConfigError("config: 'augmentation.endpoint' must be a string");
        ep.url = a["endpoint"].get<std::string>();
      }
      read(a, "timeout_s", ep.timeout_s, "augmentation");
      c.augmentation = ep;
    }
  }
  resolve_seed(c);
  return c;
}

ToolConfig load_config_file(const std::string &path, ToolConfig base)
{
  std::ifstream in(path);
  if (!in)
    throw IoError(path, "cannot open config file");
  json j;
  try
  {
    j = json::parse(in);
  }
  catch (const json::parse_error &e)
  {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
  return apply_config_json(std::move(base), j);
}

void resolve_seed(ToolConfig &config)
{
  config.generation.seed = config.seed;
  config.generation.balance.seed = config.seed;
}

std::string config_hash(const ToolConfig &config)
{
  return sha256_hex(to_json(config).dump());
}

} // namespace tbx
