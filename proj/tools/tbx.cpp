// tbx: dataset generation, evaluation and inspection for traffic-behavior VQA.

#include <iostream>

#include <CLI11.hpp>

#include "tbx/cli_commands.hpp"
#include "tbx/errors.hpp"

namespace
{

struct CommonFlags
{
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> keyword_table;
  std::optional<double> distance_tol;
  std::optional<double> angle_tol;
  std::optional<double> turn_threshold;
  std::optional<double> clip_dt;
  std::optional<std::size_t> clip_frames;
  std::optional<std::string> endpoint;
};

void add_common(CLI::App &app, CommonFlags &f)
{
  app.add_option("--config", f.config_path, "JSON config file layered over the defaults");
  app.add_option("--seed", f.seed, "Random seed for every stochastic choice");
  app.add_option("--keyword-table", f.keyword_table, "Keyword table JSON for class matching");
  app.add_option("--distance-tol", f.distance_tol, "Relative distance tolerance (default 0.25)");
  app.add_option("--angle-tol", f.angle_tol, "Angle tolerance in degrees (default 15)");
  app.add_option("--turn-threshold", f.turn_threshold, "Turn threshold in degrees (default 25)");
  app.add_option("--clip-dt", f.clip_dt, "Clip frame period in seconds (default 0.2)");
  app.add_option("--clip-frames", f.clip_frames, "Frames per clip (default 8)");
  app.add_option("--augment-endpoint", f.endpoint, "http:// endpoint for answer augmentation");
}

tbx::ToolConfig resolve(const CommonFlags &f)
{
  tbx::ToolConfig c;
  if (!f.config_path.empty())
    c = tbx::load_config_file(f.config_path, c);
  if (f.seed)
    c.seed = *f.seed;
  if (f.keyword_table)
    c.evaluation.keyword_table = *f.keyword_table;
  if (f.distance_tol)
    c.evaluation.distance_tol = *f.distance_tol;
  if (f.angle_tol)
    c.evaluation.angle_tol_deg = *f.angle_tol;
  if (f.turn_threshold)
    c.generation.turn_threshold_deg = *f.turn_threshold;
  if (f.clip_dt)
    c.generation.clip.dt = *f.clip_dt;
  if (f.clip_frames)
    c.generation.clip.frame_count = *f.clip_frames;
  if (f.endpoint)
    c.augmentation = tbx::EndpointConfig{*f.endpoint};
  if (!(c.generation.clip.dt > 0.0) || c.generation.clip.frame_count < 2)
    throw tbx::ConfigError("--clip-dt must be positive and --clip-frames at least 2");
  tbx::resolve_seed(c);
  return c;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Traffic-behavior VQA toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  CommonFlags flags;
  add_common(app, flags);
  std::size_t jobs = 1;
  std::string out_dir = "out";
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory");

  tbx::GenerateArgs gen;
  auto *generate = app.add_subcommand("generate", "Generate a QA dataset from interchange sequences");
  generate->add_option("inputs", gen.inputs, "Interchange files or directories")->required();
  generate->add_flag("!--no-balance", gen.balance, "Skip balancing");

  tbx::EvaluateArgs eval;
  auto *evaluate = app.add_subcommand("evaluate", "Score predictions against a benchmark");
  evaluate->add_option("benchmark", eval.benchmark, "Benchmark dataset JSONL")->required();
  evaluate->add_option("predictions", eval.predictions, "Predictions JSONL {id, response}")->required();
  evaluate->add_option("--model", eval.model, "Row label in the report table");

  tbx::RenderArgs rend;
  std::string samples;
  auto *render = app.add_subcommand("render", "Draw entity boxes onto frames");
  render->add_option("sequence", rend.sequence, "Interchange file")->required();
  render->add_option("--samples", samples, "Dataset JSONL; draw each sample's entities");
  render->add_option("--frames", rend.frames, "Frame indices (default: all)")->delimiter(',');

  std::vector<std::string> to_validate;
  auto *validate = app.add_subcommand("validate", "Check interchange files or dataset JSONL");
  validate->add_option("paths", to_validate, "Files to check")->required();

  tbx::SimulateArgs simu;
  std::string spec;
  auto *simulate = app.add_subcommand("simulate", "Write simulated sequences as interchange JSON");
  simulate->add_option("--spec", spec, "Scenario file (default: built-in demo corpus)");
  simulate->add_option("--count", simu.corpus_size, "Demo corpus size");

  tbx::StatsArgs st;
  bool nearest = false;
  auto *stats = app.add_subcommand("stats", "Category statistics of a dataset");
  stats->add_option("dataset", st.dataset, "Dataset JSONL")->required();
  stats->add_flag("--nearest", nearest, "Round each percentage on its own");
  stats->add_flag("--json", st.json, "JSON output");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? tbx::kExitOk : tbx::kExitUsage;
  }

  try
  {
    const auto config = resolve(flags);
    if (generate->parsed())
    {
      gen.out_dir = out_dir;
      gen.jobs = jobs;
      return tbx::cmd_generate(gen, config, std::cout, std::cerr);
    }
    if (evaluate->parsed())
    {
      eval.out_dir = out_dir;
      return tbx::cmd_evaluate(eval, config, std::cout, std::cerr);
    }
    if (render->parsed())
    {
      rend.out_dir = out_dir;
      if (!samples.empty())
        rend.samples = samples;
      return tbx::cmd_render(rend, config, std::cout, std::cerr);
    }
    if (validate->parsed())
      return tbx::cmd_validate(to_validate, std::cout, std::cerr);
    if (simulate->parsed())
    {
      simu.out_dir = out_dir;
      if (!spec.empty())
        simu.spec = spec;
      return tbx::cmd_simulate(simu, config, std::cout, std::cerr);
    }
    if (stats->parsed())
    {
      st.rounding = nearest ? tbx::PercentRounding::nearest : tbx::PercentRounding::largest_remainder;
      return tbx::cmd_stats(st, std::cout, std::cerr);
    }
  }
  catch (const tbx::ValidationError &e)
  {
    for (const auto &i : e.issues())
      std::cerr << "error: " << i.path << ": " << i.message << '\n';
    return tbx::kExitValidation;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return tbx::exit_code_for(e);
  }
  return tbx::kExitFailure;
}
