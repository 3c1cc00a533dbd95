#pragma once

// Subcommand implementations behind the `tbx` binary. Each returns a process
// exit code and writes human-readable output to the given streams.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tbx/config.hpp"
#include "tbx/evaluator.hpp"
#include "tbx/qa_sample.hpp"
#include "tbx/stats.hpp"

namespace tbx
{

enum ExitCode : int
{
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2, ///< bad flags or configuration
  kExitValidation = 3,
  kExitIo = 4
};

/// Maps an exception to its exit code.
int exit_code_for(const std::exception &e);

inline constexpr std::string_view kToolVersion = "1.0.0";

/// {"tool", "version", "command", "config", "config_hash"}
nlohmann::json provenance(std::string_view command, const ToolConfig &config);

// ---- dataset files ------------------------------------------------------

/// First line {"provenance": ...}, then one sample per line.
void write_dataset_jsonl(const std::string &path, const nlohmann::json &provenance,
                         const std::vector<QASample> &samples);

struct Dataset
{
  nlohmann::json provenance; ///< null when the file has no provenance line
  std::vector<QASample> samples;
};

/// Throws IoError, or ParseError with the 1-based line number.
Dataset read_dataset_jsonl(const std::string &path);

/// Lines {"id", "response"}. Throws IoError / ParseError.
std::vector<PredictionRecord> read_predictions_jsonl(const std::string &path);

// ---- library entry points ------------------------------------------------

struct GenerateOutput
{
  std::vector<QASample> samples;
  StatsTable stats;
  std::vector<std::string> warnings;
};

/// Generates every sequence (in parallel across `jobs` workers), concatenates
/// in input order and optionally balances. Output is independent of `jobs`.
GenerateOutput generate_dataset(const std::vector<SequenceObservation> &sequences, const ToolConfig &config,
                                std::size_t jobs = 1, bool balance = true);

struct EvaluationOutput
{
  TaskReport report;
  std::vector<Verdict> verdicts;
  std::vector<std::string> missing_predictions;   ///< sample ids without a prediction
  std::vector<std::string> unmatched_predictions; ///< prediction ids not in the benchmark
};

/// Missing predictions are scored as empty responses (incorrect).
EvaluationOutput evaluate_dataset(const std::vector<QASample> &samples,
                                  const std::vector<PredictionRecord> &predictions, const EvalOptions &options);

// ---- subcommands ---------------------------------------------------------

struct GenerateArgs
{
  std::vector<std::string> inputs; ///< interchange files or directories of them
  std::string out_dir;
  std::size_t jobs = 1;
  bool balance = true;
};
int cmd_generate(const GenerateArgs &args, const ToolConfig &config, std::ostream &out, std::ostream &err);

struct EvaluateArgs
{
  std::string benchmark;
  std::string predictions;
  std::string out_dir;
  std::string model = "model";
};
int cmd_evaluate(const EvaluateArgs &args, const ToolConfig &config, std::ostream &out, std::ostream &err);

struct RenderArgs
{
  std::string sequence;
  std::string out_dir;
  std::optional<std::string> samples; ///< dataset JSONL; without it the two nearest entities per frame
  std::vector<std::size_t> frames;    ///< empty: every frame
};
int cmd_render(const RenderArgs &args, const ToolConfig &config, std::ostream &out, std::ostream &err);

int cmd_validate(const std::vector<std::string> &paths, std::ostream &out, std::ostream &err);

struct SimulateArgs
{
  std::optional<std::string> spec; ///< scenario file; the demo corpus when absent
  std::size_t corpus_size = 8;
  std::string out_dir;
};
int cmd_simulate(const SimulateArgs &args, const ToolConfig &config, std::ostream &out, std::ostream &err);

struct StatsArgs
{
  std::string dataset;
  PercentRounding rounding = PercentRounding::largest_remainder;
  bool json = false;
};
int cmd_stats(const StatsArgs &args, std::ostream &out, std::ostream &err);

} // namespace tbx
