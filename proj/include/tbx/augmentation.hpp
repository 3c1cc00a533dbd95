#pragma once

// Expanding short answers into one natural sentence.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tbx/qa_sample.hpp"

namespace tbx
{

/// Source of completions for an augmentation prompt.
class Augmenter
{
public:
  virtual ~Augmenter() = default;
  /// nullopt (or an exception) signals an endpoint failure.
  virtual std::optional<std::string> complete(const std::string &prompt) = 0;
};

struct EndpointConfig
{
  /// e.g. "http://127.0.0.1:8080/complete"
  std::string url;
  double timeout_s = 10.0;
};

/// POSTs the prompt as text/plain and reads a plain-text completion.
class HttpAugmenter : public Augmenter
{
public:
  /// Throws ConfigError when the URL cannot be parsed.
  explicit HttpAugmenter(EndpointConfig config);
  std::optional<std::string> complete(const std::string &prompt) override;

private:
  EndpointConfig config_;
  std::string host_;
  std::string path_;
};

/// The augmentation prompt with question and answer substituted.
std::string build_augmentation_prompt(const std::string &question, const std::string &answer_short);

/// Accepts a completion when it has at most `max_words` words and contains
/// the short answer (case-insensitive).
bool valid_augmentation(const std::string &text, const std::string &answer_short, std::size_t max_words = 15);

struct AugmentRequest
{
  TaskTag task = TaskTag::RD;
  std::optional<OrSubtype> or_subtype;
  std::string question;
  std::string answer_short;
  /// Referents in question order (target first for SR / OR).
  std::vector<std::string> referents;
};

/// Fixed carrier sentence per task that embeds the short answer verbatim.
std::string fallback_answer(const AugmentRequest &request);

struct AugmentResult
{
  std::string text;
  bool used_fallback = true;
  std::vector<std::string> warnings;
};

/// Asks the augmenter (when given), re-asks `retries` times when the
/// completion fails validation or the endpoint fails, then falls back to the
/// carrier sentence.
AugmentResult augment_answer(const AugmentRequest &request, Augmenter *augmenter, int retries = 1);

} // namespace tbx
