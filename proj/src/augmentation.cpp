#include "tbx/augmentation.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <fmt/format.h>
#include <httplib.h>

#include "tbx/errors.hpp"

namespace tbx
{

namespace
{

constexpr std::string_view kSystemText =
    "You are a language expert assistant. In this task, we want to expand the following answer to longer "
    "wording but no additional information.";

std::string lowercase(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r\n\"");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n\"");
  return s.substr(b, e - b + 1);
}

const std::string &referent(const AugmentRequest &r, std::size_t i)
{
  static const std::string kUnknown = "the entity";
  return i < r.referents.size() ? r.referents[i] : kUnknown;
}

} // namespace

HttpAugmenter::HttpAugmenter(EndpointConfig config) : config_(std::move(config))
{
  const std::string &url = config_.url;
  const auto scheme = url.find("://");
  if (scheme == std::string::npos || url.substr(0, scheme) != "http")
  {
    throw ConfigError(fmt::format("augmentation endpoint '{}' must be an http:// URL", url));
  }
  const auto rest = url.substr(scheme + 3);
  const auto slash = rest.find('/');
  host_ = url.substr(0, scheme + 3) + rest.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : rest.substr(slash);
  if (rest.empty() || slash == 0)
  {
    throw ConfigError(fmt::format("augmentation endpoint '{}' has no host", url));
  }
}

std::optional<std::string> HttpAugmenter::complete(const std::string &prompt)
{
  httplib::Client client(host_);
  const auto secs = static_cast<time_t>(config_.timeout_s);
  const auto usecs = static_cast<time_t>((config_.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  auto res = client.Post(path_, prompt, "text/plain");
  if (!res || res->status != 200)
  {
    return std::nullopt;
  }
  return res->body;
}

std::string build_augmentation_prompt(const std::string &question, const std::string &answer_short)
{
  return fmt::format("{}. The question is: {} and the short answer is {}. Give the complex answer in a short "
                     "sentence no more than 15 words.",
                     kSystemText, question, answer_short);
}

bool valid_augmentation(const std::string &text, const std::string &answer_short, std::size_t max_words)
{
  std::istringstream in(text);
  std::size_t words = 0;
  for (std::string w; in >> w;)
    ++words;
  if (words == 0 || words > max_words)
    return false;
  return lowercase(text).find(lowercase(answer_short)) != std::string::npos;
}

std::string fallback_answer(const AugmentRequest &r)
{
  const std::string &a = r.answer_short;
  switch (r.task)
  {
  case TaskTag::RD:
    return fmt::format("{} is situated {} away from {}.", referent(r, 0), a, referent(r, 1));
  case TaskTag::SR:
    return fmt::format("{} is positioned at the {} of {}.", referent(r, 0), a, referent(r, 1));
  case TaskTag::OR:
    if (r.or_subtype == OrSubtype::numeric)
      return fmt::format("The facing angle between {} and {} is {}.", referent(r, 0), referent(r, 1), a);
    return fmt::format("{} is oriented {} relative to {}.", referent(r, 0), a, referent(r, 1));
  case TaskTag::EGO_LANE:
    return fmt::format("{} is driving in the {}.", referent(r, 0), a);
  case TaskTag::OBJ_LANE:
    return fmt::format("The lane maneuver of {} is {}.", referent(r, 0), a);
  case TaskTag::OBJ_TURN:
    return fmt::format("The turning maneuver of {} is {}.", referent(r, 0), a);
  case TaskTag::EGO_TURN:
    return fmt::format("Our car's turning maneuver is {}.", a);
  case TaskTag::EGO_TRA:
    return fmt::format("Our car has driven {} in the current scene.", a);
  }
  return a;
}

AugmentResult augment_answer(const AugmentRequest &request, Augmenter *augmenter, int retries)
{
  AugmentResult result;
  if (augmenter != nullptr)
  {
    const std::string prompt = build_augmentation_prompt(request.question, request.answer_short);
    for (int attempt = 0; attempt <= retries; ++attempt)
    {
      std::optional<std::string> reply;
      try
      {
        reply = augmenter->complete(prompt);
      }
      catch (const std::exception &e)
      {
        result.warnings.push_back(fmt::format("augmentation endpoint error: {}", e.what()));
        continue;
      }
      if (!reply)
      {
        result.warnings.emplace_back("augmentation endpoint returned no completion");
        continue;
      }
      const std::string text = trim(*reply);
      if (valid_augmentation(text, request.answer_short))
      {
        result.text = text;
        result.used_fallback = false;
        return result;
      }
      result.warnings.push_back(fmt::format("rejected completion '{}'", text));
    }
  }
  result.text = fallback_answer(request);
  return result;
}

} // namespace tbx
