#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tbx/tasks.hpp"

namespace tbx
{

using Rgb = std::array<std::uint8_t, 3>;

/// Fixed entity colors: #1 cyan, #2 magenta.
struct EntityColor
{
  int index = 1;
  Rgb rgb{0, 255, 255};
};

/// Throws InvalidArgument for indices other than 1 and 2.
EntityColor entity_color(int index);

/// Placeholder text for referenced entities.
std::string entity_referent(int index);
inline constexpr std::string_view kEgoReferent = "Ego-vehicle";

struct NumericTruth
{
  double value = 0.0;
  Unit unit = Unit::meters;

  bool operator==(const NumericTruth &) const = default;
};

struct ClassTruth
{
  std::string label;

  bool operator==(const ClassTruth &) const = default;
};

using GroundTruth = std::variant<NumericTruth, ClassTruth>;

enum class OrSubtype
{
  class_label,
  numeric
};

struct EntityRef
{
  int index = 1;
  std::string entity_id;
  Rgb rgb{0, 255, 255};

  bool operator==(const EntityRef &) const = default;
};

struct SampleSource
{
  std::string sequence;
  /// Source frame indices, one per frame_ref.
  std::vector<std::size_t> frames;

  bool operator==(const SampleSource &) const = default;
};

struct QASample
{
  std::string id;
  TaskTag task = TaskTag::RD;
  std::vector<std::string> frame_refs;
  std::string question;
  std::string answer_short;
  std::string answer_text;
  GroundTruth ground_truth;
  std::optional<OrSubtype> or_subtype;
  std::vector<EntityRef> entities;
  SampleSource source;
  /// Event task sample whose event did not fire (no change / go straight).
  bool negative = false;

  bool is_numeric() const { return std::holds_alternative<NumericTruth>(ground_truth); }
  /// Class label, or "numerical value" for numeric answers.
  std::string category() const;

  bool operator==(const QASample &) const = default;
};

/// "15.53 meters" style short answer with two decimals.
std::string format_numeric_answer(double value, Unit unit);

/// Invariant violations of a sample, empty when valid.
std::vector<std::string> sample_problems(const QASample &sample);

nlohmann::json to_json(const QASample &sample);
/// Throws InvalidArgument on a malformed record.
QASample sample_from_json(const nlohmann::json &j);

} // namespace tbx
