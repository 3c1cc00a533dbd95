#pragma once

// Source formats into the scene model: KITTI object labels and the
// "tbx-seq/1" interchange JSON.

#include <fstream>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "tbx/scene_model.hpp"

namespace tbx
{

inline constexpr std::string_view kInterchangeSchema = "tbx-seq/1";

// ---- KITTI --------------------------------------------------------------
//
// Camera (rectified, z forward / x right / y down) to ego (x forward / y left /
// z up): ego = (z, -x, -y) with the ego origin at the rectified reference
// camera; yaw = -rotation_y - pi/2. Box locations are bottom centers in both.

struct KittiOptions
{
  int image_width = 1242;
  int image_height = 375;
  double timestamp = 0.0;
  std::optional<std::string> image_ref;
};

/// Throws ParseError (with 1-based line number) on a malformed label or calib
/// line and CalibrationRequired when the calib text lacks P2.
FrameObservation parse_kitti_frame(std::string_view label_text, std::string_view calib_text,
                                   const KittiOptions &options = {});

/// Reads both files; throws IoError for unreadable paths.
FrameObservation load_kitti_frame(const std::string &label_path, const std::string &calib_path,
                                  const KittiOptions &options = {});

/// Inverse of the label parser; 2D boxes and alpha are written as unknown.
std::string write_kitti_labels(const FrameObservation &frame);
/// P0..P3 and R0_rect lines; P2 carries the frame calibration.
std::string write_kitti_calib(const CameraCalibration &calib);

/// Rotation taking ego axes to rectified camera axes.
Eigen::Matrix3d kitti_ego_to_camera_rotation();

// ---- interchange --------------------------------------------------------

nlohmann::json to_json(const FrameObservation &frame);
nlohmann::json to_json(const LaneSegment &lane);
nlohmann::json to_json(const SequenceMeta &meta);

/// Whole document as a JSON value (tests and small files).
nlohmann::json to_json(const SequenceObservation &seq);

/// Structural and invariant checks; throws ValidationError listing every issue
/// located by JSON pointer.
SequenceObservation sequence_from_json(const nlohmann::json &doc);

/// Throws IoError, ParseError (invalid JSON) or ValidationError.
SequenceObservation load_interchange(const std::string &path);

/// Issues found in a file without throwing on validation failures; a parse
/// failure is reported as a single issue at "".
std::vector<ValidationIssue> validate_interchange(const std::string &path);

/// Streams a sequence document frame by frame. Keys are sorted and floats are
/// written in shortest round-trip form, so output bytes are a function of the
/// content only.
class InterchangeWriter
{
public:
  /// Throws IoError when the file cannot be opened.
  InterchangeWriter(const std::string &path, SequenceMeta meta, std::optional<LaneGraph> lanes,
                    std::optional<nlohmann::json> provenance = std::nullopt);
  InterchangeWriter(const InterchangeWriter &) = delete;
  InterchangeWriter &operator=(const InterchangeWriter &) = delete;
  ~InterchangeWriter();

  void add_frame(const FrameObservation &frame);
  /// Writes the document tail and closes the file. Throws IoError.
  void finish();

private:
  std::string path_;
  std::ofstream out_;
  SequenceMeta meta_;
  std::optional<LaneGraph> lanes_;
  std::optional<nlohmann::json> provenance_;
  std::size_t frames_ = 0;
  bool finished_ = false;
};

/// Writes the sequence with InterchangeWriter. Throws IoError. A provenance
/// record, when given, is stored under "provenance" and ignored by the loader.
void save_interchange(const SequenceObservation &seq, const std::string &path,
                      const std::optional<nlohmann::json> &provenance = std::nullopt);

} // namespace tbx
