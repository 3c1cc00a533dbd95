#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tbx/qa_sample.hpp"
#include "tbx/scene_model.hpp"

namespace tbx
{

/// 8-bit RGB raster, row-major.
class Image
{
public:
  Image() = default;
  Image(int width, int height, Rgb fill = {0, 0, 0});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);

  const std::vector<std::uint8_t> &data() const noexcept { return data_; }

  bool operator==(const Image &) const = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Binary PPM (P6) I/O. Throws IoError / ParseError.
void write_ppm(const Image &image, const std::string &path);
Image read_ppm(const std::string &path);

/// Pinhole projection of an ego-frame point; nullopt when the point is at or
/// behind the camera plane (Zc <= 0).
std::optional<Vec2> project_point(const Vec3 &ego_point, const CameraCalibration &calib);

struct ColoredEntity
{
  EntityObservation entity;
  EntityColor color;
};

struct EntityCorners
{
  std::string entity_id;
  Rgb color{};
  std::array<std::optional<Vec2>, 8> corners;
};

struct CornerReport
{
  std::vector<EntityCorners> entities;
  std::size_t edges_drawn = 0;
  std::size_t edges_skipped = 0;
};

inline constexpr int kLineWidth = 3;

/// Draws the 12 edges of each entity box in its color. An edge with an
/// endpoint behind the camera is skipped; edges are clipped to the image.
/// Throws RenderUnavailable without calibration and InvalidArgument when the
/// image size differs from the calibrated size.
CornerReport draw_boxes(Image &image, const std::vector<ColoredEntity> &entities,
                        const std::optional<CameraCalibration> &calib);

/// [{entity_id, color: [r,g,b], corners: [[u,v] | null x 8]}]
nlohmann::json to_json(const CornerReport &report);

} // namespace tbx
