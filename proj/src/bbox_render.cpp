#include "tbx/bbox_render.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "tbx/geometry.hpp"

namespace tbx
{

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height)
{
  if (width <= 0 || height <= 0)
  {
    throw InvalidArgument(fmt::format("image size {}x{} must be positive", width, height));
  }
  data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3)
  {
    data_[i] = fill[0];
    data_[i + 1] = fill[1];
    data_[i + 2] = fill[2];
  }
}

Rgb Image::at(int x, int y) const
{
  if (!contains(x, y))
    throw InvalidArgument(fmt::format("pixel ({}, {}) outside image", x, y));
  const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void Image::set(int x, int y, Rgb c)
{
  if (!contains(x, y))
    return;
  const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
  data_[i] = c[0];
  data_[i + 1] = c[1];
  data_[i + 2] = c[2];
}

void write_ppm(const Image &image, const std::string &path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError(path, "cannot open for writing");
  out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char *>(image.data().data()), static_cast<std::streamsize>(image.data().size()));
  if (!out)
    throw IoError(path, "write failed");
}

Image read_ppm(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError(path, "cannot open for reading");
  std::string magic;
  int w = 0;
  int h = 0;
  int maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P6" || w <= 0 || h <= 0 || maxval != 255)
    throw ParseError(0, fmt::format("{}: not an 8-bit binary PPM", path));
  in.get();
  Image img(w, h);
  std::vector<char> buf(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size()))
    throw ParseError(0, fmt::format("{}: truncated pixel data", path));
  for (int y = 0; y < h; ++y)
  {
    for (int x = 0; x < w; ++x)
    {
      const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)) * 3;
      img.set(x, y,
              {static_cast<std::uint8_t>(buf[i]), static_cast<std::uint8_t>(buf[i + 1]),
               static_cast<std::uint8_t>(buf[i + 2])});
    }
  }
  return img;
}

std::optional<Vec2> project_point(const Vec3 &ego_point, const CameraCalibration &calib)
{
  const Vec3 c = calib.ego_to_camera * ego_point;
  if (c.z() <= 0.0)
    return std::nullopt;
  return Vec2(calib.fx() * c.x() / c.z() + calib.cx(), calib.fy() * c.y() / c.z() + calib.cy());
}

namespace
{

// Liang-Barsky clip of segment a-b against [lo, hi] on both axes.
bool clip_segment(Vec2 &a, Vec2 &b, const Vec2 &lo, const Vec2 &hi)
{
  double t0 = 0.0;
  double t1 = 1.0;
  const Vec2 d = b - a;
  const std::array<double, 4> p{-d.x(), d.x(), -d.y(), d.y()};
  const std::array<double, 4> q{a.x() - lo.x(), hi.x() - a.x(), a.y() - lo.y(), hi.y() - a.y()};
  for (int i = 0; i < 4; ++i)
  {
    if (p[i] == 0.0)
    {
      if (q[i] < 0.0)
        return false;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0)
      t0 = std::max(t0, r);
    else
      t1 = std::min(t1, r);
    if (t0 > t1)
      return false;
  }
  const Vec2 a0 = a;
  a = a0 + t0 * d;
  b = a0 + t1 * d;
  return true;
}

void stamp(Image &img, int x, int y, Rgb c)
{
  const int r = kLineWidth / 2;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      img.set(x + dx, y + dy, c);
}

void draw_line(Image &img, Vec2 a, Vec2 b, Rgb c)
{
  const double margin = kLineWidth;
  if (!clip_segment(a, b, Vec2(-margin, -margin), Vec2(img.width() - 1 + margin, img.height() - 1 + margin)))
    return;
  int x0 = static_cast<int>(std::lround(a.x()));
  int y0 = static_cast<int>(std::lround(a.y()));
  const int x1 = static_cast<int>(std::lround(b.x()));
  const int y1 = static_cast<int>(std::lround(b.y()));
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true)
  {
    stamp(img, x0, y0, c);
    if (x0 == x1 && y0 == y1)
      break;
    const int e2 = 2 * err;
    if (e2 >= dy)
    {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx)
    {
      err += dx;
      y0 += sy;
    }
  }
}

} // namespace

CornerReport draw_boxes(Image &image, const std::vector<ColoredEntity> &entities,
                        const std::optional<CameraCalibration> &calib)
{
  if (!calib)
  {
    throw RenderUnavailable("frame has no camera calibration");
  }
  if (image.width() != calib->image_width || image.height() != calib->image_height)
  {
    throw InvalidArgument(fmt::format("image is {}x{} but calibration expects {}x{}", image.width(),
                                      image.height(), calib->image_width, calib->image_height));
  }
  CornerReport report;
  for (const auto &ce : entities)
  {
    EntityCorners ec;
    ec.entity_id = ce.entity.entity_id;
    ec.color = ce.color.rgb;
    const auto corners = box_corners_3d(ce.entity);
    for (std::size_t i = 0; i < corners.size(); ++i)
    {
      ec.corners[i] = project_point(corners[i], *calib);
    }
    for (const auto &edge : kBoxEdges)
    {
      const auto &a = ec.corners[static_cast<std::size_t>(edge[0])];
      const auto &b = ec.corners[static_cast<std::size_t>(edge[1])];
      if (!a || !b)
      {
        ++report.edges_skipped;
        continue;
      }
      draw_line(image, *a, *b, ec.color);
      ++report.edges_drawn;
    }
    report.entities.push_back(std::move(ec));
  }
  return report;
}

nlohmann::json to_json(const CornerReport &report)
{
  auto out = nlohmann::json::array();
  for (const auto &e : report.entities)
  {
    nlohmann::json corners = nlohmann::json::array();
    for (const auto &c : e.corners)
    {
      if (c)
        corners.push_back({c->x(), c->y()});
      else
        corners.push_back(nullptr);
    }
    out.push_back({{"entity_id", e.entity_id}, {"color", e.color}, {"corners", corners}});
  }
  return out;
}

} // namespace tbx
