#pragma once

// Interval tables for the angle binnings, written as explicit (lo, hi] lists
// and searched linearly. Kept independent of the library on purpose.

#include <cmath>
#include <string>
#include <vector>

namespace oracle
{

struct Interval
{
  double lo;
  double hi;
  bool lo_closed;
  bool hi_closed;
  std::string label;

  bool contains(double v) const
  {
    const bool above = lo_closed ? v >= lo : v > lo;
    const bool below = hi_closed ? v <= hi : v < hi;
    return above && below;
  }
};

inline std::string spatial_label(double theta)
{
  static const std::vector<Interval> table{
      {-30, 30, false, true, "front"},
      {30, 90, false, true, "front left"},
      {-90, -30, false, true, "front right"},
      {90, 150, false, true, "back left"},
      {-150, -90, false, true, "back right"},
  };
  for (const auto &i : table)
    if (i.contains(theta))
      return i.label;
  return "back";
}

inline std::string orientation_label(double abs_theta)
{
  static const std::vector<Interval> table{
      {0, 45, true, true, "similar"},
      {135, 180, true, true, "opposite"},
  };
  for (const auto &i : table)
    if (i.contains(abs_theta))
      return i.label;
  return "perpendicular";
}

// Bearing by rotating the offset into the reference frame with plain trig.
inline double bearing_deg(double rx, double ry, double ryaw, double tx, double ty)
{
  const double dx = tx - rx;
  const double dy = ty - ry;
  const double fx = std::cos(ryaw) * dx + std::sin(ryaw) * dy;
  const double fy = -std::sin(ryaw) * dx + std::cos(ryaw) * dy;
  double deg = std::atan2(fy, fx) * 180.0 / M_PI;
  if (deg <= -180.0)
    deg += 360.0;
  return deg;
}

} // namespace oracle
