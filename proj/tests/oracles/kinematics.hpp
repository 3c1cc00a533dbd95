#pragma once

// Closed forms for constant-speed constant-curvature motion.

#include <cmath>

namespace oracle
{

// Heading change in degrees after travelling `length` meters on a circle of
// signed radius (positive left).
inline double arc_yaw_deg(double length, double radius) { return length / radius * 180.0 / M_PI; }

inline double arc_length(double speed, double seconds) { return std::abs(speed) * seconds; }

// Chord-sum length of n equal steps along an arc whose total sweep is `sweep_rad`.
inline double chord_sum(double radius, double sweep_rad, int steps)
{
  const double step = sweep_rad / steps;
  return steps * 2.0 * std::abs(radius) * std::abs(std::sin(step / 2.0));
}

inline const char *turn_label(double yaw_deg, double threshold)
{
  if (yaw_deg > threshold)
    return "left turn";
  if (yaw_deg < -threshold)
    return "right turn";
  return "go straight";
}

} // namespace oracle
