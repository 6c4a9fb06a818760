#pragma once

#include <stdexcept>

namespace raceduel {

/// Straight race track with its curvilinear (s, n) frame. The reference line
/// is the centerline and coincides with the world x-axis.
struct TrackModel {
  double length = 1500.0;
  double half_width_left = 7.5;   // n_l
  double half_width_right = 7.5;  // n_r

  double reference_heading(double /*s*/) const { return 0.0; }
  double reference_curvature(double /*s*/) const { return 0.0; }

  /// Throws std::invalid_argument if a dimension is non-positive.
  void validate() const;
};

/// Outer dimensions of a vehicle footprint.
struct VehicleGeometry {
  double length = 4.9;  // d_l
  double width = 1.93;  // d_w
};

struct CartesianPoint {
  double x = 0.0;
  double y = 0.0;
};

CartesianPoint to_cartesian(const TrackModel& track, double s, double n);

/// Slack for closed-interval bound tests; absorbs the last-bit rounding of
/// polynomial end points that land exactly on a bound.
inline constexpr double kBoundsTolerance = 1e-9;

/// True iff -n_r + margin <= n <= n_l - margin (up to kBoundsTolerance).
bool within_bounds(const TrackModel& track, double n, double margin);

/// Largest |n| reachable by a vehicle center that keeps the footprint on track.
inline double drivable_left(const TrackModel& track, double vehicle_width) {
  return track.half_width_left - 0.5 * vehicle_width;
}
inline double drivable_right(const TrackModel& track, double vehicle_width) {
  return -track.half_width_right + 0.5 * vehicle_width;
}

}  // namespace raceduel
