#include "raceduel/track.hpp"

#include <cmath>

namespace raceduel {

void TrackModel::validate() const {
  if (!(length > 0.0) || !(half_width_left > 0.0) || !(half_width_right > 0.0)) {
    throw std::invalid_argument("track dimensions must be positive");
  }
}

CartesianPoint to_cartesian(const TrackModel& track, double s, double n) {
  // Reference point (s, 0) offset by n along the left-pointing normal.
  const double theta = track.reference_heading(s);
  return {s - n * std::sin(theta), n * std::cos(theta)};
}

bool within_bounds(const TrackModel& track, double n, double margin) {
  return -track.half_width_right + margin - kBoundsTolerance <= n &&
         n <= track.half_width_left - margin + kBoundsTolerance;
}

}  // namespace raceduel
