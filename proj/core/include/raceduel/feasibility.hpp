#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "raceduel/frenet.hpp"
#include "raceduel/track.hpp"

namespace raceduel {

/// Acceleration limits at one speed.
struct AccelLimits {
  double lon = 0.0;
  double lat = 0.0;
};

/// Velocity-dependent gg-diagram: rows of (v, a_lon_max, a_lat_max) sorted
/// by v; lookup interpolates linearly and holds the end rows outside the
/// covered range.
class GgTable {
 public:
  struct Row {
    double v = 0.0;
    double lon = 0.0;
    double lat = 0.0;
  };

  GgTable() = default;
  explicit GgTable(std::vector<Row> rows);

  static GgTable constant(double lon, double lat, double v_max);
  /// Reads "v,a_lon_max,a_lat_max" rows; '#' lines and a header row are skipped.
  static GgTable read_csv(std::istream& in);
  static GgTable load_csv(const std::string& path);

  AccelLimits at(double v) const;
  const std::vector<Row>& rows() const { return rows_; }

 private:
  std::vector<Row> rows_;
};

struct FeasibilityLimits {
  double min_turning_radius = 1.0;  // r_min
  GgTable gg = GgTable::constant(25.0, 25.0, 85.0);
  double vehicle_width = 1.93;      // d_w; half of it is the bound margin
};

enum class Violation { none, bounds, turning_radius, gg };

std::string_view to_string(Violation v);

struct FeasibilityVerdict {
  bool feasible = true;
  Violation first_violation = Violation::none;
  std::optional<std::size_t> sample_index;

  static FeasibilityVerdict ok() { return {}; }
  static FeasibilityVerdict fail(Violation v, std::size_t index) { return {false, v, index}; }
};

FeasibilityVerdict check_bounds(const Trajectory& traj, const TrackModel& track,
                                double vehicle_width);

/// Fails on |curvature| > 1 / r_min at any sample moving faster than
/// kMinCurvatureSpeed, and on any reversing sample (sdot < 0).
FeasibilityVerdict check_turning_radius(const Trajectory& traj, double min_turning_radius);

/// Fails where (a_lon / a_lon_max(v))^2 + (a_lat / a_lat_max(v))^2 > 1.
FeasibilityVerdict check_gg(const Trajectory& traj, const GgTable& gg);

/// bounds, then turning radius, then gg; stops at the first failure.
FeasibilityVerdict check_all(const Trajectory& traj, const TrackModel& track,
                             const FeasibilityLimits& limits);

}  // namespace raceduel
