#include "raceduel/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace raceduel {

GgTable::GgTable(std::vector<Row> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("gg table needs at least one row");
  std::sort(rows_.begin(), rows_.end(), [](const Row& a, const Row& b) { return a.v < b.v; });
  for (const Row& r : rows_) {
    if (!std::isfinite(r.v) || !std::isfinite(r.lon) || !std::isfinite(r.lat) || r.lon < 0.0 ||
        r.lat < 0.0) {
      throw std::invalid_argument("gg table entries must be finite and non-negative");
    }
  }
}

GgTable GgTable::constant(double lon, double lat, double v_max) {
  return GgTable({{0.0, lon, lat}, {v_max, lon, lat}});
}

GgTable GgTable::read_csv(std::istream& in) {
  std::vector<Row> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    Row r;
    if (!(fields >> r.v >> r.lon >> r.lat)) {
      if (rows.empty()) continue;  // header
      throw std::runtime_error("malformed gg table row: " + line);
    }
    rows.push_back(r);
  }
  return GgTable(std::move(rows));
}

GgTable GgTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gg table " + path);
  return read_csv(in);
}

AccelLimits GgTable::at(double v) const {
  if (rows_.empty()) return {};
  if (v <= rows_.front().v) return {rows_.front().lon, rows_.front().lat};
  if (v >= rows_.back().v) return {rows_.back().lon, rows_.back().lat};
  const auto hi = std::upper_bound(rows_.begin(), rows_.end(), v,
                                   [](double value, const Row& r) { return value < r.v; });
  const Row& b = *hi;
  const Row& a = *(hi - 1);
  const double w = (v - a.v) / (b.v - a.v);
  return {a.lon + w * (b.lon - a.lon), a.lat + w * (b.lat - a.lat)};
}

std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::none: return "none";
    case Violation::bounds: return "bounds";
    case Violation::turning_radius: return "turning_radius";
    case Violation::gg: return "gg";
  }
  return "unknown";
}

FeasibilityVerdict check_bounds(const Trajectory& traj, const TrackModel& track,
                                double vehicle_width) {
  const double margin = 0.5 * vehicle_width;
  for (std::size_t k = 0; k < traj.points.size(); ++k) {
    if (!within_bounds(track, traj.points[k].n, margin)) {
      return FeasibilityVerdict::fail(Violation::bounds, k);
    }
  }
  return FeasibilityVerdict::ok();
}

FeasibilityVerdict check_turning_radius(const Trajectory& traj, double min_turning_radius) {
  const double max_curvature = 1.0 / min_turning_radius;
  for (std::size_t k = 0; k < traj.points.size(); ++k) {
    const TrajectoryPoint& p = traj.points[k];
    if (p.s_dot < 0.0) return FeasibilityVerdict::fail(Violation::turning_radius, k);
    if (p.v > kMinCurvatureSpeed && std::abs(p.curvature) > max_curvature) {
      return FeasibilityVerdict::fail(Violation::turning_radius, k);
    }
  }
  return FeasibilityVerdict::ok();
}

namespace {

// Squared utilisation of one axis; a zero limit admits only zero acceleration.
double utilisation(double accel, double limit) {
  if (limit > 0.0) {
    const double r = accel / limit;
    return r * r;
  }
  return accel == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

FeasibilityVerdict check_gg(const Trajectory& traj, const GgTable& gg) {
  for (std::size_t k = 0; k < traj.points.size(); ++k) {
    const TrajectoryPoint& p = traj.points[k];
    const AccelLimits lim = gg.at(p.v);
    if (utilisation(p.a_lon, lim.lon) + utilisation(p.a_lat, lim.lat) > 1.0) {
      return FeasibilityVerdict::fail(Violation::gg, k);
    }
  }
  return FeasibilityVerdict::ok();
}

FeasibilityVerdict check_all(const Trajectory& traj, const TrackModel& track,
                             const FeasibilityLimits& limits) {
  if (auto v = check_bounds(traj, track, limits.vehicle_width); !v.feasible) return v;
  if (auto v = check_turning_radius(traj, limits.min_turning_radius); !v.feasible) return v;
  return check_gg(traj, limits.gg);
}

}  // namespace raceduel
