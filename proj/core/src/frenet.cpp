#include "raceduel/frenet.hpp"

#include <cmath>
#include <stdexcept>

namespace raceduel {

double FrenetState::speed() const { return std::sqrt(s_dot * s_dot + n_dot * n_dot); }

double FrenetState::heading() const { return std::atan2(n_dot, s_dot); }

// Horner evaluation of the polynomial and its first three derivatives.

double QuinticCurve::position(double t) const {
  const auto& c = coefficients_;
  return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
}

double QuinticCurve::velocity(double t) const {
  const auto& c = coefficients_;
  return c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])));
}

double QuinticCurve::acceleration(double t) const {
  const auto& c = coefficients_;
  return 2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]));
}

double QuinticCurve::jerk(double t) const {
  const auto& c = coefficients_;
  return 6.0 * c[3] + t * (24.0 * c[4] + t * 60.0 * c[5]);
}

double QuarticCurve::position(double t) const {
  const auto& c = coefficients_;
  return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * c[4])));
}

double QuarticCurve::velocity(double t) const {
  const auto& c = coefficients_;
  return c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * 4.0 * c[4]));
}

double QuarticCurve::acceleration(double t) const {
  const auto& c = coefficients_;
  return 2.0 * c[2] + t * (6.0 * c[3] + t * 12.0 * c[4]);
}

double QuarticCurve::jerk(double t) const {
  const auto& c = coefficients_;
  return 6.0 * c[3] + t * 24.0 * c[4];
}

QuinticCurve solve_quintic(const KinematicPoint& start, const KinematicPoint& end,
                           double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("quintic horizon must be positive");
  const double T = horizon;
  const double T2 = T * T;
  const double T3 = T2 * T;
  // c0..c2 follow from the start state; the remaining three from the
  // residual the start-state Taylor expansion leaves at t = T.
  const double dp = end.pos - (start.pos + start.vel * T + 0.5 * start.acc * T2);
  const double dv = end.vel - (start.vel + start.acc * T);
  const double da = end.acc - start.acc;
  const double c3 = (10.0 * dp - 4.0 * dv * T + 0.5 * da * T2) / T3;
  const double c4 = (-15.0 * dp + 7.0 * dv * T - da * T2) / (T3 * T);
  const double c5 = (6.0 * dp - 3.0 * dv * T + 0.5 * da * T2) / (T3 * T2);
  return QuinticCurve({start.pos, start.vel, 0.5 * start.acc, c3, c4, c5}, horizon);
}

QuarticCurve solve_quartic(const KinematicPoint& start, double end_velocity,
                           double end_acceleration, double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("quartic horizon must be positive");
  const double T = horizon;
  const double dv = end_velocity - (start.vel + start.acc * T);
  const double da = end_acceleration - start.acc;
  const double c3 = (3.0 * dv - da * T) / (3.0 * T * T);
  const double c4 = (-2.0 * dv + da * T) / (4.0 * T * T * T);
  return QuarticCurve({start.pos, start.vel, 0.5 * start.acc, c3, c4}, horizon);
}

void SamplingConfig::validate() const {
  if (lateral_samples < 2 || speed_samples < 2) {
    throw std::invalid_argument("end-state grids need at least two samples");
  }
  if (points < 2) throw std::invalid_argument("trajectory needs at least two points");
  if (!(horizon > 0.0)) throw std::invalid_argument("planning horizon must be positive");
  if (!(v_max > 0.0)) throw std::invalid_argument("v_max must be positive");
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  }
  // Pin the upper endpoint and make the grid exactly sign-symmetric when the
  // interval is.
  out.back() = hi;
  if (lo == -hi) {
    for (int i = 0; i < count / 2; ++i) {
      out[static_cast<std::size_t>(count - 1 - i)] = -out[static_cast<std::size_t>(i)];
    }
    if (count % 2 == 1) out[static_cast<std::size_t>(count / 2)] = 0.0;
  }
  return out;
}

EndState EndStateGrid::at(std::size_t candidate) const {
  return {lateral.at(lateral_index(candidate)), 0.0, 0.0, speeds.at(speed_index(candidate))};
}

EndStateGrid sample_end_states(const TrackModel& track, const SamplingConfig& config) {
  EndStateGrid grid;
  grid.lateral = linspace(drivable_right(track, config.vehicle_width),
                          drivable_left(track, config.vehicle_width), config.lateral_samples);
  grid.speeds = linspace(0.0, config.v_max, config.speed_samples);
  return grid;
}

TrajectoryPoint make_kinematic_point(double t, const KinematicPoint& lon, const KinematicPoint& lat,
                                     const TrackModel& track) {
  TrajectoryPoint p;
  p.t = t;
  p.s = lon.pos;
  p.s_dot = lon.vel;
  p.s_ddot = lon.acc;
  p.n = lat.pos;
  p.n_dot = lat.vel;
  p.n_ddot = lat.acc;

  // On the straight reference line the Cartesian derivatives are the
  // curvilinear ones rotated by the (constant) reference heading.
  const double theta = track.reference_heading(lon.pos);
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  const double vx = c * lon.vel - sn * lat.vel;
  const double vy = sn * lon.vel + c * lat.vel;
  const double ax = c * lon.acc - sn * lat.acc;
  const double ay = sn * lon.acc + c * lat.acc;

  p.v = std::sqrt(vx * vx + vy * vy);
  if (p.v > kMinCurvatureSpeed) {
    const double cross = vx * ay - vy * ax;
    p.curvature = cross / (p.v * p.v * p.v);
    p.a_lon = (vx * ax + vy * ay) / p.v;
    p.a_lat = cross / p.v;
  } else {
    p.curvature = 0.0;
    p.a_lon = std::sqrt(ax * ax + ay * ay);
    p.a_lat = 0.0;
  }
  return p;
}

TrajectoryPoint make_point(double t, const KinematicPoint& lon, const KinematicPoint& lat,
                           const TrackModel& track) {
  TrajectoryPoint p = make_kinematic_point(t, lon, lat, track);
  const CartesianPoint xy = to_cartesian(track, lon.pos, lat.pos);
  p.x = xy.x;
  p.y = xy.y;
  p.heading = track.reference_heading(lon.pos) + std::atan2(lat.vel, lon.vel);
  return p;
}

namespace {

double grid_time(int k, double horizon, int points) { return horizon * k / (points - 1); }

}  // namespace

Trajectory assemble(const QuinticCurve& lat, const QuarticCurve& lon, const TrackModel& track,
                    int points) {
  if (lat.horizon() != lon.horizon()) {
    throw std::invalid_argument("lateral and longitudinal horizons differ");
  }
  if (points < 2) throw std::invalid_argument("trajectory needs at least two points");
  Trajectory traj;
  traj.horizon = lat.horizon();
  traj.points.reserve(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    const double t = grid_time(k, traj.horizon, points);
    traj.points.push_back(make_point(t, lon.evaluate(t), lat.evaluate(t), track));
  }
  return traj;
}

FrenetState CurvePair::state_at(double t) const {
  const KinematicPoint lon = longitudinal.evaluate(t);
  const KinematicPoint lat = lateral.evaluate(t);
  return {lon.pos, lon.vel, lon.acc, lat.pos, lat.vel, lat.acc};
}

CurvePair connect(const FrenetState& start, const EndState& end, const SamplingConfig& config) {
  return {solve_quintic(start.lateral(), {end.n, end.n_dot, end.n_ddot}, config.horizon),
          solve_quartic(start.longitudinal(), end.s_dot, 0.0, config.horizon)};
}

CandidateSet::CandidateSet(const FrenetState& start, const EndStateGrid& grid,
                           const SamplingConfig& config, const TrackModel& track)
    : grid_(grid), config_(config), track_(track) {
  const auto n_points = static_cast<std::size_t>(config.points);
  times_.resize(n_points);
  for (int k = 0; k < config.points; ++k) {
    times_[static_cast<std::size_t>(k)] = grid_time(k, config.horizon, config.points);
  }

  lateral_curves_.reserve(grid_.lateral.size());
  lateral_samples_.reserve(grid_.lateral.size() * n_points);
  for (double n_end : grid_.lateral) {
    const QuinticCurve& curve = lateral_curves_.emplace_back(
        solve_quintic(start.lateral(), {n_end, 0.0, 0.0}, config.horizon));
    for (double t : times_) lateral_samples_.push_back(curve.evaluate(t));
  }

  longitudinal_curves_.reserve(grid_.speeds.size());
  longitudinal_samples_.reserve(grid_.speeds.size() * n_points);
  for (double speed : grid_.speeds) {
    const QuarticCurve& curve = longitudinal_curves_.emplace_back(
        solve_quartic(start.longitudinal(), speed, 0.0, config.horizon));
    for (double t : times_) longitudinal_samples_.push_back(curve.evaluate(t));
  }
}

CurvePair CandidateSet::curves(std::size_t candidate) const {
  return {lateral_curves_.at(grid_.lateral_index(candidate)),
          longitudinal_curves_.at(grid_.speed_index(candidate))};
}

void CandidateSet::assemble_into(std::size_t candidate, Trajectory& out) const {
  const std::size_t n_points = times_.size();
  const std::size_t lat_offset = grid_.lateral_index(candidate) * n_points;
  const std::size_t lon_offset = grid_.speed_index(candidate) * n_points;
  out.horizon = config_.horizon;
  out.points.resize(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    out.points[k] = make_point(times_[k], longitudinal_samples_[lon_offset + k],
                               lateral_samples_[lat_offset + k], track_);
  }
}

void CandidateSet::assemble_kinematics_into(std::size_t candidate, Trajectory& out) const {
  const std::size_t n_points = times_.size();
  const std::size_t lat_offset = grid_.lateral_index(candidate) * n_points;
  const std::size_t lon_offset = grid_.speed_index(candidate) * n_points;
  out.horizon = config_.horizon;
  out.points.resize(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    out.points[k] = make_kinematic_point(times_[k], longitudinal_samples_[lon_offset + k],
                                         lateral_samples_[lat_offset + k], track_);
  }
}

bool CandidateSet::lateral_within_bounds(std::size_t lateral_index, double vehicle_width) const {
  const std::size_t n_points = times_.size();
  for (std::size_t k = 0; k < n_points; ++k) {
    if (!within_bounds(track_, lateral_samples_[lateral_index * n_points + k].pos,
                       0.5 * vehicle_width)) {
      return false;
    }
  }
  return true;
}

Trajectory CandidateSet::trajectory(std::size_t candidate) const {
  Trajectory out;
  assemble_into(candidate, out);
  return out;
}

}  // namespace raceduel
