#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "raceduel/track.hpp"

namespace raceduel {

/// Position, velocity and acceleration of one coordinate.
struct KinematicPoint {
  double pos = 0.0;
  double vel = 0.0;
  double acc = 0.0;
};

/// Overtaking-vehicle state in track coordinates.
struct FrenetState {
  double s = 0.0;
  double s_dot = 0.0;
  double s_ddot = 0.0;
  double n = 0.0;
  double n_dot = 0.0;
  double n_ddot = 0.0;

  KinematicPoint longitudinal() const { return {s, s_dot, s_ddot}; }
  KinematicPoint lateral() const { return {n, n_dot, n_ddot}; }
  double speed() const;
  /// Orientation relative to the reference line, atan2(ndot, sdot).
  double heading() const;
};

/// Jerk-minimal connection end state; the longitudinal end acceleration is 0.
struct EndState {
  double n = 0.0;
  double n_dot = 0.0;
  double n_ddot = 0.0;
  double s_dot = 0.0;
};

/// n(t) = sum c_i t^i, i = 0..5, on [0, horizon].
class QuinticCurve {
 public:
  QuinticCurve() = default;
  QuinticCurve(std::array<double, 6> coefficients, double horizon)
      : coefficients_(coefficients), horizon_(horizon) {}

  const std::array<double, 6>& coefficients() const { return coefficients_; }
  double horizon() const { return horizon_; }

  double position(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;
  double jerk(double t) const;
  KinematicPoint evaluate(double t) const { return {position(t), velocity(t), acceleration(t)}; }

 private:
  std::array<double, 6> coefficients_{};
  double horizon_ = 0.0;
};

/// s(t) = sum c_i t^i, i = 0..4, on [0, horizon].
class QuarticCurve {
 public:
  QuarticCurve() = default;
  QuarticCurve(std::array<double, 5> coefficients, double horizon)
      : coefficients_(coefficients), horizon_(horizon) {}

  const std::array<double, 5>& coefficients() const { return coefficients_; }
  double horizon() const { return horizon_; }

  double position(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;
  double jerk(double t) const;
  KinematicPoint evaluate(double t) const { return {position(t), velocity(t), acceleration(t)}; }

 private:
  std::array<double, 5> coefficients_{};
  double horizon_ = 0.0;
};

/// Quintic matching position, velocity and acceleration at both ends.
/// Throws std::invalid_argument unless horizon > 0.
QuinticCurve solve_quintic(const KinematicPoint& start, const KinematicPoint& end, double horizon);

/// Quartic matching the start state and the end velocity/acceleration; the
/// end position is free.
QuarticCurve solve_quartic(const KinematicPoint& start, double end_velocity,
                           double end_acceleration, double horizon);

/// Discretization and sampling parameters.
struct SamplingConfig {
  int lateral_samples = 20;  // N_n
  int speed_samples = 40;    // N_sdot
  int points = 51;           // N
  double horizon = 2.5;      // T
  double v_max = 85.0;
  double vehicle_width = 1.93;

  double grid_step() const { return horizon / (points - 1); }
  void validate() const;
};

/// Grids of lateral end positions and end speeds. Candidate index i maps to
/// (speed index i / N_n, lateral index i % N_n), i.e. lexicographic in
/// (speed index, lateral index).
struct EndStateGrid {
  std::vector<double> lateral;
  std::vector<double> speeds;

  std::size_t size() const { return lateral.size() * speeds.size(); }
  std::size_t lateral_index(std::size_t candidate) const { return candidate % lateral.size(); }
  std::size_t speed_index(std::size_t candidate) const { return candidate / lateral.size(); }
  EndState at(std::size_t candidate) const;
};

EndStateGrid sample_end_states(const TrackModel& track, const SamplingConfig& config);

/// `count` equidistant values spanning [lo, hi] (endpoints included).
std::vector<double> linspace(double lo, double hi, int count);

/// Degenerate-curvature threshold: below this speed curvature is reported as 0.
inline constexpr double kMinCurvatureSpeed = 0.1;

struct TrajectoryPoint {
  double t = 0.0;
  double s = 0.0, s_dot = 0.0, s_ddot = 0.0;
  double n = 0.0, n_dot = 0.0, n_ddot = 0.0;
  double x = 0.0, y = 0.0;
  double heading = 0.0;
  double curvature = 0.0;
  double v = 0.0;
  double a_lon = 0.0;
  double a_lat = 0.0;
};

/// Time-discretized planned motion with t_k = k * T / (N - 1).
struct Trajectory {
  std::vector<TrajectoryPoint> points;
  double horizon = 0.0;

  std::size_t size() const { return points.size(); }
  double grid_step() const { return points.size() > 1 ? horizon / (points.size() - 1) : 0.0; }
};

/// Builds one trajectory sample from the two coordinate channels.
TrajectoryPoint make_point(double t, const KinematicPoint& lon, const KinematicPoint& lat,
                           const TrackModel& track);

/// Fills only the channels the feasibility checks and cost functions read
/// (s, n and derivatives, v, curvature, a_lon, a_lat); x, y and heading
/// are left at 0. Values match make_point exactly.
TrajectoryPoint make_kinematic_point(double t, const KinematicPoint& lon, const KinematicPoint& lat,
                                     const TrackModel& track);

/// Discretizes a lateral/longitudinal curve pair into `points` samples.
/// Throws std::invalid_argument if the horizons differ.
Trajectory assemble(const QuinticCurve& lat, const QuarticCurve& lon, const TrackModel& track,
                    int points);

/// Lateral and longitudinal curves of one planned motion.
struct CurvePair {
  QuinticCurve lateral;
  QuarticCurve longitudinal;

  FrenetState state_at(double t) const;
};

/// Curve pair connecting `start` to `end` over the configured horizon.
CurvePair connect(const FrenetState& start, const EndState& end, const SamplingConfig& config);

/// The full candidate set for one planning cycle: every lateral curve paired
/// with every longitudinal curve. Each curve is evaluated once on the time
/// grid; candidates are assembled from the cached channels.
class CandidateSet {
 public:
  CandidateSet(const FrenetState& start, const EndStateGrid& grid, const SamplingConfig& config,
               const TrackModel& track);

  std::size_t size() const { return grid_.size(); }
  const EndStateGrid& grid() const { return grid_; }
  EndState end_state(std::size_t candidate) const { return grid_.at(candidate); }
  CurvePair curves(std::size_t candidate) const;

  Trajectory trajectory(std::size_t candidate) const;
  /// Reuses `out`'s storage.
  void assemble_into(std::size_t candidate, Trajectory& out) const;
  /// As assemble_into, but through make_kinematic_point.
  void assemble_kinematics_into(std::size_t candidate, Trajectory& out) const;

  /// Whether every sample of lateral curve `lateral_index` lies within the
  /// drivable band; a false here fails the bounds check of all candidates
  /// sharing that curve.
  bool lateral_within_bounds(std::size_t lateral_index, double vehicle_width) const;

 private:
  EndStateGrid grid_;
  SamplingConfig config_;
  TrackModel track_;
  std::vector<QuinticCurve> lateral_curves_;
  std::vector<QuarticCurve> longitudinal_curves_;
  std::vector<double> times_;
  // [curve][point]
  std::vector<KinematicPoint> lateral_samples_;
  std::vector<KinematicPoint> longitudinal_samples_;
};

}  // namespace raceduel
