#pragma once

#include <optional>

#include "raceduel/track.hpp"

namespace raceduel {

/// Blocking-vehicle state in track coordinates (rear-axle reference).
struct CurvilinearState {
  double s = 0.0;
  double n = 0.0;
  double chi = 0.0;    // orientation relative to the reference line
  double v = 0.0;
  double delta = 0.0;  // steering angle
};

enum class EulerScheme { explicit_euler, semi_implicit };

/// Kinematic and controller parameters of the blocking vehicle.
struct BlockingParams {
  double k_p = 0.05;
  double k_d = 0.6;
  double k_n = 1.0;
  double lookahead = 80.0;  // s_d; lower is more aggressive
  double l_r = 1.72;
  double l_f = 1.25;
  double max_steering = 0.43;
  double max_steering_rate = 0.39;
  double acceleration = 0.0;
  // Update order within one Euler step. Semi-implicit advances delta first,
  // then chi from the new delta, then s and n from the new chi; explicit
  // evaluates every derivative at the old state.
  EulerScheme scheme = EulerScheme::semi_implicit;

  void validate() const;
};

/// chi_d = atan((dn + k_n * dn_dot) / s_d) with dn = n_o - n_b, dn_dot = ndot_o - ndot_b.
double desired_heading(double lateral_gap, double lateral_gap_rate, const BlockingParams& params);

/// PD steering-rate law on the heading error. The error derivative is the
/// backward difference against `previous_error`; the result is clipped to
/// the steering-rate limit.
double steering_rate(double heading, double previous_error, double desired, double dt,
                     const BlockingParams& params);

/// One Euler step of the kinematic bicycle in curvilinear coordinates.
/// The steering rate is clipped before it is applied and the steering angle
/// after the update.
CurvilinearState step(const CurvilinearState& state, double steering_rate, double acceleration,
                      double dt, const TrackModel& track, const BlockingParams& params);

/// ndot = v * sin(chi).
double lateral_velocity(const CurvilinearState& state);

/// ds/dt along the reference line.
double longitudinal_velocity(const CurvilinearState& state, const TrackModel& track);

/// Stateful blocking controller: remembers the previous heading error so the
/// derivative term can be formed.
class BlockingController {
 public:
  explicit BlockingController(BlockingParams params) : params_(params) {}

  /// Steering rate for the next step given the overtaking vehicle's lateral
  /// position and velocity.
  double command(const CurvilinearState& self, double opponent_n, double opponent_n_dot,
                 double dt);

  /// Convenience: command + step.
  CurvilinearState advance(const CurvilinearState& self, double opponent_n,
                           double opponent_n_dot, double dt, const TrackModel& track);

  const BlockingParams& params() const { return params_; }
  void reset() { previous_error_.reset(); }

 private:
  BlockingParams params_;
  std::optional<double> previous_error_;
};

}  // namespace raceduel
