#include "raceduel/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace raceduel {

void BlockingParams::validate() const {
  if (!(lookahead > 0.0)) throw std::invalid_argument("lookahead distance s_d must be positive");
  if (!(l_r > 0.0) || !(l_f > 0.0)) throw std::invalid_argument("axle distances must be positive");
  if (!(max_steering > 0.0) || !(max_steering_rate > 0.0)) {
    throw std::invalid_argument("steering limits must be positive");
  }
}

double desired_heading(double lateral_gap, double lateral_gap_rate, const BlockingParams& params) {
  const double target_offset = lateral_gap + params.k_n * lateral_gap_rate;
  return std::atan(target_offset / params.lookahead);
}

double steering_rate(double heading, double previous_error, double desired, double dt,
                     const BlockingParams& params) {
  const double error = desired - heading;
  const double error_rate = (error - previous_error) / dt;
  const double omega = params.k_p * error + params.k_d * error_rate;
  return std::clamp(omega, -params.max_steering_rate, params.max_steering_rate);
}

double lateral_velocity(const CurvilinearState& state) { return state.v * std::sin(state.chi); }

double longitudinal_velocity(const CurvilinearState& state, const TrackModel& track) {
  const double kappa = track.reference_curvature(state.s);
  return state.v * std::cos(state.chi) / (1.0 - state.n * kappa);
}

namespace {

double slip_angle(double delta, const BlockingParams& params) {
  return std::atan(params.l_r / (params.l_r + params.l_f) * std::tan(delta));
}

}  // namespace

CurvilinearState step(const CurvilinearState& state, double steering_rate, double acceleration,
                      double dt, const TrackModel& track, const BlockingParams& params) {
  const double omega =
      std::clamp(steering_rate, -params.max_steering_rate, params.max_steering_rate);
  const double kappa = track.reference_curvature(state.s);
  const double frame_scale = 1.0 / (1.0 - state.n * kappa);
  const bool semi = params.scheme == EulerScheme::semi_implicit;

  CurvilinearState next;
  next.v = state.v + acceleration * dt;
  next.delta = std::clamp(state.delta + omega * dt, -params.max_steering, params.max_steering);

  const double slip = slip_angle(semi ? next.delta : state.delta, params);
  next.chi = state.chi + (state.v / params.l_r * std::sin(slip) -
                          state.v * std::cos(state.chi) * kappa * frame_scale) * dt;

  const double heading = semi ? next.chi : state.chi;
  next.s = state.s + state.v * std::cos(heading) * frame_scale * dt;
  next.n = state.n + state.v * std::sin(heading) * dt;
  return next;
}

double BlockingController::command(const CurvilinearState& self, double opponent_n,
                                   double opponent_n_dot, double dt) {
  const double desired =
      desired_heading(opponent_n - self.n, opponent_n_dot - lateral_velocity(self), params_);
  const double error = desired - self.chi;
  const double previous = previous_error_.value_or(error);
  previous_error_ = error;
  return steering_rate(self.chi, previous, desired, dt, params_);
}

CurvilinearState BlockingController::advance(const CurvilinearState& self, double opponent_n,
                                             double opponent_n_dot, double dt,
                                             const TrackModel& track) {
  const double omega = command(self, opponent_n, opponent_n_dot, dt);
  return step(self, omega, params_.acceleration, dt, track, params_);
}

}  // namespace raceduel
