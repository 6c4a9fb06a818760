#include "raceduel/conventional_planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace raceduel {

std::string_view to_string(PredictionMode mode) {
  return mode == PredictionMode::constant_heading ? "CH" : "CLP";
}

void CostWeights::validate() const {
  if (w_n < 0.0 || w_v < 0.0 || w_pr < 0.0) throw std::invalid_argument("cost weights must be >= 0");
  if (!(p_s > 0.0) || !(p_n > 0.0)) throw std::invalid_argument("ellipse parameters must be > 0");
}

const std::array<NamedPreset, 6>& cost_presets() {
  using PM = PredictionMode;
  static const std::array<NamedPreset, 6> presets{{
      {"small-ch", {0.08, 0.28, 5000.0, 0.08, 0.5, PM::constant_heading}},
      {"small-clp", {0.0, 0.04, 5000.0, 0.08, 0.5, PM::constant_lateral_position}},
      {"medium-ch", {0.0, 0.08, 5000.0, 0.02, 0.18, PM::constant_heading}},
      {"medium-clp", {0.72, 1.0, 5000.0, 0.02, 0.18, PM::constant_lateral_position}},
      {"large-ch", {0.36, 0.24, 5000.0, 0.01, 0.1, PM::constant_heading}},
      {"large-clp", {0.8, 0.28, 5000.0, 0.01, 0.1, PM::constant_lateral_position}},
  }};
  return presets;
}

std::optional<CostWeights> find_preset(std::string_view name) {
  for (const auto& p : cost_presets()) {
    if (p.name == name) return p.weights;
  }
  return std::nullopt;
}

OpponentPrediction predict(const CurvilinearState& opponent, PredictionMode mode, double horizon,
                           int points, const TrackModel& track, double vehicle_width) {
  const double s_dot = longitudinal_velocity(opponent, track);
  const double n_dot = mode == PredictionMode::constant_heading ? lateral_velocity(opponent) : 0.0;
  const double lo = drivable_right(track, vehicle_width);
  const double hi = drivable_left(track, vehicle_width);

  OpponentPrediction pred;
  pred.s.resize(static_cast<std::size_t>(points));
  pred.n.resize(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    const double t = horizon * k / (points - 1);
    const auto i = static_cast<std::size_t>(k);
    pred.s[i] = opponent.s + s_dot * t;
    pred.n[i] = std::clamp(opponent.n + n_dot * t, lo, hi);
  }
  return pred;
}

double prediction_cost(double s, double n, double s_pr, double n_pr, double p_s, double p_n) {
  const double ds = s_pr - s;
  const double dn = n_pr - n;
  return std::exp(-p_s * ds * ds - p_n * dn * dn);
}

double trajectory_cost(const Trajectory& traj, const OpponentPrediction& pred,
                       const CostWeights& weights, double v_max) {
  if (pred.s.size() != traj.points.size() || pred.n.size() != traj.points.size()) {
    throw std::invalid_argument("trajectory and prediction grids differ");
  }
  const double dt = traj.grid_step();
  double cost = 0.0;
  for (std::size_t k = 0; k + 1 < traj.points.size(); ++k) {
    const TrajectoryPoint& p = traj.points[k];
    const double dv = v_max - p.v;
    double integrand = weights.w_n * p.n * p.n + weights.w_v * dv * dv;
    if (weights.w_pr != 0.0) {
      integrand +=
          weights.w_pr * prediction_cost(p.s, p.n, pred.s[k], pred.n[k], weights.p_s, weights.p_n);
    }
    cost += integrand * dt;
  }
  return cost;
}

std::optional<PlanResult> plan(const FrenetState& ego, const CurvilinearState& opponent,
                               const TrackModel& track, const FeasibilityLimits& limits,
                               const CostWeights& weights, const SamplingConfig& sampling) {
  const EndStateGrid grid = sample_end_states(track, sampling);
  const CandidateSet candidates(ego, grid, sampling, track);
  const OpponentPrediction pred = predict(opponent, weights.mode, sampling.horizon, sampling.points,
                                          track, sampling.vehicle_width);

  std::vector<char> lateral_ok(grid.lateral.size());
  for (std::size_t j = 0; j < grid.lateral.size(); ++j) {
    lateral_ok[j] = candidates.lateral_within_bounds(j, limits.vehicle_width);
  }

  Trajectory scratch;
  std::optional<std::size_t> best;
  double best_cost = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!lateral_ok[grid.lateral_index(i)]) continue;
    candidates.assemble_kinematics_into(i, scratch);
    if (!check_all(scratch, track, limits).feasible) continue;
    const double cost = trajectory_cost(scratch, pred, weights, sampling.v_max);
    if (!best || cost < best_cost) {
      best = i;
      best_cost = cost;
    }
  }
  if (!best) return std::nullopt;

  PlanResult result;
  result.candidate = *best;
  result.end_state = candidates.end_state(*best);
  result.curves = candidates.curves(*best);
  result.trajectory = candidates.trajectory(*best);
  result.cost = best_cost;
  return result;
}

}  // namespace raceduel
