#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "raceduel/dynamics.hpp"
#include "raceduel/feasibility.hpp"
#include "raceduel/frenet.hpp"
#include "raceduel/track.hpp"

namespace raceduel {

/// Lateral opponent prediction: extrapolate the current lateral velocity
/// (constant heading) or hold the current lateral position.
enum class PredictionMode { constant_heading, constant_lateral_position };

std::string_view to_string(PredictionMode mode);

/// Weights of the sampling planner's cost integral and the shape of the
/// elliptical opponent penalty.
struct CostWeights {
  double w_n = 0.0;
  double w_v = 0.0;
  double w_pr = 0.0;
  double p_s = 1.0;
  double p_n = 1.0;
  PredictionMode mode = PredictionMode::constant_heading;

  void validate() const;
};

/// The six published parameterizations (small/medium/large ellipse x CH/CLP).
struct NamedPreset {
  std::string_view name;
  CostWeights weights;
};
const std::array<NamedPreset, 6>& cost_presets();
/// Lookup by name ("small-ch", "large-clp", ...).
std::optional<CostWeights> find_preset(std::string_view name);

/// Predicted opponent positions on the planner's time grid.
struct OpponentPrediction {
  std::vector<double> s;
  std::vector<double> n;
};

/// Constant-velocity longitudinal model plus the chosen lateral model, with
/// n clipped to the drivable band.
OpponentPrediction predict(const CurvilinearState& opponent, PredictionMode mode, double horizon,
                           int points, const TrackModel& track, double vehicle_width);

/// exp(-p_s (s_pr - s)^2 - p_n (n_pr - n)^2).
double prediction_cost(double s, double n, double s_pr, double n_pr, double p_s, double p_n);

/// Left-endpoint rectangle rule over k = 0..N-2 of
/// w_n n^2 + w_v (v_max - v)^2 + w_pr d_pr.
double trajectory_cost(const Trajectory& traj, const OpponentPrediction& pred,
                       const CostWeights& weights, double v_max);

/// Selected trajectory of one planning cycle.
struct PlanResult {
  std::size_t candidate = 0;
  EndState end_state;
  CurvePair curves;
  Trajectory trajectory;
  double cost = 0.0;
};

/// Scores every feasible candidate and returns the cheapest; ties go to the
/// lowest candidate index. std::nullopt when no candidate is feasible.
std::optional<PlanResult> plan(const FrenetState& ego, const CurvilinearState& opponent,
                               const TrackModel& track, const FeasibilityLimits& limits,
                               const CostWeights& weights, const SamplingConfig& sampling);

}  // namespace raceduel
