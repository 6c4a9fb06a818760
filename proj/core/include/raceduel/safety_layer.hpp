#pragma once

#include <cstddef>
#include <optional>

#include "raceduel/feasibility.hpp"
#include "raceduel/frenet.hpp"
#include "raceduel/track.hpp"

namespace raceduel {

/// Replacement chosen for an infeasible learned trajectory.
struct SafetyOutcome {
  bool replaced = true;
  std::size_t candidate = 0;
  EndState end_state;
  CurvePair curves;
  Trajectory trajectory;
  double similarity_cost = 0.0;
};

/// Rectangle-rule integral of the squared (s, n) distance between two
/// trajectories sharing one time grid.
double similarity_cost(const Trajectory& reference, const Trajectory& candidate);

/// Builds the sampling planner's candidate set from `ego`, keeps the
/// feasible ones and returns the one closest to `rl_trajectory`. Ties go to
/// the lowest candidate index; std::nullopt if nothing is feasible.
std::optional<SafetyOutcome> rescue(const Trajectory& rl_trajectory, const FrenetState& ego,
                                    const TrackModel& track, const FeasibilityLimits& limits,
                                    const SamplingConfig& sampling);

}  // namespace raceduel
