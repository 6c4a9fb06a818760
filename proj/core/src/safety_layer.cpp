#include "raceduel/safety_layer.hpp"

#include <stdexcept>
#include <vector>

namespace raceduel {

double similarity_cost(const Trajectory& reference, const Trajectory& candidate) {
  if (reference.points.size() != candidate.points.size()) {
    throw std::invalid_argument("trajectories do not share a time grid");
  }
  const double dt = reference.grid_step();
  double cost = 0.0;
  for (std::size_t k = 0; k + 1 < reference.points.size(); ++k) {
    const double ds = reference.points[k].s - candidate.points[k].s;
    const double dn = reference.points[k].n - candidate.points[k].n;
    cost += (ds * ds + dn * dn) * dt;
  }
  return cost;
}

std::optional<SafetyOutcome> rescue(const Trajectory& rl_trajectory, const FrenetState& ego,
                                    const TrackModel& track, const FeasibilityLimits& limits,
                                    const SamplingConfig& sampling) {
  const EndStateGrid grid = sample_end_states(track, sampling);
  const CandidateSet candidates(ego, grid, sampling, track);

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
    const double cost = similarity_cost(rl_trajectory, scratch);
    if (!best || cost < best_cost) {
      best = i;
      best_cost = cost;
    }
  }
  if (!best) return std::nullopt;

  SafetyOutcome out;
  out.candidate = *best;
  out.end_state = candidates.end_state(*best);
  out.curves = candidates.curves(*best);
  out.trajectory = candidates.trajectory(*best);
  out.similarity_cost = best_cost;
  return out;
}

}  // namespace raceduel
