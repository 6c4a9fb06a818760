#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "raceduel/conventional_planner.hpp"
#include "raceduel/dynamics.hpp"
#include "raceduel/feasibility.hpp"
#include "raceduel/frenet.hpp"
#include "raceduel/rl_policy.hpp"
#include "raceduel/track.hpp"

namespace raceduel {

enum class PlannerKind { conventional, rl };

struct PlannerSpec {
  PlannerKind kind = PlannerKind::conventional;
  std::string name = "small-ch";
  CostWeights weights = *find_preset("small-ch");
  std::shared_ptr<const PolicyWeights> policy;
  bool safety_layer = false;

  static PlannerSpec conventional(std::string_view preset);
  static PlannerSpec learned(std::shared_ptr<const PolicyWeights> policy, bool safety_layer);
};

/// Additive Gaussian noise on the opponent longitudinal velocity seen by the
/// learned planner.
struct NoiseConfig {
  double mean = 0.0;
  double stddev = 0.0;
  std::uint64_t seed = 0;

  bool active() const { return stddev > 0.0 || mean != 0.0; }
};

struct ScenarioConfig {
  TrackModel track;
  VehicleGeometry geometry;
  BlockingParams blocking;
  SamplingConfig sampling;
  FeasibilityLimits limits;

  double opponent_gap = 50.0;     // s_b,init
  double opponent_offset = 0.0;   // n_b,init
  double initial_speed = 50.0;    // v_init, both vehicles

  PlannerSpec planner;
  double dt = 0.1;
  int replan_interval = 1;        // in steps
  int max_steps = 3000;
  NoiseConfig noise;

  bool collisions = true;
  double footprint_scale = 1.0;   // k_scl applied to the collision footprints
  double success_margin = 1.0;    // clearance beyond d_l required for an overtake

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

enum class EpisodeStatus { running, success, collision, infeasible, track_end };

std::string_view to_string(EpisodeStatus status);
std::optional<EpisodeStatus> parse_status(std::string_view text);

struct TraceRow {
  double time = 0.0;
  double s_o = 0.0, n_o = 0.0, v_o = 0.0;
  double s_b = 0.0, n_b = 0.0, chi_b = 0.0, v_b = 0.0;
  double end_n = 0.0, end_sdot = 0.0;
  bool safety_engaged = false;
  EpisodeStatus status = EpisodeStatus::running;
};

struct EpisodeOutcome {
  EpisodeStatus status = EpisodeStatus::running;
  int steps = 0;
  std::vector<TraceRow> trace;
};

/// Planar pose of a footprint center.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

/// Separating-axis overlap test of two oriented rectangles (length along
/// the heading). Touching counts as a collision.
bool check_collision(const Pose& a, const VehicleGeometry& ga, const Pose& b,
                     const VehicleGeometry& gb);

/// s_o - s_b >= d_l + margin.
bool check_success(double s_o, double s_b, const VehicleGeometry& geometry, double margin = 1.0);

/// Result of advancing an episode by one time step.
struct StepReport {
  EpisodeStatus status = EpisodeStatus::running;
  EndState end_state;
  bool safety_engaged = false;
  /// Feasibility of the trajectory the policy asked for (learned planner).
  FeasibilityVerdict requested_verdict;
};

/// One two-vehicle duel, advanced step by step. The ego vehicle tracks its
/// planned trajectory exactly; the blocking vehicle is Euler-integrated with
/// its controller reading the ego state from the start of the step.
class Episode {
 public:
  explicit Episode(ScenarioConfig config);

  const ScenarioConfig& config() const { return config_; }
  const FrenetState& ego() const { return ego_; }
  const CurvilinearState& opponent() const { return opponent_; }
  EpisodeStatus status() const { return status_; }
  int steps() const { return steps_; }
  double time() const { return steps_ * config_.dt; }
  bool done() const { return status_ != EpisodeStatus::running; }
  const std::vector<TraceRow>& trace() const { return trace_; }

  /// Observation for the learned planner; draws observation noise if enabled.
  MdpState observe();

  /// Steps with the planner configured in the scenario.
  StepReport step();
  /// Steps with an externally chosen end state (learned planner path).
  StepReport step_with_end_state(const EndState& end, bool safety_layer);

  EpisodeOutcome outcome() const { return {status_, steps_, trace_}; }

 private:
  bool replan_due() const;
  StepReport advance(const CurvePair& curves, StepReport report);
  StepReport terminate_infeasible(StepReport report);
  void record(const StepReport& report);

  ScenarioConfig config_;
  FrenetState ego_;
  CurvilinearState opponent_;
  BlockingController controller_;
  EpisodeStatus status_ = EpisodeStatus::running;
  int steps_ = 0;
  CurvePair active_curves_;
  EndState last_end_;
  bool has_plan_ = false;
  int steps_since_plan_ = 0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_;
  std::vector<TraceRow> trace_;
};

EpisodeOutcome run_episode(const ScenarioConfig& config);

inline constexpr std::string_view kTraceHeader =
    "time,s_o,n_o,v_o,s_b,n_b,chi_b,v_b,end_n,end_sdot,sl_engaged,status";

void write_trace_csv(std::ostream& out, const EpisodeOutcome& outcome);
void save_trace_csv(const std::string& path, const EpisodeOutcome& outcome);
/// Terminal status recorded in a trace file (status column of the last row).
EpisodeStatus read_trace_status(std::istream& in);

}  // namespace raceduel
