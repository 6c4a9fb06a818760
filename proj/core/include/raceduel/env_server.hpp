#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "raceduel/sim.hpp"

namespace raceduel {

inline constexpr std::string_view kProtocolVersion = "v1";

/// Per-episode reward bookkeeping.
struct RewardState {
  double max_relative_speed = 0.0;  // running max of sdot_o - sdot_b
  double k_scl = 1.0;
  int stage = 6;
  bool lateral_term = true;
};

/// Post-step quantities the reward depends on.
struct Transition {
  EpisodeStatus status = EpisodeStatus::running;
  double s_o = 0.0, s_b = 0.0;
  double n_o = 0.0, n_b = 0.0;
  double sdot_o = 0.0, sdot_b = 0.0;
};

/// -1 / +10 on unsuccessful / successful termination, otherwise the dense
/// reward; the running maximum of the relative speed is updated afterwards.
double reward(const Transition& transition, RewardState& state, const VehicleGeometry& geometry);

/// Curriculum stage 1 trains without the opponent (no collisions, no
/// lateral reward); stages 2..6 scale the footprints by 0.2 * (stage - 1).
struct CurriculumStage {
  int stage = 6;
  double k_scl = 1.0;
  bool opponent_active = true;
};
CurriculumStage curriculum_stage(int stage);

/// Server-side training scenario distribution and episode settings.
struct EnvServerConfig {
  ScenarioConfig base;
  double gap_min = 20.0, gap_max = 100.0;
  double offset_min = -6.0, offset_max = 6.0;
  std::vector<double> lookaheads{80.0};
  int max_steps = 400;
  bool safety_layer = false;
};

/// One training session: reset/step/close over single-line JSON messages.
class EnvSession {
 public:
  EnvSession(EnvServerConfig config, int default_stage);

  struct Reply {
    std::string text;
    bool close = false;
  };

  /// Handles one request line and returns the reply line (no newline).
  Reply handle(std::string_view line);

  const Episode* episode() const { return episode_.get(); }

 private:
  EnvServerConfig config_;
  int default_stage_;
  std::unique_ptr<Episode> episode_;
  RewardState reward_state_;
};

/// Runs one session over a pair of text streams.
void serve_stream(std::istream& in, std::ostream& out, EnvSession& session);

/// Serves one session on `endpoint`: "stdio" or "tcp://HOST:PORT".
void serve(const std::string& endpoint, const EnvServerConfig& config, int stage);

}  // namespace raceduel
