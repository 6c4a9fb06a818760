#include "raceduel/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "raceduel/safety_layer.hpp"

namespace raceduel {

PlannerSpec PlannerSpec::conventional(std::string_view preset) {
  const auto weights = find_preset(preset);
  if (!weights) throw std::invalid_argument("unknown cost preset '" + std::string(preset) + "'");
  PlannerSpec spec;
  spec.kind = PlannerKind::conventional;
  spec.name = std::string(preset);
  spec.weights = *weights;
  return spec;
}

PlannerSpec PlannerSpec::learned(std::shared_ptr<const PolicyWeights> policy, bool safety_layer) {
  PlannerSpec spec;
  spec.kind = PlannerKind::rl;
  spec.name = safety_layer ? "rl-sl" : "rl";
  spec.policy = std::move(policy);
  spec.safety_layer = safety_layer;
  return spec;
}

void ScenarioConfig::validate() const {
  track.validate();
  blocking.validate();
  sampling.validate();
  if (!(opponent_gap > 0.0)) throw std::invalid_argument("s_b,init must be positive");
  if (std::abs(opponent_offset) > drivable_left(track, geometry.width) + kBoundsTolerance) {
    throw std::invalid_argument("|n_b,init| exceeds the drivable half width");
  }
  if (!(initial_speed >= 0.0)) throw std::invalid_argument("v_init must be non-negative");
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (replan_interval < 1) throw std::invalid_argument("replan interval must be >= 1 step");
  if (replan_interval * dt > sampling.horizon + 1e-12) {
    throw std::invalid_argument("replan interval exceeds the planning horizon");
  }
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  if (!(footprint_scale > 0.0)) throw std::invalid_argument("footprint scale must be positive");
  if (noise.stddev < 0.0) throw std::invalid_argument("noise stddev must be >= 0");
  if (planner.kind == PlannerKind::rl && !planner.policy) {
    throw std::invalid_argument("learned planner requires policy weights");
  }
  if (planner.kind == PlannerKind::conventional) planner.weights.validate();
}

std::string_view to_string(EpisodeStatus status) {
  switch (status) {
    case EpisodeStatus::running: return "running";
    case EpisodeStatus::success: return "success";
    case EpisodeStatus::collision: return "collision";
    case EpisodeStatus::infeasible: return "infeasible";
    case EpisodeStatus::track_end: return "track_end";
  }
  return "unknown";
}

std::optional<EpisodeStatus> parse_status(std::string_view text) {
  for (auto s : {EpisodeStatus::running, EpisodeStatus::success, EpisodeStatus::collision,
                 EpisodeStatus::infeasible, EpisodeStatus::track_end}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

namespace {

struct Vec2 {
  double x, y;
};

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Half-extent of a rectangle projected onto a unit axis.
double projected_radius(Vec2 axis, Vec2 along, Vec2 across, const VehicleGeometry& g) {
  return 0.5 * g.length * std::abs(dot(axis, along)) + 0.5 * g.width * std::abs(dot(axis, across));
}

}  // namespace

bool check_collision(const Pose& a, const VehicleGeometry& ga, const Pose& b,
                     const VehicleGeometry& gb) {
  const Vec2 a_along{std::cos(a.heading), std::sin(a.heading)};
  const Vec2 a_across{-a_along.y, a_along.x};
  const Vec2 b_along{std::cos(b.heading), std::sin(b.heading)};
  const Vec2 b_across{-b_along.y, b_along.x};
  const Vec2 d{b.x - a.x, b.y - a.y};

  for (const Vec2& axis : std::array<Vec2, 4>{a_along, a_across, b_along, b_across}) {
    const double separation = std::abs(dot(d, axis));
    const double reach = projected_radius(axis, a_along, a_across, ga) +
                         projected_radius(axis, b_along, b_across, gb);
    if (separation > reach) return false;
  }
  return true;
}

bool check_success(double s_o, double s_b, const VehicleGeometry& geometry, double margin) {
  return s_o - s_b >= geometry.length + margin;
}

Episode::Episode(ScenarioConfig config)
    : config_(std::move(config)),
      controller_(config_.blocking),
      rng_(config_.noise.seed),
      noise_(config_.noise.mean, config_.noise.stddev > 0.0 ? config_.noise.stddev : 1.0) {
  config_.validate();
  ego_ = {0.0, config_.initial_speed, 0.0, 0.0, 0.0, 0.0};
  opponent_ = {config_.opponent_gap, config_.opponent_offset, 0.0, config_.initial_speed, 0.0};
}

MdpState Episode::observe() {
  double noise = 0.0;
  if (config_.noise.stddev > 0.0) {
    noise = noise_(rng_);
  } else {
    noise = config_.noise.mean;
  }
  const NormalizationConstants norms =
      config_.planner.policy ? config_.planner.policy->norms : NormalizationConstants{};
  return build_state(ego_, opponent_, config_.track, norms, noise);
}

bool Episode::replan_due() const {
  return !has_plan_ || steps_since_plan_ >= config_.replan_interval;
}

StepReport Episode::step() {
  if (done()) throw std::logic_error("episode already finished");
  StepReport carried;
  carried.end_state = last_end_;
  if (config_.planner.kind == PlannerKind::rl) {
    if (!replan_due()) return advance(active_curves_, carried);
    const MdpState obs = observe();
    const MdpAction action = forward(obs, *config_.planner.policy);
    return step_with_end_state(denormalize_action(action, config_.planner.policy->bounds),
                               config_.planner.safety_layer);
  }

  if (!replan_due()) return advance(active_curves_, carried);
  StepReport report;
  auto result = plan(ego_, opponent_, config_.track, config_.limits, config_.planner.weights,
                     config_.sampling);
  if (!result) {
    report.end_state = {std::nan(""), 0.0, 0.0, std::nan("")};
    return terminate_infeasible(report);
  }
  report.end_state = result->end_state;
  return advance(result->curves, report);
}

StepReport Episode::step_with_end_state(const EndState& end, bool safety_layer) {
  if (done()) throw std::logic_error("episode already finished");
  StepReport report;
  report.end_state = end;
  const CurvePair curves = connect(ego_, end, config_.sampling);
  const Trajectory traj =
      assemble(curves.lateral, curves.longitudinal, config_.track, config_.sampling.points);
  report.requested_verdict = check_all(traj, config_.track, config_.limits);
  if (report.requested_verdict.feasible) return advance(curves, report);
  if (!safety_layer) return terminate_infeasible(report);

  auto fallback = rescue(traj, ego_, config_.track, config_.limits, config_.sampling);
  if (!fallback) return terminate_infeasible(report);
  report.safety_engaged = true;
  report.end_state = fallback->end_state;
  return advance(fallback->curves, report);
}

StepReport Episode::terminate_infeasible(StepReport report) {
  status_ = EpisodeStatus::infeasible;
  report.status = status_;
  record(report);
  return report;
}

StepReport Episode::advance(const CurvePair& curves, StepReport report) {
  if (&curves != &active_curves_) {
    active_curves_ = curves;
    last_end_ = report.end_state;
    has_plan_ = true;
    steps_since_plan_ = 0;
  }
  const FrenetState ego_before = ego_;
  ego_ = active_curves_.state_at((steps_since_plan_ + 1) * config_.dt);
  opponent_ =
      controller_.advance(opponent_, ego_before.n, ego_before.n_dot, config_.dt, config_.track);
  ++steps_;
  ++steps_since_plan_;

  const VehicleGeometry scaled{config_.geometry.length * config_.footprint_scale,
                               config_.geometry.width * config_.footprint_scale};
  const CartesianPoint ego_xy = to_cartesian(config_.track, ego_.s, ego_.n);
  const CartesianPoint opp_xy = to_cartesian(config_.track, opponent_.s, opponent_.n);
  const Pose ego_pose{ego_xy.x, ego_xy.y,
                      config_.track.reference_heading(ego_.s) + ego_.heading()};
  const Pose opp_pose{opp_xy.x, opp_xy.y,
                      config_.track.reference_heading(opponent_.s) + opponent_.chi};

  if (config_.collisions && check_collision(ego_pose, scaled, opp_pose, scaled)) {
    status_ = EpisodeStatus::collision;
  } else if (check_success(ego_.s, opponent_.s, config_.geometry, config_.success_margin)) {
    status_ = EpisodeStatus::success;
  } else if (ego_.s + config_.sampling.v_max * config_.sampling.horizon >= config_.track.length ||
             steps_ >= config_.max_steps) {
    status_ = EpisodeStatus::track_end;
  }
  report.status = status_;
  record(report);
  return report;
}

void Episode::record(const StepReport& report) {
  TraceRow row;
  row.time = time();
  row.s_o = ego_.s;
  row.n_o = ego_.n;
  row.v_o = ego_.speed();
  row.s_b = opponent_.s;
  row.n_b = opponent_.n;
  row.chi_b = opponent_.chi;
  row.v_b = opponent_.v;
  row.end_n = report.end_state.n;
  row.end_sdot = report.end_state.s_dot;
  row.safety_engaged = report.safety_engaged;
  row.status = status_;
  trace_.push_back(row);
}

EpisodeOutcome run_episode(const ScenarioConfig& config) {
  Episode episode(config);
  while (!episode.done()) episode.step();
  return episode.outcome();
}

void write_trace_csv(std::ostream& out, const EpisodeOutcome& outcome) {
  out << kTraceHeader << '\n';
  char buf[512];
  for (const TraceRow& r : outcome.trace) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d,",
                  r.time, r.s_o, r.n_o, r.v_o, r.s_b, r.n_b, r.chi_b, r.v_b, r.end_n, r.end_sdot,
                  r.safety_engaged ? 1 : 0);
    out << buf << to_string(r.status) << '\n';
  }
}

void save_trace_csv(const std::string& path, const EpisodeOutcome& outcome) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace " + path);
  write_trace_csv(out, outcome);
}

EpisodeStatus read_trace_status(std::istream& in) {
  std::string line;
  std::string last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  const auto comma = last.rfind(',');
  if (comma == std::string::npos) throw std::runtime_error("trace has no data rows");
  const auto status = parse_status(std::string_view(last).substr(comma + 1));
  if (!status) throw std::runtime_error("trace has an unknown status: " + last);
  return *status;
}

}  // namespace raceduel
