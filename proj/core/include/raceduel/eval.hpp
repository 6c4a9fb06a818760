#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "raceduel/sim.hpp"

namespace raceduel {

/// Initialization grid of the blocking vehicle.
struct EvaluationGrid {
  std::vector<double> gaps;        // s_b,init
  std::vector<double> offsets;     // n_b,init
  std::vector<double> lookaheads;  // s_d
  double initial_speed = 50.0;

  /// 41 gaps x 7 offsets x 6 lookaheads = 1722 configurations.
  static EvaluationGrid standard();

  std::size_t size() const { return gaps.size() * offsets.size() * lookaheads.size(); }
  std::size_t per_lookahead() const { return gaps.size() * offsets.size(); }
};

/// Episode counts for one (variant, s_d) cell.
struct RateRow {
  std::string variant;
  double lookahead = 0.0;
  int success = 0;
  int collision = 0;
  int infeasible = 0;
  int track_end = 0;
  int episodes = 0;

  void add(EpisodeStatus status);
  int count(EpisodeStatus status) const;
  /// Percentage of episodes ending with `status`.
  double rate(EpisodeStatus status) const;
};

struct SuccessReport {
  std::vector<RateRow> rows;

  const RateRow* find(const std::string& variant, double lookahead) const;
  std::vector<std::string> variants() const;
};

struct EvaluationOptions {
  int jobs = 1;
  std::uint64_t master_seed = 0;
  /// When non-empty, one trace CSV per episode is written here.
  std::string trace_dir;
};

/// Stable per-episode seed from the master seed and grid coordinates.
std::uint64_t episode_seed(std::uint64_t master_seed, std::size_t gap_index,
                           std::size_t offset_index, std::size_t lookahead_index);

/// File name of an episode trace inside EvaluationOptions::trace_dir.
std::string trace_file_name(const std::string& variant, std::size_t gap_index,
                            std::size_t offset_index, std::size_t lookahead_index);

/// Runs every grid configuration with `base` (its planner defines the
/// variant) and aggregates terminal statuses per s_d.
SuccessReport evaluate(const ScenarioConfig& base, const EvaluationGrid& grid,
                       const EvaluationOptions& options);

/// The same noisy learned-planner evaluation with the safety layer off and on.
struct NoiseStudy {
  SuccessReport without_safety;
  SuccessReport with_safety;
};

NoiseStudy noise_study(const ScenarioConfig& base, std::shared_ptr<const PolicyWeights> policy,
                       double sigma, const EvaluationGrid& grid, const EvaluationOptions& options);

inline constexpr std::string_view kReportHeader =
    "variant,s_d,success,collision,infeasible,track_end,episodes";

void write_report_csv(std::ostream& out, const SuccessReport& report);
SuccessReport read_report_csv(std::istream& in);
void save_report_csv(const std::string& path, const SuccessReport& report);
SuccessReport load_report_csv(const std::string& path);

/// Success-rate (and, when present, infeasibility-rate) curves over s_d.
void write_report_svg(std::ostream& out, const SuccessReport& report, const std::string& title,
                      bool include_infeasibility);

/// Writes <dir>/<stem>.csv and one <dir>/<stem>_<variant>.svg per variant
/// plus a combined <dir>/<stem>.svg. Returns the written paths.
std::vector<std::string> emit(const SuccessReport& report, const std::string& dir,
                              const std::string& stem, bool include_infeasibility = false);

}  // namespace raceduel
