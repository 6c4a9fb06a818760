#include "raceduel/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace raceduel {

EvaluationGrid EvaluationGrid::standard() {
  EvaluationGrid g;
  for (int gap = 20; gap <= 100; gap += 2) g.gaps.push_back(gap);
  for (int off = -6; off <= 6; off += 2) g.offsets.push_back(off);
  for (int sd = 40; sd <= 140; sd += 20) g.lookaheads.push_back(sd);
  return g;
}

void RateRow::add(EpisodeStatus status) {
  switch (status) {
    case EpisodeStatus::success: ++success; break;
    case EpisodeStatus::collision: ++collision; break;
    case EpisodeStatus::infeasible: ++infeasible; break;
    case EpisodeStatus::track_end: ++track_end; break;
    case EpisodeStatus::running: throw std::logic_error("episode did not terminate");
  }
  ++episodes;
}

int RateRow::count(EpisodeStatus status) const {
  switch (status) {
    case EpisodeStatus::success: return success;
    case EpisodeStatus::collision: return collision;
    case EpisodeStatus::infeasible: return infeasible;
    case EpisodeStatus::track_end: return track_end;
    case EpisodeStatus::running: return 0;
  }
  return 0;
}

double RateRow::rate(EpisodeStatus status) const {
  return episodes > 0 ? 100.0 * count(status) / episodes : 0.0;
}

const RateRow* SuccessReport::find(const std::string& variant, double lookahead) const {
  for (const auto& r : rows) {
    if (r.variant == variant && r.lookahead == lookahead) return &r;
  }
  return nullptr;
}

std::vector<std::string> SuccessReport::variants() const {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    if (std::find(out.begin(), out.end(), r.variant) == out.end()) out.push_back(r.variant);
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t episode_seed(std::uint64_t master_seed, std::size_t gap_index,
                           std::size_t offset_index, std::size_t lookahead_index) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ gap_index);
  h = splitmix64(h ^ (offset_index << 20));
  h = splitmix64(h ^ (lookahead_index << 40));
  return h;
}

std::string trace_file_name(const std::string& variant, std::size_t gap_index,
                            std::size_t offset_index, std::size_t lookahead_index) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "_sd%02zu_gap%02zu_off%02zu.csv", lookahead_index, gap_index,
                offset_index);
  return variant + buf;
}

SuccessReport evaluate(const ScenarioConfig& base, const EvaluationGrid& grid,
                       const EvaluationOptions& options) {
  struct Job {
    std::size_t gap, offset, lookahead;
  };
  std::vector<Job> jobs;
  jobs.reserve(grid.size());
  for (std::size_t l = 0; l < grid.lookaheads.size(); ++l) {
    for (std::size_t g = 0; g < grid.gaps.size(); ++g) {
      for (std::size_t o = 0; o < grid.offsets.size(); ++o) jobs.push_back({g, o, l});
    }
  }
  if (!options.trace_dir.empty()) std::filesystem::create_directories(options.trace_dir);

  std::vector<EpisodeStatus> statuses(jobs.size(), EpisodeStatus::running);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      try {
        ScenarioConfig cfg = base;
        cfg.opponent_gap = grid.gaps[job.gap];
        cfg.opponent_offset = grid.offsets[job.offset];
        cfg.blocking.lookahead = grid.lookaheads[job.lookahead];
        cfg.initial_speed = grid.initial_speed;
        cfg.noise.seed =
            episode_seed(options.master_seed, job.gap, job.offset, job.lookahead);
        const EpisodeOutcome outcome = run_episode(cfg);
        statuses[i] = outcome.status;
        if (!options.trace_dir.empty()) {
          save_trace_csv((std::filesystem::path(options.trace_dir) /
                          trace_file_name(base.planner.name, job.gap, job.offset, job.lookahead))
                             .string(),
                         outcome);
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = jobs.size();
        return;
      }
    }
  };

  const int n_threads = std::max(1, options.jobs);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  SuccessReport report;
  for (double sd : grid.lookaheads) report.rows.push_back({base.planner.name, sd});
  for (std::size_t i = 0; i < jobs.size(); ++i) report.rows[jobs[i].lookahead].add(statuses[i]);
  return report;
}

NoiseStudy noise_study(const ScenarioConfig& base, std::shared_ptr<const PolicyWeights> policy,
                       double sigma, const EvaluationGrid& grid, const EvaluationOptions& options) {
  if (sigma < 0.0) throw std::invalid_argument("noise sigma must be >= 0");
  ScenarioConfig cfg = base;
  cfg.noise.mean = 0.0;
  cfg.noise.stddev = sigma;

  NoiseStudy study;
  cfg.planner = PlannerSpec::learned(policy, false);
  study.without_safety = evaluate(cfg, grid, options);
  cfg.planner = PlannerSpec::learned(policy, true);
  study.with_safety = evaluate(cfg, grid, options);
  return study;
}

void write_report_csv(std::ostream& out, const SuccessReport& report) {
  out << kReportHeader << '\n';
  char buf[256];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, ",%g,%.10f,%.10f,%.10f,%.10f,%d", r.lookahead,
                  r.rate(EpisodeStatus::success), r.rate(EpisodeStatus::collision),
                  r.rate(EpisodeStatus::infeasible), r.rate(EpisodeStatus::track_end), r.episodes);
    out << r.variant << buf << '\n';
  }
}

SuccessReport read_report_csv(std::istream& in) {
  SuccessReport report;
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) {
    throw std::runtime_error("report CSV has an unexpected header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw std::runtime_error("report CSV row has wrong arity: " + line);
    RateRow r;
    r.variant = cells[0];
    r.lookahead = std::stod(cells[1]);
    r.episodes = std::stoi(cells[6]);
    const auto to_count = [&](const std::string& pct) {
      return static_cast<int>(std::lround(std::stod(pct) * r.episodes / 100.0));
    };
    r.success = to_count(cells[2]);
    r.collision = to_count(cells[3]);
    r.infeasible = to_count(cells[4]);
    r.track_end = to_count(cells[5]);
    report.rows.push_back(r);
  }
  return report;
}

void save_report_csv(const std::string& path, const SuccessReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report " + path);
  write_report_csv(out, report);
}

SuccessReport load_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report " + path);
  return read_report_csv(in);
}

namespace {

const char* const kPalette[] = {"#0065bd", "#e37222", "#a2ad00", "#7f3f98", "#00a19a", "#c4071b"};

}  // namespace

void write_report_svg(std::ostream& out, const SuccessReport& report, const std::string& title,
                      bool include_infeasibility) {
  constexpr double width = 640, height = 400, left = 60, right = 180, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double x_min = 35, x_max = 145, y_min = -5, y_max = 105;
  const auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  const auto py = [&](double y) { return top + (y_max - y) / (y_max - y_min) * plot_h; };

  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
  for (int y = 0; y <= 100; y += 25) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#b0b0b0\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%d</text>\n",
                  px(x_min), py(y), px(x_max), py(y), left - 6, py(y) + 4, y);
    out << buf;
  }
  for (int x = 40; x <= 140; x += 20) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#b0b0b0\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%d</text>\n",
                  px(x), py(y_min), px(x), py(y_max), px(x), py(y_min) + 18, x);
    out << buf;
  }
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 8
      << "\" text-anchor=\"middle\">s_d</text>\n";
  out << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 16 "
      << top + plot_h / 2 << ")\" text-anchor=\"middle\">rate in %</text>\n";

  int series = 0;
  const auto draw = [&](const std::string& variant, EpisodeStatus status, bool dashed,
                        const char* color, const std::string& label) {
    std::string points;
    for (const auto& r : report.rows) {
      if (r.variant != variant) continue;
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(r.lookahead), py(r.rate(status)));
      points += buf;
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\""
        << (dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << points << "\"/>\n";
    const double ly = top + 14 + 18 * series;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                  "stroke-width=\"2\"%s/>",
                  width - right + 10, ly, width - right + 34, ly, color,
                  dashed ? " stroke-dasharray=\"6,4\"" : "");
    out << buf << "<text x=\"" << width - right + 40 << "\" y=\"" << ly + 4 << "\">" << label
        << "</text>\n";
    ++series;
  };

  int color = 0;
  for (const auto& variant : report.variants()) {
    const char* c = kPalette[color++ % 6];
    draw(variant, EpisodeStatus::success, false, c, variant + " success");
    if (include_infeasibility) {
      draw(variant, EpisodeStatus::infeasible, true, c, variant + " infeasible");
    }
  }
  out << "</svg>\n";
}

std::vector<std::string> emit(const SuccessReport& report, const std::string& dir,
                              const std::string& stem, bool include_infeasibility) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> written;

  const std::string csv = (fs::path(dir) / (stem + ".csv")).string();
  save_report_csv(csv, report);
  written.push_back(csv);

  const auto write_svg = [&](const std::string& path, const SuccessReport& r,
                             const std::string& title) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write plot " + path);
    write_report_svg(out, r, title, include_infeasibility);
    written.push_back(path);
  };
  write_svg((fs::path(dir) / (stem + ".svg")).string(), report, stem);
  for (const auto& variant : report.variants()) {
    SuccessReport single;
    for (const auto& r : report.rows) {
      if (r.variant == variant) single.rows.push_back(r);
    }
    write_svg((fs::path(dir) / (stem + "_" + variant + ".svg")).string(), single, variant);
  }
  return written;
}

}  // namespace raceduel
