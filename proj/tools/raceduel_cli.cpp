// raceduel: run single duels, grid evaluations, the noise study, the
// training environment server and plot regeneration.

#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "raceduel/config.hpp"
#include "raceduel/env_server.hpp"
#include "raceduel/eval.hpp"
#include "raceduel/sim.hpp"

namespace fs = std::filesystem;
using namespace raceduel;

namespace {

RunConfig base_config(const std::string& path) {
  if (path.empty()) return RunConfig{};
  return load_run_config(path);
}

int default_jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

void print_report(const SuccessReport& report) {
  write_report_csv(std::cout, report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-vehicle overtaking duel simulator"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run one episode from a scenario file");
  std::string scenario_path;
  std::string trace_path;
  sim->add_option("--scenario", scenario_path, "Scenario/config file (INI)")->required();
  sim->add_option("--trace", trace_path, "Write the per-step trace CSV here");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Run the evaluation grid for one planner variant");
  std::string variant;
  std::string out_dir;
  std::string config_path;
  std::string weights_path;
  std::string trace_dir;
  int jobs = default_jobs();
  std::uint64_t seed = 0;
  ev->add_option("--variant", variant,
                 "small-ch|small-clp|medium-ch|medium-clp|large-ch|large-clp|rl|rl-sl|custom preset")
      ->required();
  ev->add_option("--out", out_dir, "Output directory")->required();
  ev->add_option("--jobs", jobs, "Worker threads");
  ev->add_option("--seed", seed, "Master seed");
  ev->add_option("--config", config_path, "Config file (INI)");
  ev->add_option("--weights", weights_path, "Policy weights (rl variants)");
  ev->add_option("--traces", trace_dir, "Directory for per-episode trace CSVs");

  // noise-study
  auto* ns = app.add_subcommand("noise-study", "Learned planner with observation noise, SL off/on");
  double sigma = 0.7;
  ns->add_option("--weights", weights_path, "Policy weights")->required();
  ns->add_option("--sigma", sigma, "Std. deviation of the opponent speed noise [m/s]");
  ns->add_option("--out", out_dir, "Output directory")->required();
  ns->add_option("--jobs", jobs, "Worker threads");
  ns->add_option("--seed", seed, "Master seed");
  ns->add_option("--config", config_path, "Config file (INI)");

  // serve-env
  auto* se = app.add_subcommand("serve-env", "Serve the training environment protocol");
  std::string endpoint = "stdio";
  int stage = 6;
  std::string lookaheads = "80";
  bool env_safety = false;
  int env_max_steps = 400;
  se->add_option("--endpoint", endpoint, "stdio or tcp://HOST:PORT");
  se->add_option("--stage", stage, "Default curriculum stage (1..6)");
  se->add_option("--sd", lookaheads, "Training lookahead set, e.g. 80 or 40,80,120");
  se->add_option("--config", config_path, "Config file (INI)");
  se->add_option("--max-steps", env_max_steps, "Episode step cap");
  se->add_flag("--safety-layer", env_safety, "Apply the safety layer during training");

  // plot
  auto* pl = app.add_subcommand("plot", "Regenerate plots from report CSVs");
  std::string in_dir;
  pl->add_option("--in", in_dir, "Directory with report CSVs")->required();
  pl->add_option("--out", out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      const RunConfig rc = load_run_config(scenario_path);
      const EpisodeOutcome outcome = run_episode(rc.scenario);
      if (!trace_path.empty()) save_trace_csv(trace_path, outcome);
      const auto& last = outcome.trace.back();
      std::cout << "status=" << to_string(outcome.status) << " steps=" << outcome.steps
                << " time=" << last.time << " s_o=" << last.s_o << " s_b=" << last.s_b << '\n';
      return 0;
    }

    if (ev->parsed()) {
      RunConfig rc = base_config(config_path);
      ScenarioConfig base = rc.scenario;
      base.noise = {};
      if (variant == "rl" || variant == "rl-sl") {
        const std::string path = weights_path.empty() ? rc.policy_path : weights_path;
        if (path.empty()) throw std::invalid_argument("rl variants need --weights");
        base.planner = PlannerSpec::learned(
            std::make_shared<const PolicyWeights>(PolicyWeights::load(path)), variant == "rl-sl");
      } else {
        base.planner = conventional_planner(rc, variant);
      }
      const SuccessReport report = evaluate(base, rc.grid, {jobs, seed, trace_dir});
      for (const auto& p : emit(report, out_dir, variant)) std::cerr << "wrote " << p << '\n';
      print_report(report);
      return 0;
    }

    if (ns->parsed()) {
      const RunConfig rc = base_config(config_path);
      auto policy = std::make_shared<const PolicyWeights>(PolicyWeights::load(weights_path));
      const NoiseStudy study = noise_study(rc.scenario, policy, sigma, rc.grid, {jobs, seed, {}});
      SuccessReport combined = study.without_safety;
      combined.rows.insert(combined.rows.end(), study.with_safety.rows.begin(),
                           study.with_safety.rows.end());
      for (const auto& p : emit(combined, out_dir, "noise_study", true)) {
        std::cerr << "wrote " << p << '\n';
      }
      print_report(combined);
      return 0;
    }

    if (se->parsed()) {
      const RunConfig rc = base_config(config_path);
      EnvServerConfig cfg;
      cfg.base = rc.scenario;
      cfg.lookaheads = parse_value_list(lookaheads);
      cfg.max_steps = env_max_steps;
      cfg.safety_layer = env_safety;
      serve(endpoint, cfg, stage);
      return 0;
    }

    if (pl->parsed()) {
      fs::create_directories(out_dir);
      int count = 0;
      for (const auto& entry : fs::directory_iterator(in_dir)) {
        if (entry.path().extension() != ".csv") continue;
        SuccessReport report;
        try {
          report = load_report_csv(entry.path().string());
        } catch (const std::exception&) {
          continue;  // not a report (e.g. a trace)
        }
        const std::string stem = entry.path().stem().string();
        bool has_infeasible = false;
        for (const auto& r : report.rows) has_infeasible |= r.infeasible > 0;
        for (const auto& p : emit(report, out_dir, stem, has_infeasible)) {
          std::cerr << "wrote " << p << '\n';
        }
        ++count;
      }
      if (count == 0) {
        std::cerr << "no report CSVs found in " << in_dir << '\n';
        return 1;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
