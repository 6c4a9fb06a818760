#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "raceduel/conventional_planner.hpp"
#include "raceduel/rl_policy.hpp"
#include "raceduel/safety_layer.hpp"
#include "raceduel/sim.hpp"

using namespace raceduel;

namespace {

PolicyWeights random_policy() {
  auto w = PolicyWeights::zeros(std::array<std::size_t, 4>{12, 256, 256, 4});
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 0.05);
  for (auto& l : w.layers) {
    for (double& x : l.weights) x = g(rng);
  }
  return w;
}

void BM_SolveQuintic(benchmark::State& state) {
  double n = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_quintic({n, 1.0, 0.0}, {3.0, 0.0, 0.0}, 2.5));
    n += 1e-6;
  }
}
BENCHMARK(BM_SolveQuintic);

void BM_Plan(benchmark::State& state) {
  const TrackModel track;
  const FeasibilityLimits limits;
  const SamplingConfig cfg;
  const auto w = *find_preset("small-ch");
  const FrenetState ego{0, 55, 2, 0.5, 1.0, 0};
  const CurvilinearState opp{30, 1.0, 0.02, 50, 0.01};
  for (auto _ : state) benchmark::DoNotOptimize(plan(ego, opp, track, limits, w, cfg));
}
BENCHMARK(BM_Plan)->Unit(benchmark::kMillisecond);

void BM_Rescue(benchmark::State& state) {
  const TrackModel track;
  const FeasibilityLimits limits;
  const SamplingConfig cfg;
  const FrenetState ego{0, 55, 2, 3.0, 1.0, 0};
  const auto curves = connect(ego, {7.2, 0, 0, 60}, cfg);
  const auto traj = assemble(curves.lateral, curves.longitudinal, track, cfg.points);
  for (auto _ : state) benchmark::DoNotOptimize(rescue(traj, ego, track, limits, cfg));
}
BENCHMARK(BM_Rescue)->Unit(benchmark::kMillisecond);

void BM_Forward(benchmark::State& state) {
  const auto w = random_policy();
  MdpState s;
  s.values.fill(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(forward(s, w));
}
BENCHMARK(BM_Forward)->Unit(benchmark::kMicrosecond);

void BM_ConventionalEpisode(benchmark::State& state) {
  ScenarioConfig sc;
  sc.opponent_gap = 40.0;
  sc.opponent_offset = 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(sc));
}
BENCHMARK(BM_ConventionalEpisode)->Unit(benchmark::kMillisecond);

void BM_LearnedEpisode(benchmark::State& state) {
  ScenarioConfig sc;
  sc.opponent_gap = 40.0;
  sc.planner = PlannerSpec::learned(std::make_shared<const PolicyWeights>(random_policy()), true);
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(sc));
}
BENCHMARK(BM_LearnedEpisode)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
