#include "fastfrechet/datagen.hpp"
#include "fastfrechet/frechet.hpp"
#include "fastfrechet/friso.hpp"
#include "fastfrechet/io.hpp"
#include "fastfrechet/monotone_qp.hpp"
#include "fastfrechet/random.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace fastfrechet;

namespace {

const SimulatedData& simulation() {
  static const SimulatedData sim = generate_zinbinom_qf(100, 100, 10, 1);
  return sim;
}

Vector noisy_ramp(std::size_t m, RandomStream& rng) {
  Vector a(static_cast<Eigen::Index>(m));
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    a[k] = static_cast<double>(k) / static_cast<double>(m) + 0.3 * rng.normal();
  }
  return a;
}

void BM_ProjectCold(benchmark::State& state) {
  RandomStream rng(1, 0);
  const Vector a = noisy_ramp(static_cast<std::size_t>(state.range(0)), rng);
  const SupportBounds bounds(0.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_monotone(a, bounds));
  }
}
BENCHMARK(BM_ProjectCold)->RangeMultiplier(4)->Range(16, 4096);

// Warm start from the solution of a slightly perturbed input, the situation
// inside successive descent iterates.
void BM_ProjectWarm(benchmark::State& state) {
  RandomStream rng(1, 0);
  const auto m = static_cast<std::size_t>(state.range(0));
  const Vector a = noisy_ramp(m, rng);
  Vector nearby = a;
  for (auto& v : nearby) {
    v += 1e-3 * rng.normal();
  }
  const SupportBounds bounds(0.0, 1.0);
  const ActiveSet warm = project_monotone(nearby, bounds).active;
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_monotone(a, bounds, &warm));
  }
}
BENCHMARK(BM_ProjectWarm)->RangeMultiplier(4)->Range(16, 4096);

void BM_PavaClip(benchmark::State& state) {
  RandomStream rng(1, 0);
  const Vector a = noisy_ramp(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pava_clip_oracle(a, {0.0, 1.0}));
  }
}
BENCHMARK(BM_PavaClip)->RangeMultiplier(4)->Range(16, 4096);

void BM_FitFrechet(benchmark::State& state) {
  const auto& sim = simulation();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_frechet(sim.X, sim.Y, {0.0, kInf}));
  }
}
BENCHMARK(BM_FitFrechet)->Unit(benchmark::kMillisecond);

void BM_SolveFriso(benchmark::State& state) {
  const auto& sim = simulation();
  const FrisoProblem problem(sim.X, sim.Y, {0.0, kInf});
  DescentConfig config;
  config.epsilon = state.range(0) == 0 ? 1e-6 : 0.014;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_friso(problem, 5.0, config));
  }
  state.SetLabel(state.range(0) == 0 ? "epsilon=1e-6" : "epsilon=0.014");
}
BENCHMARK(BM_SolveFriso)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SolutionPath(benchmark::State& state) {
  const auto& sim = simulation();
  const FrisoProblem problem(sim.X, sim.Y, {0.0, kInf});
  const std::vector<double> grid = parse_tau_grid("0.5:10:0.5");
  const bool warm = state.range(0) == 1;
  std::size_t qp = 0;
  for (auto _ : state) {
    const PathResult path = solution_path(problem, grid, {}, warm);
    qp = path.qp_iterations;
    benchmark::DoNotOptimize(path.lambda.data());
  }
  state.counters["qp_changes"] = static_cast<double>(qp);
  state.SetLabel(warm ? "warm" : "cold");
}
BENCHMARK(BM_SolutionPath)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
