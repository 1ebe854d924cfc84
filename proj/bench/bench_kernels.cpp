// Compares the workspace evaluator kernels against the plain sequential
// detection reference, and serial against OpenMP population scoring.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "rs/channel.hpp"
#include "rs/detection.hpp"
#include "rs/evaluator.hpp"
#include "rs/geometry.hpp"
#include "rs/parallel.hpp"
#include "rs/rng.hpp"
#include "rs/selection.hpp"

namespace {

// Scenario 1 dimensions: 10 UEs, 12 APs with 4 antennas, 8 pilots.
constexpr int kUes = 10;
constexpr int kAps = 12;
constexpr int kAntennas = 4;

rs::ChannelRealization make_channel(std::uint64_t seed) {
  rs::GeometryParams geo;
  geo.num_ues = kUes;
  geo.num_aps = kAps;
  geo.num_antennas = kAntennas;
  rs::ChannelParams radio;
  radio.tau_p = 8;
  rs::Rng geo_rng = rs::make_rng(seed, 1);
  const rs::Deployment dep = rs::build_deployment(geo, geo_rng);
  rs::Rng stat_rng = rs::make_rng(seed, 2);
  const rs::ChannelStatistics stats = rs::build_statistics(dep, radio, stat_rng);
  rs::Rng chan_rng = rs::make_rng(seed, 3);
  return rs::make_realization(stats, chan_rng);
}

rs::SelectionMatrix make_matrix(std::uint64_t seed) {
  rs::Rng rng = rs::make_rng(seed, 0);
  return rs::SelectionMatrix::random(kUes, kAps, kAntennas, rng);
}

void bm_mrc_kernel(benchmark::State& state) {
  const rs::ChannelRealization chan = make_channel(1);
  const rs::SumSeEvaluator eval(chan);
  auto ws = eval.make_workspace();
  const rs::SelectionMatrix d = make_matrix(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval.mrc_sum_se(
        d, kAps, rs::SumSeEvaluator::Purpose::kReporting, ws));
  }
}

void bm_mrc_reference(benchmark::State& state) {
  const rs::ChannelRealization chan = make_channel(1);
  const rs::SelectionMatrix d = make_matrix(2);
  for (auto _ : state) {
    const rs::DetectionState det =
        rs::run_sequential_detection(chan, d, rs::CombiningScheme::kMrc);
    benchmark::DoNotOptimize(rs::sum_se(det, chan, kAps));
  }
}

void bm_oslp_kernel(benchmark::State& state) {
  const rs::ChannelRealization chan = make_channel(1);
  const rs::SumSeEvaluator eval(chan);
  auto ws = eval.make_workspace();
  const rs::SelectionMatrix d = make_matrix(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        eval.oslp_sum_se(d, rs::SumSeEvaluator::Purpose::kReporting, ws));
  }
}

void bm_oslp_reference(benchmark::State& state) {
  const rs::ChannelRealization chan = make_channel(1);
  const rs::SelectionMatrix d = make_matrix(2);
  for (auto _ : state) {
    const rs::DetectionState det =
        rs::run_sequential_detection(chan, d, rs::CombiningScheme::kOslp);
    benchmark::DoNotOptimize(rs::sum_se(det, chan, kAps));
  }
}

void score_population(benchmark::State& state, bool parallel) {
  const rs::ChannelRealization chan = make_channel(1);
  const rs::SumSeEvaluator eval(chan);
  std::vector<rs::SelectionMatrix> population;
  rs::Rng rng = rs::make_rng(3, 0);
  for (int i = 0; i < 100; ++i) {
    population.push_back(rs::SelectionMatrix::random(kUes, kAps, kAntennas, rng));
  }
  std::vector<decltype(eval.make_workspace())> workspaces;
  for (int i = 0; i < rs::max_threads(); ++i) {
    workspaces.push_back(eval.make_workspace());
  }
  std::vector<double> fitness(population.size(), 0.0);
  for (auto _ : state) {
    rs::for_each_index(population.size(), parallel, [&](std::size_t i) {
      fitness[i] = eval.mrc_sum_se(population[i], kAps,
                                   rs::SumSeEvaluator::Purpose::kObjective,
                                   workspaces[rs::thread_index()]);
    });
    benchmark::DoNotOptimize(fitness.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(population.size()));
}

void bm_population_serial(benchmark::State& state) {
  score_population(state, false);
}

void bm_population_openmp(benchmark::State& state) {
  score_population(state, true);
}

}  // namespace

BENCHMARK(bm_mrc_kernel);
BENCHMARK(bm_mrc_reference);
BENCHMARK(bm_oslp_kernel);
BENCHMARK(bm_oslp_reference);
BENCHMARK(bm_population_serial);
BENCHMARK(bm_population_openmp);

BENCHMARK_MAIN();
