#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "rs/channel.hpp"
#include "rs/evaluator.hpp"
#include "rs/metrics.hpp"
#include "rs/optimizer.hpp"
#include "rs/scenario.hpp"

namespace rs {

// One master seed fixes the physics: deployment, channel statistics and the
// data realization all strategies are scored on.
struct SimulationSetup {
  Deployment deployment;
  ChannelStatistics stats;
  ChannelRealization realization;
};

SimulationSetup build_simulation(const ScenarioConfig& cfg);

struct StrategyAggregate {
  Strategy strategy = Strategy::kCmrc;
  std::vector<RunTrace> attempts;
  // Per RA loop across attempts; shorter traces are padded with their last
  // value before averaging.
  std::vector<double> mean_trace;
  std::vector<double> best_trace;
  std::vector<double> worst_trace;
  // Matrix of the best attempt, and the network sum SE it achieves.
  SelectionMatrix best;
  double best_value = 0.0;
  CostReport cost;
};

struct ExperimentResult {
  ScenarioConfig config;
  std::vector<StrategyAggregate> strategies;
};

// First RA loop (1-based) from which the trace stays within rel_tol of its
// final value; 0 for an empty trace.
int loops_to_convergence(const std::vector<double>& trace,
                         double rel_tol = 1e-3);

// Runs every configured strategy over cfg.attempts GA attempts with derived
// sub-seeds, all on the shared realization. An optional warm matrix seeds
// each attempt's initial population.
ExperimentResult run_experiment(
    const ScenarioConfig& cfg,
    const std::optional<SelectionMatrix>& warm = std::nullopt);

// Writes convergence.csv, one best_D_<strategy>.txt per strategy and
// summary.txt into out_dir (created if missing). Everything except the
// timing lines of summary.txt is byte-deterministic for a fixed config.
void emit_outputs(const ExperimentResult& result,
                  const std::filesystem::path& out_dir);

}  // namespace rs
