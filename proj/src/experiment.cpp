#include "rs/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace rs {

SimulationSetup build_simulation(const ScenarioConfig& cfg) {
  cfg.validate();
  SimulationSetup out;
  Rng dep_rng = make_rng(cfg.seed, kStreamDeployment);
  out.deployment = build_deployment(cfg.effective_geometry(), dep_rng);
  Rng stat_rng = make_rng(cfg.seed, kStreamStatistics);
  out.stats = build_statistics(out.deployment, cfg.radio, stat_rng);
  Rng real_rng = make_rng(cfg.seed, kStreamRealization);
  out.realization = make_realization(out.stats, real_rng);
  return out;
}

int loops_to_convergence(const std::vector<double>& trace, double rel_tol) {
  if (trace.empty()) return 0;
  const double final_v = trace.back();
  const double tol = rel_tol * std::abs(final_v);
  int idx = static_cast<int>(trace.size());
  while (idx > 1 && std::abs(trace[idx - 2] - final_v) <= tol) --idx;
  return idx;
}

namespace {

double padded(const std::vector<double>& trace, std::size_t t) {
  if (trace.empty()) return 0.0;
  return t < trace.size() ? trace[t] : trace.back();
}

void aggregate(StrategyAggregate& agg, const ScenarioConfig& cfg) {
  const Strategy s = agg.strategy;
  std::size_t len = 0;
  for (const RunTrace& run : agg.attempts) {
    len = std::max(len, run.network_sum_se.size());
  }
  agg.mean_trace.resize(len);
  agg.best_trace.resize(len);
  agg.worst_trace.resize(len);
  for (std::size_t t = 0; t < len; ++t) {
    double sum = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    for (const RunTrace& run : agg.attempts) {
      const double v = padded(run.network_sum_se, t);
      sum += v;
      best = std::max(best, v);
      worst = std::min(worst, v);
    }
    agg.mean_trace[t] = sum / static_cast<double>(agg.attempts.size());
    agg.best_trace[t] = best;
    agg.worst_trace[t] = worst;
  }

  agg.best_value = -std::numeric_limits<double>::infinity();
  double final_sum = 0.0;
  double iter_sum = 0.0;
  std::uint64_t iter_max = 0;
  double ops_sum = 0.0;
  double tally_sum = 0.0;
  double sec_per_loop_sum = 0.0;
  for (const RunTrace& run : agg.attempts) {
    const double achieved =
        run.network_sum_se.empty()
            ? 0.0
            : *std::max_element(run.network_sum_se.begin(),
                                run.network_sum_se.end());
    if (achieved > agg.best_value) {
      agg.best_value = achieved;
      agg.best = run.best;
    }
    final_sum += achieved;
    iter_sum += run.generations;
    iter_max = std::max(iter_max, static_cast<std::uint64_t>(run.generations));
    ops_sum += static_cast<double>(run.closed_form_ops);
    tally_sum += static_cast<double>(run.instrumented_tally);
    sec_per_loop_sum += run.seconds / std::max(1, run.generations);
  }
  const double n = static_cast<double>(agg.attempts.size());
  agg.cost.strategy = strategy_name(s);
  agg.cost.attempts = static_cast<int>(agg.attempts.size());
  agg.cost.n_iter_mean = iter_sum / n;
  agg.cost.n_iter_max = iter_max;
  agg.cost.closed_form_ops_mean = ops_sum / n;
  agg.cost.instrumented_tally_mean = tally_sum / n;
  agg.cost.fronthaul = fronthaul_symbols(
      scheme_of(s), kind_of(s), cfg.geometry.num_ues, cfg.geometry.num_antennas,
      cfg.geometry.num_aps, cfg.radio.tau_c, cfg.radio.tau_p);
  agg.cost.seconds_per_loop_mean = sec_per_loop_sum / n;
  agg.cost.loops_to_convergence = loops_to_convergence(agg.mean_trace);
  agg.cost.final_sum_se_mean = final_sum / n;
  agg.cost.final_sum_se_best = agg.best_value;
}

}  // namespace

ExperimentResult run_experiment(const ScenarioConfig& cfg,
                                const std::optional<SelectionMatrix>& warm) {
  ExperimentResult res;
  res.config = cfg;
  const SimulationSetup sim = build_simulation(cfg);
  const SumSeEvaluator eval(sim.realization);
  if (warm && (warm->num_ues() != eval.num_ues() ||
               warm->num_aps() != eval.num_aps() ||
               warm->num_antennas() != eval.num_antennas())) {
    throw std::invalid_argument(
        "run_experiment: warm-start matrix does not match the scenario "
        "dimensions");
  }
  for (Strategy s : cfg.strategies) {
    StrategyAggregate agg;
    agg.strategy = s;
    agg.attempts.reserve(cfg.attempts);
    for (int a = 0; a < cfg.attempts; ++a) {
      const std::uint64_t attempt_seed =
          derive_seed(cfg.seed, kStreamAttemptBase + static_cast<std::uint64_t>(a));
      agg.attempts.push_back(run_strategy(s, eval, cfg.ga, attempt_seed, warm));
    }
    aggregate(agg, cfg);
    res.strategies.push_back(std::move(agg));
  }
  return res;
}

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  return out;
}

}  // namespace

void emit_outputs(const ExperimentResult& result,
                  const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  {
    std::ofstream csv = open_out(out_dir / "convergence.csv");
    csv << "ra_loop,strategy,mean_sum_se,best_sum_se,worst_sum_se\n";
    for (const StrategyAggregate& agg : result.strategies) {
      const char* name = strategy_name(agg.strategy);
      for (std::size_t t = 0; t < agg.mean_trace.size(); ++t) {
        csv << (t + 1) << ',' << name << ',' << fmt_g(agg.mean_trace[t]) << ','
            << fmt_g(agg.best_trace[t]) << ',' << fmt_g(agg.worst_trace[t])
            << '\n';
      }
    }
  }

  for (const StrategyAggregate& agg : result.strategies) {
    std::ofstream dump = open_out(
        out_dir / (std::string("best_D_") + strategy_name(agg.strategy) + ".txt"));
    dump << agg.best.to_text();
  }

  std::ofstream sum = open_out(out_dir / "summary.txt");
  const ScenarioConfig& cfg = result.config;
  sum << "scenario: " << cfg.name << "\n"
      << "ues: " << cfg.geometry.num_ues << "  aps: " << cfg.geometry.num_aps
      << "  antennas_per_ap: " << cfg.geometry.num_antennas << "\n"
      << "tau_c: " << cfg.radio.tau_c << "  tau_p: " << cfg.radio.tau_p << "\n"
      << "seed: " << cfg.seed << "  attempts: " << cfg.attempts << "\n";
  for (const StrategyAggregate& agg : result.strategies) {
    const CostReport& c = agg.cost;
    sum << "\n[" << c.strategy << "]\n"
        << "  ra_loops_mean: " << fmt_g(c.n_iter_mean)
        << "  ra_loops_max: " << c.n_iter_max << "\n"
        << "  loops_to_convergence: " << c.loops_to_convergence << "\n"
        << "  final_sum_se_mean: " << fmt_g(c.final_sum_se_mean)
        << "  final_sum_se_best: " << fmt_g(c.final_sum_se_best) << "\n"
        << "  closed_form_ops_mean: " << fmt_g(c.closed_form_ops_mean) << "\n"
        << "  instrumented_tally_mean: " << fmt_g(c.instrumented_tally_mean)
        << "\n"
        << "  fronthaul_symbols: " << c.fronthaul << "\n"
        << "  seconds_per_loop_mean: " << fmt_g(c.seconds_per_loop_mean)
        << "\n";
  }
}

}  // namespace rs
