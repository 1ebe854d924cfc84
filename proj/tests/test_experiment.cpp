#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rs/experiment.hpp"

using namespace rs;

namespace {

ScenarioConfig tiny_config() {
  ScenarioConfig cfg = scenario_preset("scenario2");
  cfg.name = "tiny";
  cfg.geometry.num_ues = 3;
  cfg.geometry.num_aps = 2;
  cfg.geometry.num_antennas = 2;
  cfg.radio.tau_p = 2;
  cfg.ga.population = 20;
  cfg.ga.max_generations = 30;
  cfg.ga.max_stagnant = 10;
  cfg.attempts = 3;
  cfg.seed = 77;
  cfg.strategies = {Strategy::kCmrc, Strategy::kSmrc};
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path fresh_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / leaf;
  std::filesystem::remove_all(dir);
  return dir;
}

double padded_at(const std::vector<double>& trace, std::size_t t) {
  if (trace.empty()) return 0.0;
  return t < trace.size() ? trace[t] : trace.back();
}

}  // namespace

TEST_CASE("build_simulation consumes the documented seed streams") {
  const ScenarioConfig cfg = tiny_config();
  const SimulationSetup sim = build_simulation(cfg);

  Rng dep_rng = make_rng(cfg.seed, kStreamDeployment);
  const Deployment dep = build_deployment(cfg.effective_geometry(), dep_rng);
  REQUIRE(sim.deployment.num_ues() == dep.num_ues());
  REQUIRE(sim.deployment.num_aps() == dep.num_aps());
  for (int k = 0; k < dep.num_ues(); ++k) {
    CHECK((sim.deployment.ue_positions[k] - dep.ue_positions[k]).norm() == 0.0);
  }
  for (int l = 0; l < dep.num_aps(); ++l) {
    CHECK((sim.deployment.ap_positions[l] - dep.ap_positions[l]).norm() == 0.0);
  }

  Rng stat_rng = make_rng(cfg.seed, kStreamStatistics);
  const ChannelStatistics stats = build_statistics(dep, cfg.radio, stat_rng);
  for (int k = 0; k < stats.K; ++k) {
    for (int l = 0; l < stats.L; ++l) {
      CHECK((sim.stats.corr(k, l) - stats.corr(k, l)).norm() == 0.0);
    }
  }

  Rng real_rng = make_rng(cfg.seed, kStreamRealization);
  const ChannelRealization chan = make_realization(stats, real_rng);
  for (int k = 0; k < chan.K; ++k) {
    for (int l = 0; l < chan.L; ++l) {
      CHECK((sim.realization.h(k, l) - chan.h(k, l)).norm() == 0.0);
      CHECK((sim.realization.hhat(k, l) - chan.hhat(k, l)).norm() == 0.0);
    }
  }

  ScenarioConfig other = cfg;
  other.seed = 78;
  const SimulationSetup sim2 = build_simulation(other);
  double moved = 0.0;
  for (int k = 0; k < dep.num_ues(); ++k) {
    moved += (sim2.deployment.ue_positions[k] - dep.ue_positions[k]).norm();
  }
  CHECK(moved > 0.0);
}

TEST_CASE("loops_to_convergence on hand traces") {
  CHECK(loops_to_convergence({}) == 0);
  CHECK(loops_to_convergence({7.0}) == 1);
  CHECK(loops_to_convergence({5.0, 5.0, 5.0, 5.0}) == 1);
  CHECK(loops_to_convergence({0.0, 0.0, 0.0}) == 1);
  CHECK(loops_to_convergence({1.0, 2.0, 3.0, 3.0, 3.0}) == 3);
  // A late dip resets convergence to the last loop.
  CHECK(loops_to_convergence({1.0, 2.0, 3.0, 3.0, 2.9}) == 5);
  // 99.95 sits inside the default 0.1% band of 100 but outside a 1e-6 one.
  CHECK(loops_to_convergence({100.0, 99.95, 100.0}) == 1);
  CHECK(loops_to_convergence({100.0, 99.95, 100.0}, 1e-6) == 3);
}

TEST_CASE("aggregates pad short traces and report attempt statistics") {
  const ScenarioConfig cfg = tiny_config();
  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.strategies.size() == 2);

  const SimulationSetup sim = build_simulation(cfg);
  const SumSeEvaluator eval(sim.realization);
  auto ws = eval.make_workspace();

  for (const StrategyAggregate& agg : res.strategies) {
    REQUIRE(agg.attempts.size() == 3);
    std::size_t len = 0;
    for (const RunTrace& run : agg.attempts) {
      len = std::max(len, run.network_sum_se.size());
    }
    REQUIRE(agg.mean_trace.size() == len);
    REQUIRE(agg.best_trace.size() == len);
    REQUIRE(agg.worst_trace.size() == len);
    for (std::size_t t = 0; t < len; ++t) {
      double sum = 0.0;
      double best = agg.attempts[0].network_sum_se.empty()
                        ? 0.0
                        : padded_at(agg.attempts[0].network_sum_se, t);
      double worst = best;
      for (const RunTrace& run : agg.attempts) {
        const double v = padded_at(run.network_sum_se, t);
        sum += v;
        best = std::max(best, v);
        worst = std::min(worst, v);
      }
      CHECK(agg.mean_trace[t] == doctest::Approx(sum / 3.0).epsilon(1e-14));
      CHECK(agg.best_trace[t] == best);
      CHECK(agg.worst_trace[t] == worst);
      CHECK(agg.worst_trace[t] <= agg.mean_trace[t] + 1e-12);
      CHECK(agg.mean_trace[t] <= agg.best_trace[t] + 1e-12);
    }

    double best_value = 0.0;
    double gen_sum = 0.0;
    std::uint64_t gen_max = 0;
    for (const RunTrace& run : agg.attempts) {
      best_value = std::max(
          best_value, *std::max_element(run.network_sum_se.begin(),
                                        run.network_sum_se.end()));
      gen_sum += run.generations;
      gen_max = std::max(gen_max, static_cast<std::uint64_t>(run.generations));
    }
    CHECK(agg.best_value == best_value);
    CHECK(agg.cost.final_sum_se_best == best_value);
    CHECK(agg.cost.attempts == 3);
    CHECK(agg.cost.n_iter_mean == doctest::Approx(gen_sum / 3.0));
    CHECK(agg.cost.n_iter_max == gen_max);
    CHECK(agg.cost.loops_to_convergence ==
          loops_to_convergence(agg.mean_trace));
    CHECK(agg.cost.fronthaul ==
          fronthaul_symbols(scheme_of(agg.strategy), kind_of(agg.strategy),
                            cfg.geometry.num_ues, cfg.geometry.num_antennas,
                            cfg.geometry.num_aps, cfg.radio.tau_c,
                            cfg.radio.tau_p));
    CHECK(agg.cost.strategy == std::string(strategy_name(agg.strategy)));

    // The stored matrix reproduces the reported best network value.
    const double scored = eval.mrc_sum_se(
        agg.best, eval.num_aps(), SumSeEvaluator::Purpose::kReporting, ws);
    CHECK(scored == doctest::Approx(agg.best_value).epsilon(1e-12));
  }
}

TEST_CASE("emit_outputs writes the documented artifacts byte for byte") {
  const ScenarioConfig cfg = tiny_config();
  const ExperimentResult res = run_experiment(cfg);
  const auto dir1 = fresh_dir("rs_exp_out1");
  emit_outputs(res, dir1);

  const std::string csv = slurp(dir1 / "convergence.csv");
  const std::string header = "ra_loop,strategy,mean_sum_se,best_sum_se,worst_sum_se\n";
  REQUIRE(csv.substr(0, header.size()) == header);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  std::size_t expected = 1;
  for (const StrategyAggregate& agg : res.strategies) {
    expected += agg.mean_trace.size();
  }
  CHECK(lines == expected);
  CHECK(csv.find("\n1,cmrc,") != std::string::npos);
  CHECK(csv.find("1,smrc,") != std::string::npos);

  for (const StrategyAggregate& agg : res.strategies) {
    const auto path =
        dir1 / (std::string("best_D_") + strategy_name(agg.strategy) + ".txt");
    REQUIRE(std::filesystem::exists(path));
    CHECK(slurp(path) == agg.best.to_text());
  }

  const std::string summary = slurp(dir1 / "summary.txt");
  CHECK(summary.find("scenario: tiny") != std::string::npos);
  CHECK(summary.find("[cmrc]") != std::string::npos);
  CHECK(summary.find("[smrc]") != std::string::npos);
  CHECK(summary.find("fronthaul_symbols:") != std::string::npos);

  // A second full run of the same config must reproduce the files exactly.
  const ExperimentResult res2 = run_experiment(cfg);
  const auto dir2 = fresh_dir("rs_exp_out2");
  emit_outputs(res2, dir2);
  CHECK(slurp(dir2 / "convergence.csv") == csv);
  for (const StrategyAggregate& agg : res.strategies) {
    const std::string leaf =
        std::string("best_D_") + strategy_name(agg.strategy) + ".txt";
    CHECK(slurp(dir2 / leaf) == slurp(dir1 / leaf));
  }

  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("single UE single antenna toy agrees across strategies") {
  ScenarioConfig cfg = tiny_config();
  cfg.name = "toy";
  cfg.geometry.num_ues = 1;
  cfg.geometry.num_aps = 1;
  cfg.geometry.num_antennas = 1;
  cfg.radio.tau_p = 1;
  cfg.ga.population = 12;
  cfg.ga.max_generations = 15;
  cfg.ga.max_stagnant = 5;
  cfg.attempts = 2;
  cfg.strategies = {Strategy::kCmrc, Strategy::kCoslp, Strategy::kSmrc,
                    Strategy::kPmrc};

  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.strategies.size() == 4);
  for (const StrategyAggregate& agg : res.strategies) {
    CHECK(agg.best_value > 0.0);
    // The lone bit must be on: switching the antenna off scores zero.
    CHECK(agg.best.popcount() == 1);
  }
  // With one UE on one antenna the MRC and LMMSE combiners coincide up to a
  // scale factor, so every strategy lands on the same network value.
  for (std::size_t i = 1; i < res.strategies.size(); ++i) {
    CHECK(res.strategies[i].best_value ==
          doctest::Approx(res.strategies[0].best_value).epsilon(1e-9));
  }
}

TEST_CASE("warm start is validated and respected") {
  ScenarioConfig cfg = tiny_config();
  cfg.strategies = {Strategy::kCmrc};

  const SelectionMatrix bad = SelectionMatrix::all_ones(2, 2, 2);
  CHECK_THROWS_AS(run_experiment(cfg, bad), std::invalid_argument);

  const SelectionMatrix warm = SelectionMatrix::all_ones(
      cfg.geometry.num_ues, cfg.geometry.num_aps, cfg.geometry.num_antennas);
  const ExperimentResult res = run_experiment(cfg, warm);

  const SimulationSetup sim = build_simulation(cfg);
  const SumSeEvaluator eval(sim.realization);
  auto ws = eval.make_workspace();
  const double warm_value = eval.mrc_sum_se(
      warm, eval.num_aps(), SumSeEvaluator::Purpose::kReporting, ws);
  for (const RunTrace& run : res.strategies[0].attempts) {
    REQUIRE(!run.network_sum_se.empty());
    CHECK(run.network_sum_se.front() >= warm_value - 1e-9);
  }
}

TEST_CASE("empty strategy list yields a header-only csv") {
  ScenarioConfig cfg = tiny_config();
  cfg.strategies.clear();
  const ExperimentResult res = run_experiment(cfg);
  CHECK(res.strategies.empty());

  const auto dir = fresh_dir("rs_exp_empty");
  emit_outputs(res, dir);
  CHECK(slurp(dir / "convergence.csv") ==
        "ra_loop,strategy,mean_sum_se,best_sum_se,worst_sum_se\n");
  CHECK(std::filesystem::exists(dir / "summary.txt"));
  std::filesystem::remove_all(dir);
}
