#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rs/evaluator.hpp"
#include "rs/optimizer.hpp"
#include "support.hpp"

using namespace rs;

namespace {

GaConfig small_ga() {
  GaConfig cfg;
  cfg.population = 30;
  cfg.max_generations = 100;
  cfg.max_stagnant = 25;
  return cfg;
}

// Enumerates every selection matrix of a tiny instance and returns the best
// full-stripe MRC sum SE.
double exhaustive_optimum(const SumSeEvaluator& eval) {
  const int bits = eval.num_ues() * eval.num_aps() * eval.num_antennas();
  auto ws = eval.make_workspace();
  double best = -1.0;
  for (long code = 0; code < (1L << bits); ++code) {
    SelectionMatrix d = SelectionMatrix::all_zeros(
        eval.num_ues(), eval.num_aps(), eval.num_antennas());
    for (int b = 0; b < bits; ++b) {
      if (code & (1L << b)) d.flip(b);
    }
    best = std::max(best, eval.mrc_sum_se(d, eval.num_aps(),
                                          SumSeEvaluator::Purpose::kReporting,
                                          ws));
  }
  return best;
}

bool non_decreasing(const std::vector<double>& v, double slack = 1e-12) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1] - slack) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("strategy names round trip") {
  for (Strategy s : {Strategy::kCmrc, Strategy::kCoslp, Strategy::kSmrc,
                     Strategy::kPmrc}) {
    CHECK(strategy_from_name(strategy_name(s)) == s);
  }
  CHECK(!strategy_from_name("mrc").has_value());
  CHECK(scheme_of(Strategy::kCoslp) == Scheme::kOslp);
  CHECK(kind_of(Strategy::kSmrc) == StrategyKind::kSequential);
  CHECK(kind_of(Strategy::kPmrc) == StrategyKind::kParallel);
}

TEST_CASE("config validation rejects broken settings") {
  GaConfig cfg;
  cfg.validate();
  auto broken = cfg;
  broken.population = 1;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = cfg;
  broken.tournament = 0;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = cfg;
  broken.tournament = cfg.population + 1;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = cfg;
  broken.crossover_nominal = 1.5;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
  broken = cfg;
  broken.mutation_nominal = 0.5;
  broken.mutation_max = 0.1;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}

TEST_CASE("rate adaptation steps up under stagnation and resets otherwise") {
  GaConfig cfg;
  double p_r = cfg.crossover_nominal;
  double p_m = cfg.mutation_nominal;
  // Below the threshold the rates sit at their nominal values.
  for (int s = 0; s < cfg.adapt_threshold; ++s) {
    const auto [r, m] = adapt_probabilities(cfg, s, 0.93, 0.07);
    CHECK(r == cfg.crossover_nominal);
    CHECK(m == cfg.mutation_nominal);
  }
  // From the threshold on, each call climbs one step until the caps.
  std::vector<double> crossover_path;
  std::vector<double> mutation_path;
  for (int s = cfg.adapt_threshold; s < cfg.adapt_threshold + 10; ++s) {
    std::tie(p_r, p_m) = adapt_probabilities(cfg, s, p_r, p_m);
    crossover_path.push_back(p_r);
    mutation_path.push_back(p_m);
  }
  CHECK(crossover_path[0] == doctest::Approx(0.85));
  CHECK(crossover_path[1] == doctest::Approx(0.95));
  CHECK(crossover_path[2] == doctest::Approx(1.0));
  CHECK(crossover_path[9] == doctest::Approx(1.0));
  CHECK(mutation_path[0] == doctest::Approx(0.02));
  CHECK(mutation_path[8] == doctest::Approx(0.1));
  CHECK(mutation_path[9] == doctest::Approx(0.1));
  // Any improvement resets to nominal.
  const auto [r, m] = adapt_probabilities(cfg, 0, p_r, p_m);
  CHECK(r == cfg.crossover_nominal);
  CHECK(m == cfg.mutation_nominal);
}

TEST_CASE("tournament selection statistics") {
  const std::vector<double> fitness{1.0, 2.0, 3.0, 4.0, 5.0};
  Rng rng = make_rng(1, 0);
  SUBCASE("t_k equal to the population always picks the best") {
    for (int i = 0; i < 50; ++i) {
      CHECK(tournament_select(fitness, 5, rng) == 4);
    }
  }
  SUBCASE("t_k = 1 is a uniform pick") {
    std::vector<int> freq(5, 0);
    const int draws = 50000;
    for (int i = 0; i < draws; ++i) ++freq[tournament_select(fitness, 1, rng)];
    for (int idx = 0; idx < 5; ++idx) {
      CHECK(freq[idx] > draws / 5 - 1000);
      CHECK(freq[idx] < draws / 5 + 1000);
    }
  }
  SUBCASE("t_k = 2 win frequency increases with rank") {
    std::vector<int> freq(5, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++freq[tournament_select(fitness, 2, rng)];
    CHECK(freq[0] == 0);  // the worst never wins a pair of distinct indices
    for (int idx = 1; idx < 5; ++idx) CHECK(freq[idx] > freq[idx - 1]);
    // P(rank r wins) = 2r / (n(n-1)) for distinct pairs: 0.4 for the best.
    CHECK(freq[4] > draws * 2 / 5 - 2000);
    CHECK(freq[4] < draws * 2 / 5 + 2000);
  }
}

TEST_CASE("uniform crossover exchanges bits positionwise") {
  Rng rng = make_rng(2, 0);
  const auto a = SelectionMatrix::random(4, 3, 2, rng);
  const auto b = SelectionMatrix::random(4, 3, 2, rng);
  SelectionMatrix c1, c2;
  uniform_crossover(a, b, c1, c2, rng);
  bool swapped = false;
  bool kept = false;
  for (int k = 0; k < 4; ++k) {
    for (int col = 0; col < 6; ++col) {
      const bool from_a = c1.at(k, col) == a.at(k, col);
      if (from_a) {
        CHECK(c2.at(k, col) == b.at(k, col));
      } else {
        CHECK(c1.at(k, col) == b.at(k, col));
        CHECK(c2.at(k, col) == a.at(k, col));
      }
      if (a.at(k, col) != b.at(k, col)) {
        (from_a ? kept : swapped) = true;
      }
    }
  }
  // The mask actually mixed: some differing positions kept, some exchanged.
  CHECK(kept);
  CHECK(swapped);
  CHECK(c1.popcount() + c2.popcount() == a.popcount() + b.popcount());

  SelectionMatrix d1, d2;
  uniform_crossover(a, a, d1, d2, rng);
  CHECK(d1 == a);
  CHECK(d2 == a);
}

TEST_CASE("mutation flip behaviour at the rate extremes") {
  Rng rng = make_rng(3, 0);
  auto d = SelectionMatrix::random(5, 4, 2, rng);
  const auto before = d;
  mutate(d, 0.0, rng);
  CHECK(d == before);
  mutate(d, 1.0, rng);
  CHECK(d.popcount() == before.size() - before.popcount());
  // Moderate rate: flip count lands near Binomial(size, 0.1).
  int flips = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    auto copy = before;
    mutate(copy, 0.1, rng);
    for (int i = 0; i < copy.size(); ++i) {
      if (copy.data()[i] != before.data()[i]) ++flips;
    }
  }
  const double mean_flips = static_cast<double>(flips) / trials;
  CHECK(mean_flips > 0.05 * before.size());
  CHECK(mean_flips < 0.15 * before.size());
}

TEST_CASE("CMRC finds the exhaustive optimum on a tiny instance") {
  const auto inst = rstest::make_instance(2, 2, 2, 101, 2);
  const SumSeEvaluator eval(inst.chan);
  const double optimum = exhaustive_optimum(eval);
  REQUIRE(optimum > 0.0);
  const auto cfg = small_ga();
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto trace = run_strategy(Strategy::kCmrc, eval, cfg, seed);
    CHECK(trace.network_sum_se.back() ==
          doctest::Approx(optimum).epsilon(1e-12));
  }
}

TEST_CASE("strategies are deterministic in the seed") {
  const auto inst = rstest::make_instance(3, 3, 2, 103, 2);
  const SumSeEvaluator eval(inst.chan);
  auto cfg = small_ga();
  cfg.max_generations = 30;
  for (Strategy s : {Strategy::kCmrc, Strategy::kCoslp, Strategy::kSmrc,
                     Strategy::kPmrc}) {
    const auto a = run_strategy(s, eval, cfg, 7);
    const auto b = run_strategy(s, eval, cfg, 7);
    CHECK(a.network_sum_se == b.network_sum_se);
    CHECK(a.best_objective == b.best_objective);
    CHECK(a.best == b.best);
    const auto c = run_strategy(s, eval, cfg, 8);
    CHECK(a.network_sum_se != c.network_sum_se);
  }
}

TEST_CASE("serial and parallel population evaluation agree bitwise") {
  const auto inst = rstest::make_instance(3, 3, 2, 107, 2);
  const SumSeEvaluator eval(inst.chan);
  auto cfg = small_ga();
  cfg.max_generations = 25;
  for (Strategy s : {Strategy::kCmrc, Strategy::kSmrc, Strategy::kPmrc}) {
    auto serial_cfg = cfg;
    serial_cfg.parallel_eval = false;
    const auto a = run_strategy(s, eval, cfg, 11);
    const auto b = run_strategy(s, eval, serial_cfg, 11);
    CHECK(a.network_sum_se == b.network_sum_se);
    CHECK(a.best == b.best);
  }
}

TEST_CASE("elitism keeps centralized traces monotone") {
  const auto inst = rstest::make_instance(3, 3, 2, 109, 2);
  const SumSeEvaluator eval(inst.chan);
  auto cfg = small_ga();
  cfg.max_generations = 40;
  for (Strategy s : {Strategy::kCmrc, Strategy::kCoslp}) {
    const auto trace = run_strategy(s, eval, cfg, 13);
    CHECK(non_decreasing(trace.best_objective));
    CHECK(non_decreasing(trace.network_sum_se));
    CHECK(trace.network_sum_se == trace.best_objective);
  }
}

TEST_CASE("sequential trace never regresses once the stripe is covered") {
  const auto inst = rstest::make_instance(3, 3, 2, 113, 2);
  const SumSeEvaluator eval(inst.chan);
  auto cfg = small_ga();
  cfg.max_generations = 30;
  const auto trace = run_strategy(Strategy::kSmrc, eval, cfg, 17);
  const int first_pass = eval.num_aps();
  REQUIRE(static_cast<int>(trace.network_sum_se.size()) > first_pass);
  std::vector<double> after(trace.network_sum_se.begin() + first_pass - 1,
                            trace.network_sum_se.end());
  CHECK(non_decreasing(after));
  // Revisits of the same AP never lose ground on their own objective.
  for (std::size_t t = first_pass; t < trace.best_objective.size(); ++t) {
    CHECK(trace.best_objective[t] >=
          trace.best_objective[t - first_pass] - 1e-12);
  }
}

TEST_CASE("parallel per-AP bests are monotone and the GA stays local") {
  const auto inst = rstest::make_instance(3, 3, 2, 127, 2);
  const SumSeEvaluator eval(inst.chan);
  auto cfg = small_ga();
  cfg.max_generations = 30;
  eval.reset_counters();
  const auto trace = run_strategy(Strategy::kPmrc, eval, cfg, 19);
  REQUIRE(trace.per_ap_best.size() == 3);
  for (const auto& series : trace.per_ap_best) {
    CHECK(!series.empty());
    CHECK(non_decreasing(series));
  }
  // The parallel objective never touches another AP's bits: every objective
  // evaluation goes through the single-AP kernel.
  const auto obj = eval.counts(SumSeEvaluator::Purpose::kObjective);
  CHECK(obj.single_ap > 0);
  CHECK(obj.mrc_full == 0);
  CHECK(obj.mrc_prefix == 0);
  const auto rep = eval.counts(SumSeEvaluator::Purpose::kReporting);
  CHECK(rep.mrc_full == static_cast<std::uint64_t>(trace.generations));
}

TEST_CASE("warm start enters the initial population") {
  const auto inst = rstest::make_instance(2, 2, 2, 131, 2);
  const SumSeEvaluator eval(inst.chan);
  auto ws = eval.make_workspace();
  const auto cfg = small_ga();
  // Use the exhaustive optimum as the warm matrix: no candidate can beat it,
  // so the first reported best must match it exactly.
  const double optimum = exhaustive_optimum(eval);
  SelectionMatrix warm;
  {
    Rng rng = make_rng(131, 99);
    double best = -1.0;
    for (int trial = 0; trial < 4000; ++trial) {
      const auto d = SelectionMatrix::random(2, 2, 2, rng);
      const double v = eval.mrc_sum_se(
          d, 2, SumSeEvaluator::Purpose::kReporting, ws);
      if (v > best) {
        best = v;
        warm = d;
      }
      if (best == optimum) break;
    }
    REQUIRE(best == doctest::Approx(optimum).epsilon(1e-12));
  }
  for (Strategy s : {Strategy::kCmrc, Strategy::kSmrc}) {
    const auto trace = run_strategy(s, eval, cfg, 23, warm);
    CHECK(trace.best_objective.front() ==
          doctest::Approx(optimum).epsilon(1e-12));
    CHECK(trace.network_sum_se.back() ==
          doctest::Approx(optimum).epsilon(1e-12));
  }
}

TEST_CASE("stagnation terminates runs before the generation cap") {
  const auto inst = rstest::make_instance(2, 2, 1, 137, 2);
  const SumSeEvaluator eval(inst.chan);
  GaConfig cfg;
  cfg.population = 20;
  cfg.max_generations = 5000;
  cfg.max_stagnant = 12;
  const auto trace = run_strategy(Strategy::kCmrc, eval, cfg, 29);
  CHECK(trace.generations < cfg.max_generations);
  CHECK(trace.generations >= cfg.max_stagnant);
}

TEST_CASE("closed-form op accounting scales with the trace length") {
  const auto inst = rstest::make_instance(3, 3, 2, 139, 2);
  const SumSeEvaluator eval(inst.chan);
  auto cfg = small_ga();
  cfg.max_generations = 20;
  const auto trace = run_strategy(Strategy::kCmrc, eval, cfg, 31);
  const auto per_eval = op_count_per_eval(Scheme::kMrc,
                                          StrategyKind::kCentralized, 3, 3, 2);
  CHECK(trace.closed_form_ops ==
        total_op_count(per_eval, trace.generations, cfg.population,
                       cfg.tournament));
  CHECK(trace.instrumented_tally > 0);
  CHECK(trace.seconds > 0.0);
}
