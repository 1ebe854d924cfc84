#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "rs/evaluator.hpp"
#include "rs/metrics.hpp"
#include "rs/rng.hpp"
#include "rs/selection.hpp"

namespace rs {

// The four association strategies: centralized GA over the whole matrix with
// MRC or OSLP combining, sequential per-AP GA (one AP block per RA loop,
// cycling along the stripe), and parallel per-AP GAs driven by the single-AP
// objective.
enum class Strategy { kCmrc, kCoslp, kSmrc, kPmrc };

const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(std::string_view name);
Scheme scheme_of(Strategy s);
StrategyKind kind_of(Strategy s);

struct GaConfig {
  int population = 100;        // N_pop
  int tournament = 2;          // t_k
  int max_generations = 1000;  // N_m; the sequential strategy caps at L * N_m
  int max_stagnant = 100;      // N_i; the sequential strategy caps at L * N_i
  double stagnation_tolerance = 1e-5;
  int adapt_threshold = 5;     // stagnant generations before rates ramp up
  double crossover_nominal = 0.75;
  double crossover_step = 0.1;
  double crossover_max = 1.0;
  double mutation_nominal = 0.01;
  double mutation_step = 0.01;
  double mutation_max = 0.1;
  bool sequential_first_loop_double_sum = false;
  bool parallel_eval = true;

  void validate() const;
};

struct RunTrace {
  Strategy strategy = Strategy::kCmrc;
  // Per RA loop: network sum SE of the assembled best matrix, and the GA's
  // own best objective value.
  std::vector<double> network_sum_se;
  std::vector<double> best_objective;
  // Parallel strategy only: best single-AP objective per AP per loop (stops
  // growing once that AP freezes).
  std::vector<std::vector<double>> per_ap_best;
  SelectionMatrix best;
  int generations = 0;
  std::uint64_t closed_form_ops = 0;
  std::uint64_t instrumented_tally = 0;
  double seconds = 0.0;
};

// Rate adaptation: once stagnation has lasted adapt_threshold generations both
// rates step up each generation, clamped at their caps; any earlier they sit
// at the nominal values.
std::pair<double, double> adapt_probabilities(const GaConfig& cfg, int stagnant,
                                              double p_r, double p_m);

// Draws t_k distinct indices uniformly and returns the fittest (the first
// drawn wins ties).
int tournament_select(const std::vector<double>& fitness, int t_k, Rng& rng);

// Uniform crossover with a fresh binary mask per pair; the second child takes
// the complementary mask.
void uniform_crossover(const SelectionMatrix& a, const SelectionMatrix& b,
                       SelectionMatrix& child1, SelectionMatrix& child2,
                       Rng& rng);

// Independent per-bit flips with probability p_m, via geometric skip sampling.
void mutate(SelectionMatrix& d, double p_m, Rng& rng);

RunTrace run_strategy(Strategy strategy, const SumSeEvaluator& eval,
                      const GaConfig& cfg, std::uint64_t seed,
                      const std::optional<SelectionMatrix>& warm = std::nullopt);

}  // namespace rs
