#include "rs/optimizer.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "rs/parallel.hpp"

namespace rs {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kCmrc:
      return "cmrc";
    case Strategy::kCoslp:
      return "coslp";
    case Strategy::kSmrc:
      return "smrc";
    case Strategy::kPmrc:
      return "pmrc";
  }
  return "unknown";
}

std::optional<Strategy> strategy_from_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "cmrc") return Strategy::kCmrc;
  if (lower == "coslp") return Strategy::kCoslp;
  if (lower == "smrc") return Strategy::kSmrc;
  if (lower == "pmrc") return Strategy::kPmrc;
  return std::nullopt;
}

Scheme scheme_of(Strategy s) {
  return s == Strategy::kCoslp ? Scheme::kOslp : Scheme::kMrc;
}

StrategyKind kind_of(Strategy s) {
  switch (s) {
    case Strategy::kCmrc:
    case Strategy::kCoslp:
      return StrategyKind::kCentralized;
    case Strategy::kSmrc:
      return StrategyKind::kSequential;
    case Strategy::kPmrc:
      return StrategyKind::kParallel;
  }
  return StrategyKind::kCentralized;
}

void GaConfig::validate() const {
  if (population < 2) throw std::invalid_argument("ga.population must be >= 2");
  if (tournament < 1 || tournament > population) {
    throw std::invalid_argument("ga.tournament must be in [1, population]");
  }
  if (max_generations < 1) {
    throw std::invalid_argument("ga.max_generations must be >= 1");
  }
  if (max_stagnant < 1) throw std::invalid_argument("ga.max_stagnant must be >= 1");
  if (stagnation_tolerance < 0.0) {
    throw std::invalid_argument("ga.stagnation_tolerance must be >= 0");
  }
  if (adapt_threshold < 1) {
    throw std::invalid_argument("ga.adapt_threshold must be >= 1");
  }
  auto check_prob = [](double v, const char* what) {
    if (v < 0.0 || v > 1.0) {
      throw std::invalid_argument(std::string(what) + " must be in [0, 1]");
    }
  };
  check_prob(crossover_nominal, "ga.crossover_nominal");
  check_prob(crossover_max, "ga.crossover_max");
  check_prob(mutation_nominal, "ga.mutation_nominal");
  check_prob(mutation_max, "ga.mutation_max");
  if (crossover_step < 0.0 || mutation_step < 0.0) {
    throw std::invalid_argument("ga adaptation steps must be >= 0");
  }
  if (crossover_nominal > crossover_max || mutation_nominal > mutation_max) {
    throw std::invalid_argument("ga nominal rates must not exceed their caps");
  }
}

std::pair<double, double> adapt_probabilities(const GaConfig& cfg, int stagnant,
                                              double p_r, double p_m) {
  if (stagnant >= cfg.adapt_threshold) {
    return {std::min(p_r + cfg.crossover_step, cfg.crossover_max),
            std::min(p_m + cfg.mutation_step, cfg.mutation_max)};
  }
  return {cfg.crossover_nominal, cfg.mutation_nominal};
}

int tournament_select(const std::vector<double>& fitness, int t_k, Rng& rng) {
  const int n = static_cast<int>(fitness.size());
  if (t_k < 1 || t_k > n) {
    throw std::invalid_argument("tournament_select: bad tournament size");
  }
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::array<int, 32> drawn_small{};
  std::vector<int> drawn_big;
  int* drawn = drawn_small.data();
  if (t_k > static_cast<int>(drawn_small.size())) {
    drawn_big.resize(t_k);
    drawn = drawn_big.data();
  }
  int best = -1;
  for (int j = 0; j < t_k; ++j) {
    int idx;
    bool fresh;
    do {
      idx = pick(rng);
      fresh = true;
      for (int q = 0; q < j; ++q) {
        if (drawn[q] == idx) {
          fresh = false;
          break;
        }
      }
    } while (!fresh);
    drawn[j] = idx;
    if (best < 0 || fitness[idx] > fitness[best]) best = idx;
  }
  return best;
}

void uniform_crossover(const SelectionMatrix& a, const SelectionMatrix& b,
                       SelectionMatrix& child1, SelectionMatrix& child2,
                       Rng& rng) {
  if (a.num_ues() != b.num_ues() || a.num_aps() != b.num_aps() ||
      a.num_antennas() != b.num_antennas()) {
    throw std::invalid_argument("uniform_crossover: parent shape mismatch");
  }
  if (child1.size() != a.size() || child1.num_ues() != a.num_ues()) child1 = a;
  if (child2.size() != a.size() || child2.num_ues() != a.num_ues()) child2 = b;
  const std::uint8_t* pa = a.data();
  const std::uint8_t* pb = b.data();
  std::uint8_t* c1 = child1.data();
  std::uint8_t* c2 = child2.data();
  const int n = a.size();
  std::uint64_t word = 0;
  int left = 0;
  for (int i = 0; i < n; ++i) {
    if (left == 0) {
      word = rng();
      left = 64;
    }
    const bool take_a = word & 1u;
    word >>= 1;
    --left;
    c1[i] = take_a ? pa[i] : pb[i];
    c2[i] = take_a ? pb[i] : pa[i];
  }
}

void mutate(SelectionMatrix& d, double p_m, Rng& rng) {
  if (p_m < 0.0 || p_m > 1.0) {
    throw std::invalid_argument("mutate: p_m must be in [0, 1]");
  }
  const int n = d.size();
  if (n == 0 || p_m == 0.0) return;
  if (p_m >= 1.0) {
    for (int i = 0; i < n; ++i) d.flip(i);
    return;
  }
  std::geometric_distribution<long> gap(p_m);
  long pos = gap(rng);
  while (pos < n) {
    d.flip(static_cast<int>(pos));
    pos += gap(rng) + 1;
  }
}

namespace {

using Workspace = SumSeEvaluator::Workspace;
using Objective = std::function<double(const SelectionMatrix&, Workspace&)>;

struct EvalPool {
  std::vector<Workspace> ws;
  bool parallel = false;
};

void evaluate_into(const std::vector<SelectionMatrix>& xs, std::size_t count,
                   const Objective& f, std::vector<double>& out,
                   EvalPool& pool) {
  out.resize(count);
  for_each_index(count, pool.parallel, [&](std::size_t i) {
    out[i] = f(xs[i], pool.ws[thread_index()]);
  });
}

// Per-strategy GA state shared across generations: the adaptive rates plus the
// stagnation counter and the previous best for the improvement test.
struct GaState {
  double p_r = 0.0;
  double p_m = 0.0;
  int stagnant = 0;
  double prev_best = 0.0;
  bool has_prev = false;
};

struct SubGa {
  std::vector<SelectionMatrix> members;
  std::vector<double> fitness;
  bool fitness_valid = false;
  std::vector<SelectionMatrix> children;
  std::vector<double> child_fitness;
  std::vector<SelectionMatrix> next;
  std::vector<double> next_fitness;
  std::vector<double> combined;
  std::vector<int> parents;
};

void init_population(SubGa& pop, int num_ues, int num_aps, int num_antennas,
                     const GaConfig& cfg, Rng& rng,
                     const SelectionMatrix* warm) {
  pop.members.clear();
  pop.members.reserve(cfg.population);
  for (int i = 0; i < cfg.population; ++i) {
    pop.members.push_back(
        SelectionMatrix::random(num_ues, num_aps, num_antennas, rng));
  }
  if (warm) {
    std::uniform_int_distribution<int> slot(0, cfg.population - 1);
    pop.members[slot(rng)] = *warm;
  }
  pop.children.assign(2 * cfg.population,
                      SelectionMatrix(num_ues, num_aps, num_antennas));
  pop.next.assign(cfg.population,
                  SelectionMatrix(num_ues, num_aps, num_antennas));
  pop.fitness.assign(cfg.population, 0.0);
  pop.child_fitness.assign(2 * cfg.population, 0.0);
  pop.next_fitness.assign(cfg.population, 0.0);
  pop.fitness_valid = false;
}

// One generation: rate adaptation, parent tournaments over the current
// population, shuffled pairing with self-pair avoidance, crossover, mutation,
// then elitism (current best + offspring best) plus tournaments over the
// union of offspring and current members. After the call the evaluated best
// sits at members[0]. Returns that best fitness.
double evolve(SubGa& pop, const Objective& f, GaState& st, const GaConfig& cfg,
              Rng& rng, EvalPool& pool, bool reevaluate) {
  const int npop = cfg.population;
  std::tie(st.p_r, st.p_m) = adapt_probabilities(cfg, st.stagnant, st.p_r, st.p_m);

  if (reevaluate || !pop.fitness_valid) {
    evaluate_into(pop.members, npop, f, pop.fitness, pool);
    pop.fitness_valid = true;
  }
  int best = 0;
  for (int i = 1; i < npop; ++i) {
    if (pop.fitness[i] > pop.fitness[best]) best = i;
  }

  pop.parents.resize(2 * static_cast<std::size_t>(npop));
  for (int j = 0; j < 2 * npop; ++j) {
    pop.parents[j] = tournament_select(pop.fitness, cfg.tournament, rng);
  }
  std::shuffle(pop.parents.begin(), pop.parents.end(), rng);

  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int i = 0; i < npop; ++i) {
    int a = pop.parents[2 * i];
    int b = pop.parents[2 * i + 1];
    for (int tries = 0; tries < 8 && a == b; ++tries) {
      b = tournament_select(pop.fitness, cfg.tournament, rng);
    }
    if (a == b && npop > 1) {
      std::uniform_int_distribution<int> other(0, npop - 2);
      const int j = other(rng);
      b = j + (j >= a ? 1 : 0);
    }
    SelectionMatrix& c1 = pop.children[2 * i];
    SelectionMatrix& c2 = pop.children[2 * i + 1];
    if (uni(rng) < st.p_r) {
      uniform_crossover(pop.members[a], pop.members[b], c1, c2, rng);
    } else {
      c1 = pop.members[a];
      c2 = pop.members[b];
    }
    mutate(c1, st.p_m, rng);
    mutate(c2, st.p_m, rng);
  }
  evaluate_into(pop.children, 2 * static_cast<std::size_t>(npop), f,
                pop.child_fitness, pool);

  int child_best = 0;
  for (int i = 1; i < 2 * npop; ++i) {
    if (pop.child_fitness[i] > pop.child_fitness[child_best]) child_best = i;
  }

  pop.next[0] = pop.members[best];
  pop.next_fitness[0] = pop.fitness[best];
  pop.next[1] = pop.children[child_best];
  pop.next_fitness[1] = pop.child_fitness[child_best];

  pop.combined.resize(3 * static_cast<std::size_t>(npop));
  std::copy(pop.child_fitness.begin(), pop.child_fitness.end(),
            pop.combined.begin());
  std::copy(pop.fitness.begin(), pop.fitness.end(),
            pop.combined.begin() + 2 * npop);
  for (int i = 2; i < npop; ++i) {
    const int pick = tournament_select(pop.combined, cfg.tournament, rng);
    if (pick < 2 * npop) {
      pop.next[i] = pop.children[pick];
    } else {
      pop.next[i] = pop.members[pick - 2 * npop];
    }
    pop.next_fitness[i] = pop.combined[pick];
  }
  pop.members.swap(pop.next);
  pop.fitness.swap(pop.next_fitness);
  pop.fitness_valid = true;
  return pop.fitness[0];
}

void note_stagnation(GaState& st, double best, double tolerance) {
  if (st.has_prev && std::abs(best - st.prev_best) < tolerance) {
    ++st.stagnant;
  } else {
    st.stagnant = 0;
  }
  st.prev_best = best;
  st.has_prev = true;
}

void run_central(Strategy strategy, const SumSeEvaluator& eval,
                 const GaConfig& cfg, std::uint64_t seed,
                 const std::optional<SelectionMatrix>& warm, EvalPool& pool,
                 RunTrace& out) {
  const int num_aps = eval.num_aps();
  Rng rng = make_rng(seed, 0);
  SubGa pop;
  init_population(pop, eval.num_ues(), num_aps, eval.num_antennas(), cfg, rng,
                  warm ? &*warm : nullptr);
  GaState st{cfg.crossover_nominal, cfg.mutation_nominal};
  const bool oslp = strategy == Strategy::kCoslp;
  const Objective f =
      oslp ? Objective([&eval](const SelectionMatrix& d, Workspace& ws) {
        return eval.oslp_sum_se(d, SumSeEvaluator::Purpose::kObjective, ws);
      })
           : Objective([&eval, num_aps](const SelectionMatrix& d, Workspace& ws) {
               return eval.mrc_sum_se(d, num_aps,
                                      SumSeEvaluator::Purpose::kObjective, ws);
             });
  const std::uint64_t per_eval =
      op_count_per_eval(scheme_of(strategy), StrategyKind::kCentralized,
                        eval.num_ues(), num_aps, eval.num_antennas());
  const std::uint64_t mult = ga_ops_multiplier(cfg.population, cfg.tournament);
  double global_best = -std::numeric_limits<double>::infinity();
  for (int t = 1; t <= cfg.max_generations; ++t) {
    const double best = evolve(pop, f, st, cfg, rng, pool, false);
    out.closed_form_ops += mult * per_eval;
    out.network_sum_se.push_back(best);
    out.best_objective.push_back(best);
    ++out.generations;
    if (best > global_best) {
      global_best = best;
      out.best = pop.members[0];
    }
    note_stagnation(st, best, cfg.stagnation_tolerance);
    if (st.stagnant >= cfg.max_stagnant) break;
  }
}

// One block-sized population travels along the stripe: it is drawn once at
// the first AP and re-scored under each visited AP's objective, while the
// assembled matrix freezes every other AP's block.
void run_sequential(const SumSeEvaluator& eval, const GaConfig& cfg,
                    std::uint64_t seed,
                    const std::optional<SelectionMatrix>& warm, EvalPool& pool,
                    RunTrace& out) {
  const int num_ues = eval.num_ues();
  const int num_aps = eval.num_aps();
  const int num_antennas = eval.num_antennas();
  Rng rng = make_rng(seed, 0);
  const bool warm_started = warm.has_value();
  SelectionMatrix assembled =
      warm_started ? *warm
                   : SelectionMatrix::all_zeros(num_ues, num_aps, num_antennas);
  std::vector<SubGa> pops(num_aps);
  GaState st{cfg.crossover_nominal, cfg.mutation_nominal};
  const std::uint64_t mult = ga_ops_multiplier(cfg.population, cfg.tournament);
  const long cap_generations =
      static_cast<long>(num_aps) * cfg.max_generations;
  const long cap_stagnant = static_cast<long>(num_aps) * cfg.max_stagnant;
  double global_best = -std::numeric_limits<double>::infinity();
  for (long t = 1; t <= cap_generations; ++t) {
    const int l = static_cast<int>((t - 1) % num_aps);
    // The first traversal of the stripe optimizes each block against the
    // prefix it terminates; afterwards every visit scores the full network.
    const bool first_pass = !warm_started && t <= num_aps;
    SubGa& pop = pops[l];
    if (pop.members.empty()) {
      std::optional<SelectionMatrix> warm_block;
      if (warm_started) warm_block = warm->block(l);
      init_population(pop, num_ues, 1, num_antennas, cfg, rng,
                      warm_block ? &*warm_block : nullptr);
    }
    const Objective f = [&eval, &assembled, &cfg, l, first_pass, num_aps](
                            const SelectionMatrix& blk, Workspace& ws) {
      ws.scratch = assembled;
      ws.scratch.set_block(l, blk);
      if (first_pass) {
        return cfg.sequential_first_loop_double_sum
                   ? eval.mrc_sum_se_cumulative(
                         ws.scratch, l + 1, SumSeEvaluator::Purpose::kObjective,
                         ws)
                   : eval.mrc_sum_se(ws.scratch, l + 1,
                                     SumSeEvaluator::Purpose::kObjective, ws);
      }
      return eval.mrc_sum_se(ws.scratch, num_aps,
                             SumSeEvaluator::Purpose::kObjective, ws);
    };
    // Every visit rescores the population against the current remainder of
    // the stripe; elitism then keeps the deployed block from regressing.
    const double best = evolve(pop, f, st, cfg, rng, pool, true);
    assembled.set_block(l, pop.members[0]);
    out.closed_form_ops +=
        mult * op_count_per_eval(Scheme::kMrc, StrategyKind::kSequential,
                                 num_ues, num_aps, num_antennas, first_pass,
                                 first_pass ? std::optional<int>(l + 1)
                                            : std::nullopt);
    const double network = eval.mrc_sum_se(
        assembled, num_aps, SumSeEvaluator::Purpose::kReporting, pool.ws[0]);
    out.network_sum_se.push_back(network);
    out.best_objective.push_back(best);
    ++out.generations;
    if (network > global_best) {
      global_best = network;
      out.best = assembled;
    }
    note_stagnation(st, best, cfg.stagnation_tolerance);
    if (st.stagnant >= cap_stagnant) break;
  }
}

void run_parallel(const SumSeEvaluator& eval, const GaConfig& cfg,
                  std::uint64_t seed,
                  const std::optional<SelectionMatrix>& warm, EvalPool& pool,
                  RunTrace& out) {
  const int num_ues = eval.num_ues();
  const int num_aps = eval.num_aps();
  const int num_antennas = eval.num_antennas();
  std::vector<Rng> rngs;
  rngs.reserve(num_aps);
  for (int l = 0; l < num_aps; ++l) rngs.push_back(make_rng(seed, 1000 + l));
  std::vector<SubGa> pops(num_aps);
  std::vector<GaState> states(num_aps,
                              GaState{cfg.crossover_nominal, cfg.mutation_nominal});
  std::vector<bool> frozen(num_aps, false);
  for (int l = 0; l < num_aps; ++l) {
    std::optional<SelectionMatrix> warm_block;
    if (warm) warm_block = warm->block(l);
    init_population(pops[l], num_ues, 1, num_antennas, cfg, rngs[l],
                    warm_block ? &*warm_block : nullptr);
  }
  SelectionMatrix assembled =
      SelectionMatrix::all_zeros(num_ues, num_aps, num_antennas);
  out.per_ap_best.resize(num_aps);
  const std::uint64_t per_eval =
      op_count_per_eval(Scheme::kMrc, StrategyKind::kParallel, num_ues, num_aps,
                        num_antennas);
  const std::uint64_t mult = ga_ops_multiplier(cfg.population, cfg.tournament);
  double global_best = -std::numeric_limits<double>::infinity();
  for (int t = 1; t <= cfg.max_generations; ++t) {
    bool any_active = false;
    for (int l = 0; l < num_aps; ++l) {
      if (frozen[l]) continue;
      any_active = true;
      const Objective f = [&eval, l](const SelectionMatrix& blk, Workspace& ws) {
        return eval.mrc_sum_se_single_ap(
            blk, l, SumSeEvaluator::Purpose::kObjective, ws);
      };
      const double best = evolve(pops[l], f, states[l], cfg, rngs[l], pool, false);
      assembled.set_block(l, pops[l].members[0]);
      out.per_ap_best[l].push_back(best);
      note_stagnation(states[l], best, cfg.stagnation_tolerance);
      if (states[l].stagnant >= cfg.max_stagnant) frozen[l] = true;
    }
    if (!any_active) break;
    out.closed_form_ops += mult * per_eval;
    const double network = eval.mrc_sum_se(
        assembled, num_aps, SumSeEvaluator::Purpose::kReporting, pool.ws[0]);
    out.network_sum_se.push_back(network);
    out.best_objective.push_back(network);
    ++out.generations;
    if (network > global_best) {
      global_best = network;
      out.best = assembled;
    }
  }
  if (out.network_sum_se.empty()) out.best = assembled;
}

}  // namespace

RunTrace run_strategy(Strategy strategy, const SumSeEvaluator& eval,
                      const GaConfig& cfg, std::uint64_t seed,
                      const std::optional<SelectionMatrix>& warm) {
  cfg.validate();
  if (warm &&
      (warm->num_ues() != eval.num_ues() || warm->num_aps() != eval.num_aps() ||
       warm->num_antennas() != eval.num_antennas())) {
    throw std::invalid_argument("run_strategy: warm-start matrix shape mismatch");
  }
  RunTrace out;
  out.strategy = strategy;
  out.best = SelectionMatrix::all_zeros(eval.num_ues(), eval.num_aps(),
                                        eval.num_antennas());
  EvalPool pool;
  pool.parallel = cfg.parallel_eval;
  pool.ws.reserve(max_threads());
  for (int i = 0; i < max_threads(); ++i) pool.ws.push_back(eval.make_workspace());

  const std::uint64_t tally_before = eval.accumulate_tally();
  const auto start = std::chrono::steady_clock::now();
  switch (strategy) {
    case Strategy::kCmrc:
    case Strategy::kCoslp:
      run_central(strategy, eval, cfg, seed, warm, pool, out);
      break;
    case Strategy::kSmrc:
      run_sequential(eval, cfg, seed, warm, pool, out);
      break;
    case Strategy::kPmrc:
      run_parallel(eval, cfg, seed, warm, pool, out);
      break;
  }
  const auto stop = std::chrono::steady_clock::now();
  out.seconds = std::chrono::duration<double>(stop - start).count();
  out.instrumented_tally = eval.accumulate_tally() - tally_before;
  return out;
}

}  // namespace rs
