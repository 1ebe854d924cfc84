#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace rs {

enum class Scheme { kMrc, kOslp };
enum class StrategyKind { kCentralized, kSequential, kParallel };

// Closed-form arithmetic-op estimate for one objective evaluation. The
// sequential first-traversal branch prices the objective at the visited AP
// prefix and requires `l`; OSLP exists only for the centralized strategy.
std::uint64_t op_count_per_eval(Scheme scheme, StrategyKind kind, int num_ues,
                                int num_aps, int num_antennas,
                                bool first_loop = false,
                                std::optional<int> l = std::nullopt);

// Objective evaluations implied by one GA generation, scaled by tournament
// overhead: 4 N_pop + 5 N_pop t_k - 2 t_k.
std::uint64_t ga_ops_multiplier(int n_pop, int t_k);

std::uint64_t total_op_count(std::uint64_t per_eval, std::uint64_t n_iter,
                             int n_pop, int t_k);

// Fronthaul load in complex symbols per coherence block, per strategy family.
std::uint64_t fronthaul_symbols(Scheme scheme, StrategyKind kind, int num_ues,
                                int num_antennas, int num_aps, int tau_c,
                                int tau_p);

struct CostReport {
  std::string strategy;
  int attempts = 0;
  double n_iter_mean = 0.0;
  std::uint64_t n_iter_max = 0;
  double closed_form_ops_mean = 0.0;
  double instrumented_tally_mean = 0.0;
  std::uint64_t fronthaul = 0;
  double seconds_per_loop_mean = 0.0;
  int loops_to_convergence = -1;
  double final_sum_se_mean = 0.0;
  double final_sum_se_best = 0.0;
};

}  // namespace rs
