#include "rs/metrics.hpp"

#include <stdexcept>

namespace rs {

namespace {

std::uint64_t mrc_eval_ops(std::uint64_t k, std::uint64_t l, std::uint64_t n) {
  return 3 * k * l * n * n + 2 * k * k * l * n + k * l * l * n * n +
         2 * k * k * l * l * n + 2 * k * k * k * l * n;
}

std::uint64_t oslp_eval_ops(std::uint64_t k, std::uint64_t l, std::uint64_t n) {
  return 5 * k * l * n * n + 8 * k * k * l * n + 2 * k * l * l * n * n +
         2 * k * k * l * l * n + 2 * k * k * k * l * n + 3 * k * k * l;
}

}  // namespace

std::uint64_t op_count_per_eval(Scheme scheme, StrategyKind kind, int num_ues,
                                int num_aps, int num_antennas, bool first_loop,
                                std::optional<int> l) {
  if (num_ues < 0 || num_aps < 1 || num_antennas < 1) {
    throw std::invalid_argument("op_count_per_eval: bad dimensions");
  }
  if (scheme == Scheme::kOslp && kind != StrategyKind::kCentralized) {
    throw std::invalid_argument(
        "op_count_per_eval: OSLP is only defined for the centralized strategy");
  }
  if (first_loop && kind != StrategyKind::kSequential) {
    throw std::invalid_argument(
        "op_count_per_eval: first_loop applies to the sequential strategy only");
  }
  const std::uint64_t k = static_cast<std::uint64_t>(num_ues);
  const std::uint64_t big_l = static_cast<std::uint64_t>(num_aps);
  const std::uint64_t n = static_cast<std::uint64_t>(num_antennas);
  if (kind == StrategyKind::kSequential && first_loop) {
    if (!l.has_value()) {
      throw std::invalid_argument(
          "op_count_per_eval: the sequential first loop needs the AP prefix l");
    }
    if (*l < 1 || *l > num_aps) {
      throw std::invalid_argument("op_count_per_eval: prefix l out of range");
    }
    return mrc_eval_ops(k, static_cast<std::uint64_t>(*l), n);
  }
  return scheme == Scheme::kMrc ? mrc_eval_ops(k, big_l, n)
                                : oslp_eval_ops(k, big_l, n);
}

std::uint64_t ga_ops_multiplier(int n_pop, int t_k) {
  if (n_pop < 2 || t_k < 1) {
    throw std::invalid_argument("ga_ops_multiplier: bad GA parameters");
  }
  const std::uint64_t p = static_cast<std::uint64_t>(n_pop);
  const std::uint64_t t = static_cast<std::uint64_t>(t_k);
  return 4 * p + 5 * p * t - 2 * t;
}

std::uint64_t total_op_count(std::uint64_t per_eval, std::uint64_t n_iter,
                             int n_pop, int t_k) {
  return n_iter * ga_ops_multiplier(n_pop, t_k) * per_eval;
}

std::uint64_t fronthaul_symbols(Scheme scheme, StrategyKind kind, int num_ues,
                                int num_antennas, int num_aps, int tau_c,
                                int tau_p) {
  if (num_ues < 0 || num_antennas < 1 || num_aps < 1 || tau_c < 1 ||
      tau_p < 0 || tau_p > tau_c) {
    throw std::invalid_argument("fronthaul_symbols: bad parameters");
  }
  const std::uint64_t k = static_cast<std::uint64_t>(num_ues);
  const std::uint64_t n = static_cast<std::uint64_t>(num_antennas);
  const std::uint64_t big_l = static_cast<std::uint64_t>(num_aps);
  const std::uint64_t data = 2 * k * static_cast<std::uint64_t>(tau_c - tau_p);
  switch (kind) {
    case StrategyKind::kCentralized:
      if (scheme == Scheme::kOslp) return data + k * k + k * n * big_l;
      return data + k + k * n * big_l;
    case StrategyKind::kSequential:
      if (scheme != Scheme::kMrc) {
        throw std::invalid_argument(
            "fronthaul_symbols: OSLP is centralized-only");
      }
      return data + k + k * n;
    case StrategyKind::kParallel:
      if (scheme != Scheme::kMrc) {
        throw std::invalid_argument(
            "fronthaul_symbols: OSLP is centralized-only");
      }
      return data + k;
  }
  throw std::invalid_argument("fronthaul_symbols: unknown strategy kind");
}

}  // namespace rs
