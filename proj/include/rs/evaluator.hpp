#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <complex>
#include <cstdint>
#include <vector>

#include "rs/channel.hpp"
#include "rs/selection.hpp"

namespace rs {

// Fitness kernels over one fixed channel realization. Pairwise estimate
// products and scaled error correlations are tabulated once so a GA can score
// thousands of candidate selection matrices without re-running the detection
// recursion. MRC values are reproducible masked sums: the result depends only
// on the bits inside the evaluated prefix, and a matrix whose later blocks are
// all zero scores exactly the same as the corresponding prefix evaluation.
//
// Evaluations are const and safe to run concurrently as long as each thread
// uses its own Workspace. Call counters distinguish objective evaluations
// (driving a GA) from reporting evaluations (tracing network SE), which is how
// the per-AP independence of the parallel strategy is asserted.
class SumSeEvaluator {
 public:
  enum class Purpose { kObjective, kReporting };

  struct CallCounts {
    std::uint64_t mrc_full = 0;
    std::uint64_t mrc_prefix = 0;
    std::uint64_t mrc_cumulative = 0;
    std::uint64_t single_ap = 0;
    std::uint64_t oslp = 0;
  };

  struct Workspace {
    std::vector<double> noise_q;
    std::vector<std::uint8_t> row_any;
    std::vector<std::complex<double>> sigma;
    std::vector<std::complex<double>> m_acc;
    SelectionMatrix scratch;
    // OSLP recursion scratch.
    Eigen::MatrixXcd stacked;
    Eigen::MatrixXcd bbar;
    Eigen::MatrixXcd bbar_next;
    Eigen::MatrixXcd p;
    Eigen::MatrixXcd p_next;
    Eigen::MatrixXcd s;
    Eigen::MatrixXcd xh;
    Eigen::MatrixXcd th;
    Eigen::MatrixXcd a;
    Eigen::MatrixXcd gains;
    std::vector<Eigen::MatrixXcd> sigmas;
    Eigen::LLT<Eigen::MatrixXcd> llt;
  };

  explicit SumSeEvaluator(const ChannelRealization& chan);

  int num_ues() const { return k_; }
  int num_aps() const { return l_; }
  int num_antennas() const { return n_; }
  double prelog() const { return prelog_; }

  Workspace make_workspace() const;

  // Sum SE with MRC combining accumulated over the first `prefix` APs.
  double mrc_sum_se(const SelectionMatrix& d, int prefix, Purpose purpose,
                    Workspace& ws) const;

  // Sum over every prefix up to `prefix` of the prefix sum SE (the literal
  // double-sum reading of the sequential first-loop objective).
  double mrc_sum_se_cumulative(const SelectionMatrix& d, int prefix,
                               Purpose purpose, Workspace& ws) const;

  // Network SE when AP l is the only active AP; `block` is K x N (one-AP
  // matrix). Reads no other AP's selection bits.
  double mrc_sum_se_single_ap(const SelectionMatrix& block, int l,
                              Purpose purpose, Workspace& ws) const;

  double oslp_sum_se(const SelectionMatrix& d, Purpose purpose,
                     Workspace& ws) const;

  Eigen::VectorXd mrc_per_ue_se(const SelectionMatrix& d, int prefix,
                                Workspace& ws) const;
  Eigen::VectorXd oslp_per_ue_se(const SelectionMatrix& d, Workspace& ws) const;

  CallCounts counts(Purpose purpose) const;
  // Masked accumulate operations actually executed (MRC paths) plus GEMM
  // multiply volume (OSLP path).
  std::uint64_t accumulate_tally() const;
  void reset_counters() const;

 private:
  double mrc_value(const std::uint8_t* bits, int stride, int prefix,
                   Workspace& ws, std::uint64_t& tally, double* per_ue) const;
  double single_ap_value(const std::uint8_t* bits, int l, Workspace& ws,
                         std::uint64_t& tally) const;
  double cumulative_value(const std::uint8_t* bits, int stride, int prefix,
                          Workspace& ws, std::uint64_t& tally) const;
  double oslp_value(const SelectionMatrix& d, Workspace& ws,
                    std::uint64_t& tally, double* per_ue) const;

  enum class CallKind { kMrcFull, kMrcPrefix, kMrcCumulative, kSingleAp, kOslp };
  void bump(Purpose purpose, CallKind kind) const;

  int k_ = 0;
  int l_ = 0;
  int n_ = 0;
  double noise_mw_ = 0.0;
  double prelog_ = 0.0;
  Eigen::VectorXd powers_;
  // conj(hhat_k) .* hhat_i per column; contiguous over (l, n) for fixed (k, i).
  std::vector<std::complex<double>> gains_;
  // p_i * Rtilde_{il}, column-major N x N per (i, l).
  std::vector<std::complex<double>> err_;
  std::vector<std::complex<double>> hhat_;

  struct AtomicCounts {
    std::atomic<std::uint64_t> mrc_full{0};
    std::atomic<std::uint64_t> mrc_prefix{0};
    std::atomic<std::uint64_t> mrc_cumulative{0};
    std::atomic<std::uint64_t> single_ap{0};
    std::atomic<std::uint64_t> oslp{0};
  };
  mutable AtomicCounts objective_counts_;
  mutable AtomicCounts reporting_counts_;
  mutable std::atomic<std::uint64_t> tally_{0};
};

}  // namespace rs
