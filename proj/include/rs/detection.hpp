#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rs/channel.hpp"
#include "rs/selection.hpp"

namespace rs {

enum class CombiningScheme { kMrc, kOslp };

// Weights of one sequential processing step: estimate update
// s_l = A s_{l-1} + B y_l, plus the OSLP covariance recursion P_l.
struct StepWeights {
  Eigen::MatrixXcd a;  // K x K
  Eigen::MatrixXcd b;  // K x N
  Eigen::MatrixXcd p;  // K x K, updated covariance (OSLP only)
};

// Everything the stripe has accumulated after each AP: the effective
// combining matrix over the stacked observations plus the per-AP noise
// covariances, for SINR evaluation at any prefix.
struct DetectionState {
  int num_ues = 0;
  int num_aps = 0;
  int num_antennas = 0;
  Eigen::MatrixXcd stacked;                // (N*L) x K masked estimates
  std::vector<Eigen::MatrixXcd> sigma;     // per AP, N x N
  std::vector<Eigen::MatrixXcd> bbar;      // per prefix l, K x (N*l)
  std::vector<StepWeights> steps;          // per AP
};

// N x K matrix whose column k is the masked estimate of UE k at AP l.
Eigen::MatrixXcd masked_estimate_matrix(const ChannelRealization& chan,
                                        const SelectionMatrix& d, int l);

StepWeights mrc_weights(const Eigen::MatrixXcd& masked_h);

// One OSLP step: T = P H^H (Sigma + H P H^H)^{-1}, A = I - T H, B = T,
// P_next = A P. All solves are hermitian Cholesky solves.
StepWeights oslp_weights(const Eigen::MatrixXcd& masked_h,
                         const Eigen::MatrixXcd& sigma,
                         const Eigen::MatrixXcd& p_prev);

DetectionState run_sequential_detection(const ChannelRealization& chan,
                                        const SelectionMatrix& d,
                                        CombiningScheme scheme);

// Instantaneous uplink SINR of UE k using the combining accumulated up to AP
// prefix (1-based). Returns 0 when the combining row is all zero.
double sinr(const DetectionState& state, const ChannelRealization& chan, int k,
            int prefix);

double spectral_efficiency(double sinr_value, int tau_p, int tau_c);

Eigen::VectorXd per_ue_se(const DetectionState& state,
                          const ChannelRealization& chan, int prefix);

double sum_se(const DetectionState& state, const ChannelRealization& chan,
              int prefix);

// Centralized LMMSE over the whole stripe, as the optimality reference for
// the final OSLP output.
Eigen::VectorXd centralized_lmmse_se(const ChannelRealization& chan,
                                     const SelectionMatrix& d);

}  // namespace rs
