#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "rs/channel.hpp"
#include "rs/detection.hpp"
#include "rs/geometry.hpp"
#include "rs/rng.hpp"
#include "rs/selection.hpp"

namespace rstest {

struct Instance {
  rs::Deployment dep;
  rs::ChannelStatistics stats;
  rs::ChannelRealization chan;
};

// Small seeded network instance; pilots default to orthogonal (tau_p = K).
inline Instance make_instance(int num_ues, int num_aps, int num_antennas,
                              std::uint64_t seed, int tau_p = 0,
                              double side = 20.0) {
  rs::GeometryParams geo;
  geo.side_length_m = side;
  geo.num_aps = num_aps;
  geo.num_antennas = num_antennas;
  geo.num_ues = num_ues;
  rs::ChannelParams radio;
  radio.tau_p = tau_p > 0 ? tau_p : num_ues;
  Instance inst;
  rs::Rng geo_rng = rs::make_rng(seed, 1);
  inst.dep = rs::build_deployment(geo, geo_rng);
  rs::Rng stat_rng = rs::make_rng(seed, 2);
  inst.stats = rs::build_statistics(inst.dep, radio, stat_rng);
  rs::Rng chan_rng = rs::make_rng(seed, 3);
  inst.chan = rs::make_realization(inst.stats, chan_rng);
  return inst;
}

// Brute-force SINR: stack the masked estimates of the first `prefix` APs into
// one tall matrix, build the block-diagonal error-plus-noise covariance, form
// the combiner rows with explicit dense algebra (matched filter for MRC, one
// joint LMMSE solve otherwise) and evaluate the SINR quotient directly.
inline Eigen::VectorXd dense_sinr(const rs::ChannelRealization& chan,
                                  const rs::SelectionMatrix& d,
                                  rs::CombiningScheme scheme, int prefix) {
  const int num_ues = chan.K;
  const int num_antennas = chan.N;
  const int rows = num_antennas * prefix;
  Eigen::MatrixXcd stacked = Eigen::MatrixXcd::Zero(rows, num_ues);
  for (int k = 0; k < num_ues; ++k) {
    for (int l = 0; l < prefix; ++l) {
      stacked.block(l * num_antennas, k, num_antennas, 1) =
          rs::masked_estimate(d, k, l, chan.hhat(k, l));
    }
  }
  Eigen::MatrixXcd noise_cov = Eigen::MatrixXcd::Zero(rows, rows);
  for (int l = 0; l < prefix; ++l) {
    noise_cov.block(l * num_antennas, l * num_antennas, num_antennas,
                    num_antennas) =
        rs::sigma_l(d, l, chan.error_corr, chan.L, chan.powers_mw,
                    chan.noise_mw);
  }
  Eigen::MatrixXcd combiner;
  if (scheme == rs::CombiningScheme::kMrc) {
    combiner = stacked.adjoint();
  } else {
    Eigen::MatrixXcd power =
        chan.powers_mw.cast<std::complex<double>>().asDiagonal();
    Eigen::MatrixXcd innovation =
        noise_cov + stacked * power * stacked.adjoint();
    combiner = power * stacked.adjoint() * innovation.inverse();
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(num_ues);
  for (int k = 0; k < num_ues; ++k) {
    Eigen::RowVectorXcd row = combiner.row(k);
    if (row.norm() == 0.0) continue;
    const double signal =
        chan.powers_mw(k) * std::norm((row * stacked.col(k)).value());
    double interference = 0.0;
    for (int i = 0; i < num_ues; ++i) {
      if (i == k) continue;
      interference +=
          chan.powers_mw(i) * std::norm((row * stacked.col(i)).value());
    }
    const double noise =
        (row * noise_cov * row.adjoint()).value().real();
    out(k) = signal / (interference + noise);
  }
  return out;
}

}  // namespace rstest
