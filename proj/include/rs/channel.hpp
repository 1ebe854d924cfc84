#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rs/geometry.hpp"
#include "rs/rng.hpp"

namespace rs {

inline constexpr double kBoltzmann = 1.38e-23;  // J/K

struct ChannelParams {
  double carrier_ghz = 2.0;
  double bandwidth_hz = 250e6;
  double noise_figure_db = 4.0;
  double noise_temperature_k = 290.0;
  double shadow_variance_db2 = 2.0;
  double shadow_delta = 0.7;
  double shadow_decorr_m = 9.0;
  double shadow_distance_m = 13.0;
  double angle_spread_deg = 7.5;
  double antenna_spacing_wl = 0.5;
  int tau_c = 300;
  int tau_p = 8;
  double max_power_mw = 30.0;
};

// Large-scale fading in dB at distance d; shadow_db enters only beyond
// shadow_distance_m.
double large_scale_fading_db(double distance_m, double carrier_ghz,
                             double shadow_db, double shadow_distance_m);

// Thermal noise power over the signal bandwidth, in dBm, including the noise
// figure.
double noise_power_dbm(double bandwidth_hz, double noise_figure_db,
                       double noise_temperature_k);

// Two-component shadowing field: F_{kl} = sqrt(delta) a_k + sqrt(1-delta) b_l
// with exponentially decaying correlation 2^(-distance/decorr_m) among the a's
// (UE side) and among the b's (AP side). Returns a K x L matrix in dB.
Eigen::MatrixXd correlated_shadowing(const Deployment& dep, double variance_db2,
                                     double delta, double decorr_m, Rng& rng);

// Gaussian local-scattering spatial correlation for a half-wavelength-style
// ULA: entry (m, n) couples beta, the nominal azimuth and the small angular
// spread (radians).
Eigen::MatrixXcd local_scattering_correlation(double beta_linear,
                                              double nominal_angle_rad,
                                              double angle_spread_rad,
                                              int num_antennas,
                                              double spacing_wl);

// Round-robin by UE index: UE k uses pilot k mod tau_p.
std::vector<int> assign_pilots(int num_ues, int tau_p);

struct ChannelStatistics {
  int K = 0;
  int L = 0;
  int N = 0;
  int tau_p = 0;
  int tau_c = 0;
  double noise_mw = 0.0;
  Eigen::VectorXd powers_mw;
  Eigen::MatrixXd beta_db;                      // K x L
  std::vector<Eigen::MatrixXcd> spatial_corr;   // R_{kl}, index k*L + l
  std::vector<Eigen::MatrixXcd> corr_factor;    // A_{kl} with A A^H = R_{kl}

  const Eigen::MatrixXcd& corr(int k, int l) const {
    return spatial_corr[static_cast<std::size_t>(k) * L + l];
  }
};

ChannelStatistics build_statistics(const Deployment& dep,
                                   const ChannelParams& params, Rng& rng);

struct ChannelRealization {
  int K = 0;
  int L = 0;
  int N = 0;
  int tau_p = 0;
  int tau_c = 0;
  double noise_mw = 0.0;
  Eigen::VectorXd powers_mw;
  std::vector<int> pilot_of;
  std::vector<Eigen::VectorXcd> true_channel;  // h_{kl}, index k*L + l
  std::vector<Eigen::VectorXcd> estimate;      // hhat_{kl}
  std::vector<Eigen::MatrixXcd> error_corr;    // Rtilde_{kl}

  const Eigen::VectorXcd& h(int k, int l) const {
    return true_channel[static_cast<std::size_t>(k) * L + l];
  }
  const Eigen::VectorXcd& hhat(int k, int l) const {
    return estimate[static_cast<std::size_t>(k) * L + l];
  }
  const Eigen::MatrixXcd& rtilde(int k, int l) const {
    return error_corr[static_cast<std::size_t>(k) * L + l];
  }
  Eigen::VectorXcd& mutable_hhat(int k, int l) {
    return estimate[static_cast<std::size_t>(k) * L + l];
  }
};

// One i.i.d. CN(0, R_{kl}) draw per link, in (k, l) order.
std::vector<Eigen::VectorXcd> draw_channels(const ChannelStatistics& stats,
                                            Rng& rng);

// Draws true channels and pilot noise, then forms MMSE estimates and error
// correlations. UEs sharing a pilot share the received pilot signal per AP.
ChannelRealization make_realization(const ChannelStatistics& stats, Rng& rng);

}  // namespace rs
