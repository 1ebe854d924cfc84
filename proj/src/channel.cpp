#include "rs/channel.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "rs/linalg.hpp"

namespace rs {

double large_scale_fading_db(double distance_m, double carrier_ghz,
                             double shadow_db, double shadow_distance_m) {
  if (distance_m <= 0.0 || carrier_ghz <= 0.0) {
    throw std::invalid_argument("large_scale_fading_db: bad distance or carrier");
  }
  double db = -36.7 * std::log10(distance_m) - 22.7 - 26.0 * std::log10(carrier_ghz);
  if (distance_m > shadow_distance_m) db += shadow_db;
  return db;
}

double noise_power_dbm(double bandwidth_hz, double noise_figure_db,
                       double noise_temperature_k) {
  if (bandwidth_hz <= 0.0 || noise_temperature_k <= 0.0) {
    throw std::invalid_argument("noise_power_dbm: bad bandwidth or temperature");
  }
  return 10.0 * std::log10(kBoltzmann * noise_temperature_k * 1e3) +
         10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

Eigen::MatrixXd correlated_shadowing(const Deployment& dep, double variance_db2,
                                     double delta, double decorr_m, Rng& rng) {
  if (delta < 0.0 || delta > 1.0 || decorr_m <= 0.0 || variance_db2 < 0.0) {
    throw std::invalid_argument("correlated_shadowing: bad parameters");
  }
  const int num_ues = dep.num_ues();
  const int num_aps = dep.num_aps();
  Eigen::MatrixXd shadow(num_ues, num_aps);
  if (num_ues == 0 || num_aps == 0) return shadow;

  Eigen::MatrixXd corr_ue(num_ues, num_ues);
  for (int k = 0; k < num_ues; ++k) {
    for (int i = 0; i < num_ues; ++i) {
      corr_ue(k, i) = std::exp2(-dep.ue_ue_distance(k, i) / decorr_m);
    }
  }
  Eigen::MatrixXd corr_ap(num_aps, num_aps);
  for (int l = 0; l < num_aps; ++l) {
    for (int j = 0; j < num_aps; ++j) {
      corr_ap(l, j) = std::exp2(-dep.ap_ap_distance(l, j) / decorr_m);
    }
  }
  const Eigen::MatrixXd factor_ue = psd_sqrt_real(corr_ue);
  const Eigen::MatrixXd factor_ap = psd_sqrt_real(corr_ap);

  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd z_ue(num_ues);
  for (int k = 0; k < num_ues; ++k) z_ue(k) = gauss(rng);
  Eigen::VectorXd z_ap(num_aps);
  for (int l = 0; l < num_aps; ++l) z_ap(l) = gauss(rng);

  const double stddev = std::sqrt(variance_db2);
  const Eigen::VectorXd a = stddev * (factor_ue * z_ue);
  const Eigen::VectorXd b = stddev * (factor_ap * z_ap);
  const double wa = std::sqrt(delta);
  const double wb = std::sqrt(1.0 - delta);
  for (int k = 0; k < num_ues; ++k) {
    for (int l = 0; l < num_aps; ++l) {
      shadow(k, l) = wa * a(k) + wb * b(l);
    }
  }
  return shadow;
}

Eigen::MatrixXcd local_scattering_correlation(double beta_linear,
                                              double nominal_angle_rad,
                                              double angle_spread_rad,
                                              int num_antennas,
                                              double spacing_wl) {
  if (num_antennas < 1 || beta_linear < 0.0) {
    throw std::invalid_argument("local_scattering_correlation: bad parameters");
  }
  const double two_pi_d = 2.0 * std::numbers::pi * spacing_wl;
  const double s = std::sin(nominal_angle_rad);
  const double c = std::cos(nominal_angle_rad);
  Eigen::MatrixXcd r(num_antennas, num_antennas);
  for (int m = 0; m < num_antennas; ++m) {
    for (int n = 0; n < num_antennas; ++n) {
      const double gap = two_pi_d * (m - n);
      const std::complex<double> phase(0.0, gap * s);
      const double damp =
          std::exp(-0.5 * angle_spread_rad * angle_spread_rad * gap * c * gap * c);
      r(m, n) = beta_linear * std::exp(phase) * damp;
    }
  }
  return r;
}

std::vector<int> assign_pilots(int num_ues, int tau_p) {
  if (tau_p < 1) throw std::invalid_argument("assign_pilots: tau_p must be >= 1");
  std::vector<int> pilots(num_ues);
  for (int k = 0; k < num_ues; ++k) pilots[k] = k % tau_p;
  return pilots;
}

ChannelStatistics build_statistics(const Deployment& dep,
                                   const ChannelParams& params, Rng& rng) {
  ChannelStatistics st;
  st.K = dep.num_ues();
  st.L = dep.num_aps();
  st.N = dep.antennas_per_ap;
  st.tau_p = params.tau_p;
  st.tau_c = params.tau_c;
  st.noise_mw = std::pow(10.0, noise_power_dbm(params.bandwidth_hz,
                                               params.noise_figure_db,
                                               params.noise_temperature_k) /
                                   10.0);
  st.powers_mw = Eigen::VectorXd::Constant(st.K, params.max_power_mw);
  st.beta_db.resize(st.K, st.L);
  st.spatial_corr.reserve(static_cast<std::size_t>(st.K) * st.L);
  st.corr_factor.reserve(static_cast<std::size_t>(st.K) * st.L);

  const Eigen::MatrixXd shadow =
      correlated_shadowing(dep, params.shadow_variance_db2, params.shadow_delta,
                           params.shadow_decorr_m, rng);
  const double spread_rad = params.angle_spread_deg * std::numbers::pi / 180.0;
  for (int k = 0; k < st.K; ++k) {
    for (int l = 0; l < st.L; ++l) {
      const double d = dep.ue_ap_distance(k, l);
      st.beta_db(k, l) = large_scale_fading_db(
          d, params.carrier_ghz, shadow(k, l), params.shadow_distance_m);
      const double beta = std::pow(10.0, st.beta_db(k, l) / 10.0);
      const double angle = dep.azimuth_from_broadside(k, l);
      st.spatial_corr.push_back(local_scattering_correlation(
          beta, angle, spread_rad, st.N, params.antenna_spacing_wl));
      st.corr_factor.push_back(psd_sqrt(st.spatial_corr.back()));
    }
  }
  return st;
}

namespace {

Eigen::VectorXcd standard_complex_gaussian(int n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd z(n);
  const double scale = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    z(i) = std::complex<double>(re * scale, im * scale);
  }
  return z;
}

}  // namespace

std::vector<Eigen::VectorXcd> draw_channels(const ChannelStatistics& stats,
                                            Rng& rng) {
  std::vector<Eigen::VectorXcd> h;
  h.reserve(static_cast<std::size_t>(stats.K) * stats.L);
  for (int k = 0; k < stats.K; ++k) {
    for (int l = 0; l < stats.L; ++l) {
      h.push_back(stats.corr_factor[static_cast<std::size_t>(k) * stats.L + l] *
                  standard_complex_gaussian(stats.N, rng));
    }
  }
  return h;
}

ChannelRealization make_realization(const ChannelStatistics& stats, Rng& rng) {
  ChannelRealization out;
  out.K = stats.K;
  out.L = stats.L;
  out.N = stats.N;
  out.tau_p = stats.tau_p;
  out.tau_c = stats.tau_c;
  out.noise_mw = stats.noise_mw;
  out.powers_mw = stats.powers_mw;
  out.pilot_of = assign_pilots(stats.K, stats.tau_p);
  out.true_channel = draw_channels(stats, rng);
  out.estimate.assign(static_cast<std::size_t>(stats.K) * stats.L,
                      Eigen::VectorXcd::Zero(stats.N));
  out.error_corr.assign(static_cast<std::size_t>(stats.K) * stats.L,
                        Eigen::MatrixXcd::Zero(stats.N, stats.N));

  std::vector<std::vector<int>> groups(stats.tau_p);
  for (int k = 0; k < stats.K; ++k) groups[out.pilot_of[k]].push_back(k);

  const double tau = static_cast<double>(stats.tau_p);
  for (int l = 0; l < stats.L; ++l) {
    for (int p = 0; p < stats.tau_p; ++p) {
      if (groups[p].empty()) continue;
      Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(stats.N, stats.N);
      for (int i : groups[p]) {
        psi += stats.powers_mw(i) * tau * stats.corr(i, l);
      }
      psi.diagonal().array() += stats.noise_mw;
      // Despread pilot observation shared by the whole pilot group at AP l.
      Eigen::VectorXcd y = std::sqrt(tau * stats.noise_mw) *
                           standard_complex_gaussian(stats.N, rng);
      for (int i : groups[p]) {
        y += std::sqrt(stats.powers_mw(i) * tau) *
             out.true_channel[static_cast<std::size_t>(i) * stats.L + l];
      }
      const Eigen::VectorXcd u = hermitian_solve(psi, y, "make_realization");
      for (int k : groups[p]) {
        const Eigen::MatrixXcd& r = stats.corr(k, l);
        const double scale = std::sqrt(stats.powers_mw(k) * tau);
        out.estimate[static_cast<std::size_t>(k) * stats.L + l] = scale * (r * u);
        const Eigen::MatrixXcd m = hermitian_solve(psi, r, "make_realization");
        Eigen::MatrixXcd rt = r - stats.powers_mw(k) * tau * (r * m);
        out.error_corr[static_cast<std::size_t>(k) * stats.L + l] =
            ((rt + rt.adjoint()) * 0.5).eval();
      }
    }
  }
  return out;
}

}  // namespace rs
