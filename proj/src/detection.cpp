#include "rs/detection.hpp"

#include <cmath>
#include <stdexcept>

#include "rs/linalg.hpp"

namespace rs {

Eigen::MatrixXcd masked_estimate_matrix(const ChannelRealization& chan,
                                        const SelectionMatrix& d, int l) {
  Eigen::MatrixXcd h(chan.N, chan.K);
  for (int k = 0; k < chan.K; ++k) {
    h.col(k) = masked_estimate(d, k, l, chan.hhat(k, l));
  }
  return h;
}

StepWeights mrc_weights(const Eigen::MatrixXcd& masked_h) {
  StepWeights w;
  const int k = static_cast<int>(masked_h.cols());
  w.a = Eigen::MatrixXcd::Identity(k, k);
  w.b = masked_h.adjoint();
  return w;
}

StepWeights oslp_weights(const Eigen::MatrixXcd& masked_h,
                         const Eigen::MatrixXcd& sigma,
                         const Eigen::MatrixXcd& p_prev) {
  const int k = static_cast<int>(masked_h.cols());
  Eigen::MatrixXcd s = sigma + masked_h * p_prev * masked_h.adjoint();
  s = ((s + s.adjoint()) * 0.5).eval();
  // T = P H^H S^{-1}; with S and P hermitian this is (S^{-1} H P)^H.
  Eigen::MatrixXcd t = hermitian_solve(s, masked_h * p_prev, "oslp_weights").adjoint();
  StepWeights w;
  w.a = Eigen::MatrixXcd::Identity(k, k) - t * masked_h;
  w.b = t;
  w.p = w.a * p_prev;
  w.p = ((w.p + w.p.adjoint()) * 0.5).eval();
  return w;
}

DetectionState run_sequential_detection(const ChannelRealization& chan,
                                        const SelectionMatrix& d,
                                        CombiningScheme scheme) {
  if (d.num_ues() != chan.K || d.num_aps() != chan.L ||
      d.num_antennas() != chan.N) {
    throw std::invalid_argument("run_sequential_detection: shape mismatch");
  }
  DetectionState st;
  st.num_ues = chan.K;
  st.num_aps = chan.L;
  st.num_antennas = chan.N;
  st.stacked.resize(chan.N * chan.L, chan.K);
  st.sigma.reserve(chan.L);
  st.bbar.reserve(chan.L);
  st.steps.reserve(chan.L);

  Eigen::MatrixXcd p = chan.powers_mw.cast<std::complex<double>>().asDiagonal();
  for (int l = 0; l < chan.L; ++l) {
    const Eigen::MatrixXcd h = masked_estimate_matrix(chan, d, l);
    st.stacked.middleRows(l * chan.N, chan.N) = h;
    st.sigma.push_back(
        sigma_l(d, l, chan.error_corr, chan.L, chan.powers_mw, chan.noise_mw));
    StepWeights w = scheme == CombiningScheme::kMrc
                        ? mrc_weights(h)
                        : oslp_weights(h, st.sigma.back(), p);
    if (scheme == CombiningScheme::kOslp) p = w.p;
    Eigen::MatrixXcd bbar(chan.K, chan.N * (l + 1));
    if (l == 0) {
      bbar = w.b;
    } else {
      bbar.leftCols(chan.N * l) = w.a * st.bbar.back();
      bbar.rightCols(chan.N) = w.b;
    }
    st.bbar.push_back(std::move(bbar));
    st.steps.push_back(std::move(w));
  }
  return st;
}

double sinr(const DetectionState& state, const ChannelRealization& chan, int k,
            int prefix) {
  if (prefix < 1 || prefix > state.num_aps) {
    throw std::invalid_argument("sinr: prefix out of range");
  }
  const Eigen::MatrixXcd& bbar = state.bbar[prefix - 1];
  const auto row = bbar.row(k);
  if (row.squaredNorm() == 0.0) return 0.0;
  const int n = state.num_antennas;
  const Eigen::RowVectorXcd gains =
      row * state.stacked.topRows(n * prefix);
  double numerator = chan.powers_mw(k) * std::norm(gains(k));
  double interference = 0.0;
  for (int i = 0; i < chan.K; ++i) {
    if (i == k) continue;
    interference += chan.powers_mw(i) * std::norm(gains(i));
  }
  double noise = 0.0;
  for (int l = 0; l < prefix; ++l) {
    const auto seg = row.segment(l * n, n);
    noise += (seg * state.sigma[l] * seg.adjoint())(0, 0).real();
  }
  const double den = interference + noise;
  if (den <= 0.0) return 0.0;
  return numerator / den;
}

double spectral_efficiency(double sinr_value, int tau_p, int tau_c) {
  if (tau_c < 1 || tau_p < 0 || tau_p > tau_c) {
    throw std::invalid_argument("spectral_efficiency: bad frame split");
  }
  const double prelog = 1.0 - static_cast<double>(tau_p) / tau_c;
  return prelog * std::log2(1.0 + sinr_value);
}

Eigen::VectorXd per_ue_se(const DetectionState& state,
                          const ChannelRealization& chan, int prefix) {
  Eigen::VectorXd se(chan.K);
  for (int k = 0; k < chan.K; ++k) {
    se(k) = spectral_efficiency(sinr(state, chan, k, prefix), chan.tau_p,
                                chan.tau_c);
  }
  return se;
}

double sum_se(const DetectionState& state, const ChannelRealization& chan,
              int prefix) {
  double total = 0.0;
  for (int k = 0; k < chan.K; ++k) {
    total += spectral_efficiency(sinr(state, chan, k, prefix), chan.tau_p,
                                 chan.tau_c);
  }
  return total;
}

Eigen::VectorXd centralized_lmmse_se(const ChannelRealization& chan,
                                     const SelectionMatrix& d) {
  const DetectionState st =
      run_sequential_detection(chan, d, CombiningScheme::kMrc);
  const int nl = chan.N * chan.L;
  Eigen::MatrixXcd k_big = Eigen::MatrixXcd::Zero(nl, nl);
  for (int l = 0; l < chan.L; ++l) {
    k_big.block(l * chan.N, l * chan.N, chan.N, chan.N) = st.sigma[l];
  }
  const Eigen::MatrixXcd scaled =
      st.stacked * chan.powers_mw.cast<std::complex<double>>().asDiagonal();
  Eigen::MatrixXcd c = scaled * st.stacked.adjoint() + k_big;
  c = ((c + c.adjoint()) * 0.5).eval();
  // Column k is v_k = p_k C^{-1} hbar_k.
  const Eigen::MatrixXcd v = hermitian_solve(c, scaled, "centralized_lmmse_se");

  Eigen::VectorXd se(chan.K);
  for (int k = 0; k < chan.K; ++k) {
    const Eigen::VectorXcd vk = v.col(k);
    if (vk.squaredNorm() == 0.0) {
      se(k) = 0.0;
      continue;
    }
    const Eigen::RowVectorXcd gains = vk.adjoint() * st.stacked;
    double numerator = chan.powers_mw(k) * std::norm(gains(k));
    double interference = 0.0;
    for (int i = 0; i < chan.K; ++i) {
      if (i == k) continue;
      interference += chan.powers_mw(i) * std::norm(gains(i));
    }
    const double noise = (vk.adjoint() * k_big * vk)(0, 0).real();
    const double den = interference + noise;
    const double s = den > 0.0 ? numerator / den : 0.0;
    se(k) = spectral_efficiency(s, chan.tau_p, chan.tau_c);
  }
  return se;
}

}  // namespace rs
