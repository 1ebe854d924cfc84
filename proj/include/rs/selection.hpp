#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rs/rng.hpp"

namespace rs {

// Binary UE-antenna association matrix D: row k holds the L*N bits of UE k,
// grouped per AP (bit (l, n) at column l*N + n). Stored row-major as bytes so
// GA operators can treat an individual as a flat bit string.
class SelectionMatrix {
 public:
  SelectionMatrix() = default;
  SelectionMatrix(int num_ues, int num_aps, int num_antennas, bool ones = false);

  static SelectionMatrix all_ones(int num_ues, int num_aps, int num_antennas);
  static SelectionMatrix all_zeros(int num_ues, int num_aps, int num_antennas);
  static SelectionMatrix random(int num_ues, int num_aps, int num_antennas,
                                Rng& rng);

  int num_ues() const { return k_; }
  int num_aps() const { return l_; }
  int num_antennas() const { return n_; }
  int cols() const { return l_ * n_; }
  int size() const { return k_ * cols(); }

  std::uint8_t at(int k, int col) const { return bits_[idx(k, col)]; }
  std::uint8_t at(int k, int l, int n) const { return bits_[idx(k, l * n_ + n)]; }
  void set(int k, int col, bool v) { bits_[idx(k, col)] = v ? 1 : 0; }
  void set(int k, int l, int n, bool v) { set(k, l * n_ + n, v); }
  void flip(int flat) { bits_[flat] ^= 1; }

  const std::uint8_t* row(int k) const { return bits_.data() + idx(k, 0); }
  const std::uint8_t* data() const { return bits_.data(); }
  std::uint8_t* data() { return bits_.data(); }

  // Per-AP block as a K x N matrix (an L=1 SelectionMatrix).
  SelectionMatrix block(int l) const;
  void set_block(int l, const SelectionMatrix& blk);

  long popcount() const;

  // Relabels the column grouping; total column count must stay L*N.
  SelectionMatrix reshaped(int num_aps, int num_antennas) const;

  // One text line per UE, cols() characters of '0'/'1'.
  std::string to_text() const;
  // Parses the text form; the result carries one AP of cols() antennas until
  // reshaped. Ragged rows or characters outside {0,1} raise a parse error.
  static SelectionMatrix from_text(const std::string& text);
  static SelectionMatrix from_text(const std::string& text, int num_aps,
                                   int num_antennas);

  // Warm-start surgery for adaptability instances: a joining UE starts with an
  // all-zero row; a leaving UE drops its row.
  SelectionMatrix with_added_ue() const;
  SelectionMatrix with_removed_ue(int k) const;

  bool operator==(const SelectionMatrix& other) const = default;

 private:
  std::size_t idx(int k, int col) const {
    return static_cast<std::size_t>(k) * cols() + col;
  }

  int k_ = 0;
  int l_ = 0;
  int n_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Masked estimate for UE k at AP l: entries of hhat zeroed where the D bit
// is 0.
Eigen::VectorXcd masked_estimate(const SelectionMatrix& d, int k, int l,
                                 const Eigen::VectorXcd& hhat);

// Error-correlation mask E_{kl} = D_{kl} D_{kl}^T.
Eigen::MatrixXd error_mask(const SelectionMatrix& d, int k, int l);

// Effective noise covariance at AP l: sum_k p_k (E_{kl} had R~_{kl}) plus
// thermal noise on the diagonal. error_corr is indexed k*stride + l.
Eigen::MatrixXcd sigma_l(const SelectionMatrix& d, int l,
                         const std::vector<Eigen::MatrixXcd>& error_corr,
                         int stride, const Eigen::VectorXd& powers_mw,
                         double noise_mw);

}  // namespace rs
