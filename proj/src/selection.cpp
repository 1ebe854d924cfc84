#include "rs/selection.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rs {

SelectionMatrix::SelectionMatrix(int num_ues, int num_aps, int num_antennas,
                                 bool ones)
    : k_(num_ues), l_(num_aps), n_(num_antennas) {
  if (num_ues < 0 || num_aps < 1 || num_antennas < 1) {
    throw std::invalid_argument("SelectionMatrix: bad dimensions");
  }
  bits_.assign(static_cast<std::size_t>(k_) * cols(), ones ? 1 : 0);
}

SelectionMatrix SelectionMatrix::all_ones(int num_ues, int num_aps,
                                          int num_antennas) {
  return SelectionMatrix(num_ues, num_aps, num_antennas, true);
}

SelectionMatrix SelectionMatrix::all_zeros(int num_ues, int num_aps,
                                           int num_antennas) {
  return SelectionMatrix(num_ues, num_aps, num_antennas, false);
}

SelectionMatrix SelectionMatrix::random(int num_ues, int num_aps,
                                        int num_antennas, Rng& rng) {
  SelectionMatrix d(num_ues, num_aps, num_antennas);
  std::uint64_t word = 0;
  int left = 0;
  for (auto& b : d.bits_) {
    if (left == 0) {
      word = rng();
      left = 64;
    }
    b = static_cast<std::uint8_t>(word & 1u);
    word >>= 1;
    --left;
  }
  return d;
}

SelectionMatrix SelectionMatrix::block(int l) const {
  SelectionMatrix blk(k_, 1, n_);
  for (int k = 0; k < k_; ++k) {
    for (int n = 0; n < n_; ++n) blk.bits_[blk.idx(k, n)] = at(k, l, n);
  }
  return blk;
}

void SelectionMatrix::set_block(int l, const SelectionMatrix& blk) {
  if (blk.num_ues() != k_ || blk.cols() != n_) {
    throw std::invalid_argument("set_block: block shape mismatch");
  }
  for (int k = 0; k < k_; ++k) {
    for (int n = 0; n < n_; ++n) bits_[idx(k, l * n_ + n)] = blk.at(k, n);
  }
}

long SelectionMatrix::popcount() const {
  return std::accumulate(bits_.begin(), bits_.end(), 0L,
                         [](long acc, std::uint8_t b) { return acc + b; });
}

SelectionMatrix SelectionMatrix::reshaped(int num_aps, int num_antennas) const {
  if (num_aps * num_antennas != cols()) {
    throw std::invalid_argument("reshaped: column count must stay L*N");
  }
  SelectionMatrix d = *this;
  d.l_ = num_aps;
  d.n_ = num_antennas;
  return d;
}

std::string SelectionMatrix::to_text() const {
  std::string out;
  out.reserve(static_cast<std::size_t>(k_) * (cols() + 1));
  for (int k = 0; k < k_; ++k) {
    for (int c = 0; c < cols(); ++c) out.push_back(at(k, c) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

SelectionMatrix SelectionMatrix::from_text(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(line);
  }
  if (rows.empty()) {
    throw std::invalid_argument("SelectionMatrix::from_text: empty input");
  }
  const std::size_t width = rows.front().size();
  SelectionMatrix d(static_cast<int>(rows.size()), static_cast<int>(width), 1);
  for (int k = 0; k < d.k_; ++k) {
    if (rows[k].size() != width) {
      throw std::invalid_argument("SelectionMatrix::from_text: ragged rows");
    }
    for (std::size_t c = 0; c < width; ++c) {
      const char ch = rows[k][c];
      if (ch != '0' && ch != '1') {
        throw std::invalid_argument(
            "SelectionMatrix::from_text: characters must be 0 or 1");
      }
      d.bits_[d.idx(k, static_cast<int>(c))] = ch == '1' ? 1 : 0;
    }
  }
  return d;
}

SelectionMatrix SelectionMatrix::from_text(const std::string& text, int num_aps,
                                           int num_antennas) {
  return from_text(text).reshaped(num_aps, num_antennas);
}

SelectionMatrix SelectionMatrix::with_added_ue() const {
  SelectionMatrix d(k_ + 1, l_, n_);
  std::copy(bits_.begin(), bits_.end(), d.bits_.begin());
  return d;
}

SelectionMatrix SelectionMatrix::with_removed_ue(int k) const {
  if (k < 0 || k >= k_) {
    throw std::invalid_argument("with_removed_ue: UE index out of range");
  }
  SelectionMatrix d(k_ - 1, l_, n_);
  for (int kk = 0, dst = 0; kk < k_; ++kk) {
    if (kk == k) continue;
    std::copy(bits_.begin() + idx(kk, 0), bits_.begin() + idx(kk, 0) + cols(),
              d.bits_.begin() + d.idx(dst, 0));
    ++dst;
  }
  return d;
}

Eigen::VectorXcd masked_estimate(const SelectionMatrix& d, int k, int l,
                                 const Eigen::VectorXcd& hhat) {
  const int n = d.num_antennas();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (d.at(k, l, i)) out(i) = hhat(i);
  }
  return out;
}

Eigen::MatrixXd error_mask(const SelectionMatrix& d, int k, int l) {
  const int n = d.num_antennas();
  Eigen::VectorXd bits(n);
  for (int i = 0; i < n; ++i) bits(i) = d.at(k, l, i) ? 1.0 : 0.0;
  return bits * bits.transpose();
}

Eigen::MatrixXcd sigma_l(const SelectionMatrix& d, int l,
                         const std::vector<Eigen::MatrixXcd>& error_corr,
                         int stride, const Eigen::VectorXd& powers_mw,
                         double noise_mw) {
  const int n = d.num_antennas();
  Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < d.num_ues(); ++i) {
    const Eigen::MatrixXcd& rt = error_corr[static_cast<std::size_t>(i) * stride + l];
    for (int col = 0; col < n; ++col) {
      if (!d.at(i, l, col)) continue;
      for (int row = 0; row < n; ++row) {
        if (d.at(i, l, row)) sigma(row, col) += powers_mw(i) * rt(row, col);
      }
    }
  }
  sigma.diagonal().array() += noise_mw;
  return sigma;
}

}  // namespace rs
