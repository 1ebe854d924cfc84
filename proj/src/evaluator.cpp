#include "rs/evaluator.hpp"

#include <cmath>
#include <stdexcept>

namespace rs {

namespace {

void hermitianize(Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(m.rows());
  for (int c = 0; c < n; ++c) {
    m(c, c) = std::complex<double>(m(c, c).real(), 0.0);
    for (int r = c + 1; r < n; ++r) {
      const std::complex<double> avg = 0.5 * (m(r, c) + std::conj(m(c, r)));
      m(r, c) = avg;
      m(c, r) = std::conj(avg);
    }
  }
}

}  // namespace

SumSeEvaluator::SumSeEvaluator(const ChannelRealization& chan)
    : k_(chan.K),
      l_(chan.L),
      n_(chan.N),
      noise_mw_(chan.noise_mw),
      prelog_(1.0 - static_cast<double>(chan.tau_p) / chan.tau_c),
      powers_(chan.powers_mw) {
  const std::size_t cols = static_cast<std::size_t>(l_) * n_;
  hhat_.resize(static_cast<std::size_t>(k_) * cols);
  for (int k = 0; k < k_; ++k) {
    for (int l = 0; l < l_; ++l) {
      const Eigen::VectorXcd& h = chan.hhat(k, l);
      for (int n = 0; n < n_; ++n) {
        hhat_[(static_cast<std::size_t>(k) * l_ + l) * n_ + n] = h(n);
      }
    }
  }
  gains_.resize(static_cast<std::size_t>(k_) * k_ * cols);
  for (int k = 0; k < k_; ++k) {
    for (int i = 0; i < k_; ++i) {
      std::complex<double>* g =
          gains_.data() + (static_cast<std::size_t>(k) * k_ + i) * cols;
      const std::complex<double>* hk =
          hhat_.data() + static_cast<std::size_t>(k) * cols;
      const std::complex<double>* hi =
          hhat_.data() + static_cast<std::size_t>(i) * cols;
      for (std::size_t c = 0; c < cols; ++c) g[c] = std::conj(hk[c]) * hi[c];
    }
  }
  err_.resize(static_cast<std::size_t>(k_) * l_ * n_ * n_);
  for (int i = 0; i < k_; ++i) {
    for (int l = 0; l < l_; ++l) {
      const Eigen::MatrixXcd& rt = chan.rtilde(i, l);
      std::complex<double>* e =
          err_.data() + (static_cast<std::size_t>(i) * l_ + l) * n_ * n_;
      for (int col = 0; col < n_; ++col) {
        for (int row = 0; row < n_; ++row) {
          e[static_cast<std::size_t>(col) * n_ + row] = powers_(i) * rt(row, col);
        }
      }
    }
  }
}

SumSeEvaluator::Workspace SumSeEvaluator::make_workspace() const {
  Workspace ws;
  ws.noise_q.assign(k_, 0.0);
  ws.row_any.assign(k_, 0);
  ws.sigma.assign(static_cast<std::size_t>(n_) * n_, {0.0, 0.0});
  ws.m_acc.assign(static_cast<std::size_t>(k_) * k_, {0.0, 0.0});
  ws.scratch = SelectionMatrix(k_, l_, n_);
  const int nl = n_ * l_;
  ws.stacked = Eigen::MatrixXcd::Zero(nl, k_);
  ws.bbar = Eigen::MatrixXcd::Zero(k_, nl);
  ws.bbar_next = Eigen::MatrixXcd::Zero(k_, nl);
  ws.p = Eigen::MatrixXcd::Zero(k_, k_);
  ws.p_next = Eigen::MatrixXcd::Zero(k_, k_);
  ws.s = Eigen::MatrixXcd::Zero(n_, n_);
  ws.xh = Eigen::MatrixXcd::Zero(n_, k_);
  ws.th = Eigen::MatrixXcd::Zero(n_, k_);
  ws.a = Eigen::MatrixXcd::Zero(k_, k_);
  ws.gains = Eigen::MatrixXcd::Zero(k_, k_);
  ws.sigmas.assign(l_, Eigen::MatrixXcd::Zero(n_, n_));
  return ws;
}

void SumSeEvaluator::bump(Purpose purpose, CallKind kind) const {
  AtomicCounts& c = purpose == Purpose::kObjective ? objective_counts_
                                                   : reporting_counts_;
  switch (kind) {
    case CallKind::kMrcFull:
      c.mrc_full.fetch_add(1, std::memory_order_relaxed);
      break;
    case CallKind::kMrcPrefix:
      c.mrc_prefix.fetch_add(1, std::memory_order_relaxed);
      break;
    case CallKind::kMrcCumulative:
      c.mrc_cumulative.fetch_add(1, std::memory_order_relaxed);
      break;
    case CallKind::kSingleAp:
      c.single_ap.fetch_add(1, std::memory_order_relaxed);
      break;
    case CallKind::kOslp:
      c.oslp.fetch_add(1, std::memory_order_relaxed);
      break;
  }
}

SumSeEvaluator::CallCounts SumSeEvaluator::counts(Purpose purpose) const {
  const AtomicCounts& c = purpose == Purpose::kObjective ? objective_counts_
                                                         : reporting_counts_;
  CallCounts out;
  out.mrc_full = c.mrc_full.load();
  out.mrc_prefix = c.mrc_prefix.load();
  out.mrc_cumulative = c.mrc_cumulative.load();
  out.single_ap = c.single_ap.load();
  out.oslp = c.oslp.load();
  return out;
}

std::uint64_t SumSeEvaluator::accumulate_tally() const { return tally_.load(); }

void SumSeEvaluator::reset_counters() const {
  for (AtomicCounts* c : {&objective_counts_, &reporting_counts_}) {
    c->mrc_full = 0;
    c->mrc_prefix = 0;
    c->mrc_cumulative = 0;
    c->single_ap = 0;
    c->oslp = 0;
  }
  tally_ = 0;
}

double SumSeEvaluator::mrc_value(const std::uint8_t* bits, int stride,
                                 int prefix, Workspace& ws,
                                 std::uint64_t& tally, double* per_ue) const {
  const int cols = l_ * n_;
  const int pcols = prefix * n_;
  for (int k = 0; k < k_; ++k) ws.noise_q[k] = 0.0;
  for (int l = 0; l < prefix; ++l) {
    std::complex<double>* sig = ws.sigma.data();
    std::fill(ws.sigma.begin(), ws.sigma.end(), std::complex<double>(0.0, 0.0));
    for (int i = 0; i < k_; ++i) {
      const std::uint8_t* bi = bits + static_cast<std::size_t>(i) * stride + l * n_;
      const std::complex<double>* e =
          err_.data() + (static_cast<std::size_t>(i) * l_ + l) * n_ * n_;
      for (int col = 0; col < n_; ++col) {
        if (!bi[col]) continue;
        for (int row = 0; row < n_; ++row) {
          if (bi[row]) {
            sig[static_cast<std::size_t>(col) * n_ + row] +=
                e[static_cast<std::size_t>(col) * n_ + row];
            ++tally;
          }
        }
      }
    }
    for (int n = 0; n < n_; ++n) {
      sig[static_cast<std::size_t>(n) * n_ + n] += noise_mw_;
    }
    for (int k = 0; k < k_; ++k) {
      const std::uint8_t* bk = bits + static_cast<std::size_t>(k) * stride + l * n_;
      const std::complex<double>* h =
          hhat_.data() + (static_cast<std::size_t>(k) * l_ + l) * n_;
      std::complex<double> quad(0.0, 0.0);
      for (int col = 0; col < n_; ++col) {
        if (!bk[col]) continue;
        std::complex<double> acc(0.0, 0.0);
        for (int row = 0; row < n_; ++row) {
          if (bk[row]) {
            acc += std::conj(h[row]) * sig[static_cast<std::size_t>(col) * n_ + row];
            ++tally;
          }
        }
        quad += acc * h[col];
        ++tally;
      }
      ws.noise_q[k] += quad.real();
    }
  }

  double total = 0.0;
  for (int k = 0; k < k_; ++k) {
    const std::uint8_t* bk = bits + static_cast<std::size_t>(k) * stride;
    bool empty = true;
    for (int c = 0; c < pcols; ++c) {
      if (bk[c]) {
        empty = false;
        break;
      }
    }
    if (empty) {
      if (per_ue) per_ue[k] = 0.0;
      continue;
    }
    double num = 0.0;
    double interf = 0.0;
    for (int i = 0; i < k_; ++i) {
      const std::uint8_t* bi = bits + static_cast<std::size_t>(i) * stride;
      const std::complex<double>* g =
          gains_.data() + (static_cast<std::size_t>(k) * k_ + i) * cols;
      std::complex<double> acc(0.0, 0.0);
      for (int c = 0; c < pcols; ++c) {
        if (bk[c] & bi[c]) {
          acc += g[c];
          ++tally;
        }
      }
      const double mag = std::norm(acc);
      if (i == k) {
        num = powers_(k) * mag;
      } else {
        interf += powers_(i) * mag;
      }
    }
    const double den = interf + ws.noise_q[k];
    const double sinr_v = den > 0.0 ? num / den : 0.0;
    const double se = prelog_ * std::log2(1.0 + sinr_v);
    if (per_ue) per_ue[k] = se;
    total += se;
  }
  return total;
}

double SumSeEvaluator::single_ap_value(const std::uint8_t* bits, int l,
                                       Workspace& ws,
                                       std::uint64_t& tally) const {
  const int cols = l_ * n_;
  std::complex<double>* sig = ws.sigma.data();
  std::fill(ws.sigma.begin(), ws.sigma.end(), std::complex<double>(0.0, 0.0));
  for (int i = 0; i < k_; ++i) {
    const std::uint8_t* bi = bits + static_cast<std::size_t>(i) * n_;
    const std::complex<double>* e =
        err_.data() + (static_cast<std::size_t>(i) * l_ + l) * n_ * n_;
    for (int col = 0; col < n_; ++col) {
      if (!bi[col]) continue;
      for (int row = 0; row < n_; ++row) {
        if (bi[row]) {
          sig[static_cast<std::size_t>(col) * n_ + row] +=
              e[static_cast<std::size_t>(col) * n_ + row];
          ++tally;
        }
      }
    }
  }
  for (int n = 0; n < n_; ++n) {
    sig[static_cast<std::size_t>(n) * n_ + n] += noise_mw_;
  }

  double total = 0.0;
  for (int k = 0; k < k_; ++k) {
    const std::uint8_t* bk = bits + static_cast<std::size_t>(k) * n_;
    bool empty = true;
    for (int n = 0; n < n_; ++n) {
      if (bk[n]) {
        empty = false;
        break;
      }
    }
    if (empty) continue;
    const std::complex<double>* h =
        hhat_.data() + (static_cast<std::size_t>(k) * l_ + l) * n_;
    std::complex<double> quad(0.0, 0.0);
    for (int col = 0; col < n_; ++col) {
      if (!bk[col]) continue;
      std::complex<double> acc(0.0, 0.0);
      for (int row = 0; row < n_; ++row) {
        if (bk[row]) {
          acc += std::conj(h[row]) * sig[static_cast<std::size_t>(col) * n_ + row];
          ++tally;
        }
      }
      quad += acc * h[col];
      ++tally;
    }
    double num = 0.0;
    double interf = 0.0;
    for (int i = 0; i < k_; ++i) {
      const std::uint8_t* bi = bits + static_cast<std::size_t>(i) * n_;
      const std::complex<double>* g =
          gains_.data() + (static_cast<std::size_t>(k) * k_ + i) * cols + l * n_;
      std::complex<double> acc(0.0, 0.0);
      for (int n = 0; n < n_; ++n) {
        if (bk[n] & bi[n]) {
          acc += g[n];
          ++tally;
        }
      }
      const double mag = std::norm(acc);
      if (i == k) {
        num = powers_(k) * mag;
      } else {
        interf += powers_(i) * mag;
      }
    }
    const double den = interf + quad.real();
    const double sinr_v = den > 0.0 ? num / den : 0.0;
    total += prelog_ * std::log2(1.0 + sinr_v);
  }
  return total;
}

double SumSeEvaluator::cumulative_value(const std::uint8_t* bits, int stride,
                                        int prefix, Workspace& ws,
                                        std::uint64_t& tally) const {
  const int cols = l_ * n_;
  for (int k = 0; k < k_; ++k) {
    ws.noise_q[k] = 0.0;
    ws.row_any[k] = 0;
  }
  std::fill(ws.m_acc.begin(), ws.m_acc.end(), std::complex<double>(0.0, 0.0));
  double cumulative = 0.0;
  for (int l = 0; l < prefix; ++l) {
    std::complex<double>* sig = ws.sigma.data();
    std::fill(ws.sigma.begin(), ws.sigma.end(), std::complex<double>(0.0, 0.0));
    for (int i = 0; i < k_; ++i) {
      const std::uint8_t* bi = bits + static_cast<std::size_t>(i) * stride + l * n_;
      const std::complex<double>* e =
          err_.data() + (static_cast<std::size_t>(i) * l_ + l) * n_ * n_;
      for (int col = 0; col < n_; ++col) {
        if (!bi[col]) continue;
        for (int row = 0; row < n_; ++row) {
          if (bi[row]) {
            sig[static_cast<std::size_t>(col) * n_ + row] +=
                e[static_cast<std::size_t>(col) * n_ + row];
            ++tally;
          }
        }
      }
    }
    for (int n = 0; n < n_; ++n) {
      sig[static_cast<std::size_t>(n) * n_ + n] += noise_mw_;
    }
    for (int k = 0; k < k_; ++k) {
      const std::uint8_t* bk = bits + static_cast<std::size_t>(k) * stride + l * n_;
      const std::complex<double>* h =
          hhat_.data() + (static_cast<std::size_t>(k) * l_ + l) * n_;
      std::complex<double> quad(0.0, 0.0);
      for (int col = 0; col < n_; ++col) {
        if (!bk[col]) continue;
        ws.row_any[k] = 1;
        std::complex<double> acc(0.0, 0.0);
        for (int row = 0; row < n_; ++row) {
          if (bk[row]) {
            acc += std::conj(h[row]) * sig[static_cast<std::size_t>(col) * n_ + row];
            ++tally;
          }
        }
        quad += acc * h[col];
        ++tally;
      }
      ws.noise_q[k] += quad.real();
      const std::uint8_t* bk_row = bits + static_cast<std::size_t>(k) * stride;
      for (int i = 0; i < k_; ++i) {
        const std::uint8_t* bi_row = bits + static_cast<std::size_t>(i) * stride;
        const std::complex<double>* g =
            gains_.data() + (static_cast<std::size_t>(k) * k_ + i) * cols;
        std::complex<double> acc = ws.m_acc[static_cast<std::size_t>(k) * k_ + i];
        for (int c = l * n_; c < (l + 1) * n_; ++c) {
          if (bk_row[c] & bi_row[c]) {
            acc += g[c];
            ++tally;
          }
        }
        ws.m_acc[static_cast<std::size_t>(k) * k_ + i] = acc;
      }
    }
    double prefix_sum = 0.0;
    for (int k = 0; k < k_; ++k) {
      if (!ws.row_any[k]) continue;
      double num = 0.0;
      double interf = 0.0;
      for (int i = 0; i < k_; ++i) {
        const double mag = std::norm(ws.m_acc[static_cast<std::size_t>(k) * k_ + i]);
        if (i == k) {
          num = powers_(k) * mag;
        } else {
          interf += powers_(i) * mag;
        }
      }
      const double den = interf + ws.noise_q[k];
      const double sinr_v = den > 0.0 ? num / den : 0.0;
      prefix_sum += prelog_ * std::log2(1.0 + sinr_v);
    }
    cumulative += prefix_sum;
  }
  return cumulative;
}

double SumSeEvaluator::oslp_value(const SelectionMatrix& d, Workspace& ws,
                                  std::uint64_t& tally, double* per_ue) const {
  const int nl = n_ * l_;
  ws.stacked.setZero();
  const std::size_t cols = static_cast<std::size_t>(l_) * n_;
  for (int k = 0; k < k_; ++k) {
    const std::uint8_t* bk = d.row(k);
    const std::complex<double>* h = hhat_.data() + static_cast<std::size_t>(k) * cols;
    for (int c = 0; c < static_cast<int>(cols); ++c) {
      if (bk[c]) ws.stacked(c, k) = h[c];
    }
  }
  ws.p.setZero();
  for (int k = 0; k < k_; ++k) ws.p(k, k) = powers_(k);

  for (int l = 0; l < l_; ++l) {
    Eigen::MatrixXcd& sig = ws.sigmas[l];
    sig.setZero();
    for (int i = 0; i < k_; ++i) {
      const std::uint8_t* bi = d.row(i) + l * n_;
      const std::complex<double>* e =
          err_.data() + (static_cast<std::size_t>(i) * l_ + l) * n_ * n_;
      for (int col = 0; col < n_; ++col) {
        if (!bi[col]) continue;
        for (int row = 0; row < n_; ++row) {
          if (bi[row]) {
            sig(row, col) += e[static_cast<std::size_t>(col) * n_ + row];
            ++tally;
          }
        }
      }
    }
    sig.diagonal().array() += noise_mw_;

    const auto hm = ws.stacked.middleRows(l * n_, n_);
    ws.xh.noalias() = hm * ws.p;
    ws.s.noalias() = ws.xh * hm.adjoint();
    ws.s += sig;
    hermitianize(ws.s);
    ws.llt.compute(ws.s);
    if (ws.llt.info() != Eigen::Success) {
      throw std::runtime_error("oslp_sum_se: Cholesky factorization failed");
    }
    ws.th = ws.llt.solve(ws.xh);
    const double rhs_norm = ws.xh.norm();
    if (rhs_norm > 0.0 &&
        (ws.s * ws.th - ws.xh).norm() > 1e-8 * rhs_norm) {
      throw std::runtime_error("oslp_sum_se: solve residual above tolerance");
    }
    ws.a.noalias() = -(ws.th.adjoint() * hm);
    ws.a.diagonal().array() += 1.0;
    if (l == 0) {
      ws.bbar.leftCols(n_) = ws.th.adjoint();
    } else {
      ws.bbar_next.leftCols(l * n_).noalias() = ws.a * ws.bbar.leftCols(l * n_);
      ws.bbar_next.middleCols(l * n_, n_) = ws.th.adjoint();
      ws.bbar.swap(ws.bbar_next);
    }
    ws.p_next.noalias() = ws.a * ws.p;
    hermitianize(ws.p_next);
    ws.p.swap(ws.p_next);
    tally += static_cast<std::uint64_t>(n_) * k_ * k_   // xh
             + static_cast<std::uint64_t>(n_) * n_ * k_  // s
             + static_cast<std::uint64_t>(n_) * n_ * k_  // solve backsubs
             + static_cast<std::uint64_t>(k_) * k_ * n_  // a
             + static_cast<std::uint64_t>(k_) * k_ * l * n_  // bbar
             + static_cast<std::uint64_t>(k_) * k_ * k_;     // p
  }

  ws.gains.noalias() = ws.bbar * ws.stacked;
  tally += static_cast<std::uint64_t>(k_) * k_ * nl;
  double total = 0.0;
  for (int k = 0; k < k_; ++k) {
    const auto row = ws.bbar.row(k);
    if (row.squaredNorm() == 0.0) {
      if (per_ue) per_ue[k] = 0.0;
      continue;
    }
    double num = 0.0;
    double interf = 0.0;
    for (int i = 0; i < k_; ++i) {
      const double mag = std::norm(ws.gains(k, i));
      if (i == k) {
        num = powers_(k) * mag;
      } else {
        interf += powers_(i) * mag;
      }
    }
    double noise = 0.0;
    for (int l = 0; l < l_; ++l) {
      const auto seg = row.segment(l * n_, n_);
      noise += (seg * ws.sigmas[l] * seg.adjoint())(0, 0).real();
    }
    tally += static_cast<std::uint64_t>(l_) * n_ * (n_ + 1);
    const double den = interf + noise;
    const double sinr_v = den > 0.0 ? num / den : 0.0;
    const double se = prelog_ * std::log2(1.0 + sinr_v);
    if (per_ue) per_ue[k] = se;
    total += se;
  }
  return total;
}

double SumSeEvaluator::mrc_sum_se(const SelectionMatrix& d, int prefix,
                                  Purpose purpose, Workspace& ws) const {
  if (prefix < 1 || prefix > l_) {
    throw std::invalid_argument("mrc_sum_se: prefix out of range");
  }
  bump(purpose, prefix == l_ ? CallKind::kMrcFull : CallKind::kMrcPrefix);
  std::uint64_t tally = 0;
  const double v = mrc_value(d.data(), d.cols(), prefix, ws, tally, nullptr);
  tally_.fetch_add(tally, std::memory_order_relaxed);
  return v;
}

double SumSeEvaluator::mrc_sum_se_cumulative(const SelectionMatrix& d,
                                             int prefix, Purpose purpose,
                                             Workspace& ws) const {
  if (prefix < 1 || prefix > l_) {
    throw std::invalid_argument("mrc_sum_se_cumulative: prefix out of range");
  }
  bump(purpose, CallKind::kMrcCumulative);
  std::uint64_t tally = 0;
  const double v = cumulative_value(d.data(), d.cols(), prefix, ws, tally);
  tally_.fetch_add(tally, std::memory_order_relaxed);
  return v;
}

double SumSeEvaluator::mrc_sum_se_single_ap(const SelectionMatrix& block, int l,
                                            Purpose purpose,
                                            Workspace& ws) const {
  if (l < 0 || l >= l_) {
    throw std::invalid_argument("mrc_sum_se_single_ap: AP index out of range");
  }
  if (block.num_ues() != k_ || block.cols() != n_) {
    throw std::invalid_argument("mrc_sum_se_single_ap: block shape mismatch");
  }
  bump(purpose, CallKind::kSingleAp);
  std::uint64_t tally = 0;
  const double v = single_ap_value(block.data(), l, ws, tally);
  tally_.fetch_add(tally, std::memory_order_relaxed);
  return v;
}

double SumSeEvaluator::oslp_sum_se(const SelectionMatrix& d, Purpose purpose,
                                   Workspace& ws) const {
  bump(purpose, CallKind::kOslp);
  std::uint64_t tally = 0;
  const double v = oslp_value(d, ws, tally, nullptr);
  tally_.fetch_add(tally, std::memory_order_relaxed);
  return v;
}

Eigen::VectorXd SumSeEvaluator::mrc_per_ue_se(const SelectionMatrix& d,
                                              int prefix, Workspace& ws) const {
  if (prefix < 1 || prefix > l_) {
    throw std::invalid_argument("mrc_per_ue_se: prefix out of range");
  }
  bump(Purpose::kReporting,
       prefix == l_ ? CallKind::kMrcFull : CallKind::kMrcPrefix);
  Eigen::VectorXd per_ue(k_);
  std::uint64_t tally = 0;
  mrc_value(d.data(), d.cols(), prefix, ws, tally, per_ue.data());
  tally_.fetch_add(tally, std::memory_order_relaxed);
  return per_ue;
}

Eigen::VectorXd SumSeEvaluator::oslp_per_ue_se(const SelectionMatrix& d,
                                               Workspace& ws) const {
  bump(Purpose::kReporting, CallKind::kOslp);
  Eigen::VectorXd per_ue(k_);
  std::uint64_t tally = 0;
  oslp_value(d, ws, tally, per_ue.data());
  tally_.fetch_add(tally, std::memory_order_relaxed);
  return per_ue;
}

}  // namespace rs
