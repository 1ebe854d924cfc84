#include "rs/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rs {

namespace {

template <typename Matrix>
Matrix psd_sqrt_impl(const Matrix& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error(std::string(what) + ": eigendecomposition failed");
  }
  const auto& vals = es.eigenvalues();
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  if (vals.minCoeff() < -1e-10 * scale) {
    throw std::runtime_error(std::string(what) + ": covariance is not PSD");
  }
  Eigen::VectorXd roots = vals.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal();
}

}  // namespace

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m) {
  return psd_sqrt_impl(m, "psd_sqrt");
}

Eigen::MatrixXd psd_sqrt_real(const Eigen::MatrixXd& m) {
  return psd_sqrt_impl(m, "psd_sqrt_real");
}

Eigen::MatrixXcd hermitian_solve(const Eigen::MatrixXcd& a,
                                 const Eigen::MatrixXcd& b,
                                 const char* context) {
  Eigen::LLT<Eigen::MatrixXcd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(std::string(context) +
                             ": Cholesky factorization failed");
  }
  Eigen::MatrixXcd x = llt.solve(b);
  const double b_norm = b.norm();
  if (b_norm > 0.0) {
    const double residual = (a * x - b).norm() / b_norm;
    if (residual > 1e-8) {
      throw std::runtime_error(std::string(context) +
                               ": solve residual above tolerance");
    }
  }
  return x;
}

}  // namespace rs
