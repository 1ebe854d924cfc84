#pragma once

#include <Eigen/Dense>

namespace rs {

// PSD square root via eigendecomposition: returns A with A A^H = m. Eigenvalues
// slightly negative from roundoff are clamped to zero; clearly negative ones
// raise a matrix-decomposition error.
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m);
Eigen::MatrixXd psd_sqrt_real(const Eigen::MatrixXd& m);

// Solves a x = b for hermitian positive-definite a through a Cholesky solve
// (no explicit inverse). Enforces the residual policy: the solve fails if
// |a x - b| exceeds 1e-8 |b| in Frobenius norm.
Eigen::MatrixXcd hermitian_solve(const Eigen::MatrixXcd& a,
                                 const Eigen::MatrixXcd& b,
                                 const char* context);

}  // namespace rs
