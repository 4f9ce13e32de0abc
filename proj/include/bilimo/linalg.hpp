#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace bilimo::linalg {

// Condition number above which a ridge is added before inversion.
inline constexpr double max_condition = 1e12;

// Hermitian positive-definite inverse / square roots through an eigen
// decomposition. If the condition number exceeds max_condition a ridge of
// 1e-12 * trace / dim is added and the event is logged and counted.
// Throws std::domain_error when the matrix is (numerically) zero or indefinite.
Eigen::MatrixXcd hpd_inverse(const Eigen::MatrixXcd& A);
Eigen::MatrixXcd hpd_inverse_sqrt(const Eigen::MatrixXcd& A);
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& A);

bool is_hermitian(const Eigen::MatrixXcd& A, double rel_tol = 1e-10);
bool is_psd(const Eigen::MatrixXcd& A, double rel_tol = 1e-10);

// Number of ridge regularisations performed so far in this process.
std::size_t regularization_events();

}  // namespace bilimo::linalg
