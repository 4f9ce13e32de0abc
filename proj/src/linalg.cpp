#include "bilimo/linalg.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace bilimo::linalg {

namespace {

std::atomic<std::size_t> ridge_count{0};

// Eigen pair of a Hermitian PD matrix, ridge-regularised if ill-conditioned.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> checked_eigen(const Eigen::MatrixXcd& A) {
    if (A.rows() != A.cols() || A.rows() == 0) throw std::invalid_argument("expected a non-empty square matrix");
    if (!is_hermitian(A)) throw std::invalid_argument("matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(A);
    if (eig.info() != Eigen::Success) throw std::runtime_error("Hermitian eigen decomposition failed");
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (hi <= 0.0) throw std::domain_error("singular covariance (no positive eigenvalue)");
    if (lo > 0.0 && hi / lo <= max_condition) return eig;

    const double ridge = 1e-12 * A.trace().real() / double(A.rows());
    if (lo + ridge <= 0.0) throw std::domain_error("covariance is indefinite beyond the ridge");
    ++ridge_count;
    std::clog << "bilimo: ridge " << ridge << " added (condition " << (lo > 0.0 ? hi / lo : INFINITY)
              << ")\n";
    Eigen::MatrixXcd B = A;
    B.diagonal().array() += ridge;
    eig.compute(B);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0)
        throw std::domain_error("covariance remains singular after ridge");
    return eig;
}

Eigen::MatrixXcd spectral(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>& eig,
                          const Eigen::VectorXd& values) {
    const auto& Q = eig.eigenvectors();
    return Q * values.cast<std::complex<double>>().asDiagonal() * Q.adjoint();
}

}  // namespace

Eigen::MatrixXcd hpd_inverse(const Eigen::MatrixXcd& A) {
    const auto eig = checked_eigen(A);
    return spectral(eig, eig.eigenvalues().cwiseInverse());
}

Eigen::MatrixXcd hpd_inverse_sqrt(const Eigen::MatrixXcd& A) {
    const auto eig = checked_eigen(A);
    return spectral(eig, eig.eigenvalues().cwiseSqrt().cwiseInverse());
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& A) {
    if (!is_hermitian(A)) throw std::invalid_argument("matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(A);
    return spectral(eig, eig.eigenvalues().cwiseMax(0.0).cwiseSqrt());
}

bool is_hermitian(const Eigen::MatrixXcd& A, double rel_tol) {
    if (A.rows() != A.cols()) return false;
    const double scale = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
    return (A - A.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

bool is_psd(const Eigen::MatrixXcd& A, double rel_tol) {
    if (!is_hermitian(A)) return false;
    if (A.size() == 0) return true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(A, Eigen::EigenvaluesOnly);
    const double hi = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
    return eig.eigenvalues().minCoeff() >= -rel_tol * std::max(hi, 1e-300);
}

std::size_t regularization_events() { return ridge_count.load(); }

}  // namespace bilimo::linalg
