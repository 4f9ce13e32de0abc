#pragma once

// Data-parallel kernels. Every kernel has an OpenMP version (the default
// entry point) and a `serial` twin that runs the identical arithmetic in a
// single thread; tests pin the two together bit-for-bit and bench/ times them.

#include <span>

#include <Eigen/Dense>

namespace bilimo::kernels {

// c~ = [ (V_0 (x) U_0) a ; ... ; (V_{M-1} (x) U_{M-1}) a ], evaluated as
// vec(U_m A V_m^T) with A the MN x ML reshape of a.
void kron_apply(std::span<const Eigen::MatrixXcd> U, std::span<const Eigen::MatrixXcd> V,
                const Eigen::VectorXcd& a, Eigen::VectorXcd& out);

// a = sum_m vec(U_m^H X_m conj(V_m)), X_m the m-th N x L slice of c~.
// Partial sums are reduced in ascending m so the result is thread-count independent.
void kron_adjoint(std::span<const Eigen::MatrixXcd> U, std::span<const Eigen::MatrixXcd> V,
                  const Eigen::VectorXcd& ctilde, Eigen::VectorXcd& out);

// Dense Phi (MNL x M^2NL) from the steering blocks.
void fill_dictionary(std::span<const Eigen::MatrixXcd> U, std::span<const Eigen::MatrixXcd> V,
                     Eigen::MatrixXcd& phi);

// Largest normalised absolute inner product between distinct columns.
double max_column_coherence(const Eigen::MatrixXcd& A);

namespace serial {
void kron_apply(std::span<const Eigen::MatrixXcd> U, std::span<const Eigen::MatrixXcd> V,
                const Eigen::VectorXcd& a, Eigen::VectorXcd& out);
void kron_adjoint(std::span<const Eigen::MatrixXcd> U, std::span<const Eigen::MatrixXcd> V,
                  const Eigen::VectorXcd& ctilde, Eigen::VectorXcd& out);
void fill_dictionary(std::span<const Eigen::MatrixXcd> U, std::span<const Eigen::MatrixXcd> V,
                     Eigen::MatrixXcd& phi);
double max_column_coherence(const Eigen::MatrixXcd& A);
}  // namespace serial

}  // namespace bilimo::kernels
