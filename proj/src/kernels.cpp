#include "bilimo/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <omp.h>

namespace bilimo::kernels {

namespace {

struct KronDims {
    Eigen::Index M, N, L, MN, ML;
};

KronDims kron_dims(std::span<const Eigen::MatrixXcd> U, std::span<const Eigen::MatrixXcd> V) {
    if (U.empty() || U.size() != V.size()) throw std::invalid_argument("steering block count mismatch");
    const Eigen::Index M = static_cast<Eigen::Index>(U.size());
    return {M, U[0].rows(), V[0].rows(), U[0].cols(), V[0].cols()};
}

inline void apply_block(const Eigen::MatrixXcd& Um, const Eigen::MatrixXcd& Vm,
                        const Eigen::Map<const Eigen::MatrixXcd>& A, Eigen::Map<Eigen::MatrixXcd> X) {
    X.noalias() = Um * (A * Vm.transpose());
}

inline void adjoint_block(const Eigen::MatrixXcd& Um, const Eigen::MatrixXcd& Vm,
                          const Eigen::Map<const Eigen::MatrixXcd>& X, Eigen::MatrixXcd& G) {
    G.noalias() = (Um.adjoint() * X) * Vm.conjugate();
}

inline void fill_column(std::span<const Eigen::MatrixXcd> U, std::span<const Eigen::MatrixXcd> V,
                        const KronDims& d, Eigen::Index col, Eigen::MatrixXcd& phi) {
    const Eigen::Index l1 = col / d.MN;
    const Eigen::Index l2 = col % d.MN;
    for (Eigen::Index m = 0; m < d.M; ++m)
        for (Eigen::Index i = 0; i < d.L; ++i)
            for (Eigen::Index n = 0; n < d.N; ++n)
                phi(m * d.N * d.L + i * d.N + n, col) = V[m](i, l1) * U[m](n, l2);
}

Eigen::VectorXd column_norms(const Eigen::MatrixXcd& A) {
    Eigen::VectorXd norms = A.colwise().norm().transpose();
    if ((norms.array() <= 0.0).any()) throw std::invalid_argument("coherence of a matrix with a zero column");
    return norms;
}

inline double column_pair(const Eigen::MatrixXcd& A, const Eigen::VectorXd& norms, Eigen::Index i,
                          Eigen::Index j) {
    return std::abs(A.col(i).dot(A.col(j))) / (norms[i] * norms[j]);
}

// No team to share with (nested region or one thread): the serial twin does the
// same arithmetic without the per-m scratch.
bool single_lane() { return omp_in_parallel() || omp_get_max_threads() == 1; }

}  // namespace

namespace serial {
void kron_adjoint(std::span<const Eigen::MatrixXcd> U, std::span<const Eigen::MatrixXcd> V,
                  const Eigen::VectorXcd& ctilde, Eigen::VectorXcd& out);
}

void kron_apply(std::span<const Eigen::MatrixXcd> U, std::span<const Eigen::MatrixXcd> V,
                const Eigen::VectorXcd& a, Eigen::VectorXcd& out) {
    const KronDims d = kron_dims(U, V);
    if (a.size() != d.MN * d.ML) throw std::invalid_argument("kron_apply: input length mismatch");
    out.resize(d.M * d.N * d.L);
    const Eigen::Map<const Eigen::MatrixXcd> A(a.data(), d.MN, d.ML);
#pragma omp parallel for schedule(static)
    for (Eigen::Index m = 0; m < d.M; ++m)
        apply_block(U[m], V[m], A, Eigen::Map<Eigen::MatrixXcd>(out.data() + m * d.N * d.L, d.N, d.L));
}

void kron_adjoint(std::span<const Eigen::MatrixXcd> U, std::span<const Eigen::MatrixXcd> V,
                  const Eigen::VectorXcd& ctilde, Eigen::VectorXcd& out) {
    const KronDims d = kron_dims(U, V);
    if (ctilde.size() != d.M * d.N * d.L) throw std::invalid_argument("kron_adjoint: input length mismatch");
    if (single_lane()) return serial::kron_adjoint(U, V, ctilde, out);
    std::vector<Eigen::MatrixXcd> partial(static_cast<std::size_t>(d.M));
#pragma omp parallel for schedule(static)
    for (Eigen::Index m = 0; m < d.M; ++m) {
        const Eigen::Map<const Eigen::MatrixXcd> X(ctilde.data() + m * d.N * d.L, d.N, d.L);
        adjoint_block(U[m], V[m], X, partial[m]);
    }
    out.resize(d.MN * d.ML);
    Eigen::Map<Eigen::MatrixXcd> G(out.data(), d.MN, d.ML);
    G = partial[0];
    for (Eigen::Index m = 1; m < d.M; ++m) G += partial[m];
}

void fill_dictionary(std::span<const Eigen::MatrixXcd> U, std::span<const Eigen::MatrixXcd> V,
                     Eigen::MatrixXcd& phi) {
    const KronDims d = kron_dims(U, V);
    phi.resize(d.M * d.N * d.L, d.MN * d.ML);
#pragma omp parallel for schedule(static)
    for (Eigen::Index col = 0; col < phi.cols(); ++col) fill_column(U, V, d, col, phi);
}

double max_column_coherence(const Eigen::MatrixXcd& A) {
    const Eigen::VectorXd norms = column_norms(A);
    double mu = 0.0;
    const Eigen::Index n = A.cols();
#pragma omp parallel for schedule(dynamic, 8) reduction(max : mu)
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) mu = std::max(mu, column_pair(A, norms, i, j));
    return std::min(mu, 1.0);
}

namespace serial {

void kron_apply(std::span<const Eigen::MatrixXcd> U, std::span<const Eigen::MatrixXcd> V,
                const Eigen::VectorXcd& a, Eigen::VectorXcd& out) {
    const KronDims d = kron_dims(U, V);
    if (a.size() != d.MN * d.ML) throw std::invalid_argument("kron_apply: input length mismatch");
    out.resize(d.M * d.N * d.L);
    const Eigen::Map<const Eigen::MatrixXcd> A(a.data(), d.MN, d.ML);
    for (Eigen::Index m = 0; m < d.M; ++m)
        apply_block(U[m], V[m], A, Eigen::Map<Eigen::MatrixXcd>(out.data() + m * d.N * d.L, d.N, d.L));
}

void kron_adjoint(std::span<const Eigen::MatrixXcd> U, std::span<const Eigen::MatrixXcd> V,
                  const Eigen::VectorXcd& ctilde, Eigen::VectorXcd& out) {
    const KronDims d = kron_dims(U, V);
    if (ctilde.size() != d.M * d.N * d.L) throw std::invalid_argument("kron_adjoint: input length mismatch");
    out.resize(d.MN * d.ML);
    Eigen::Map<Eigen::MatrixXcd> G(out.data(), d.MN, d.ML);
    Eigen::MatrixXcd partial;
    for (Eigen::Index m = 0; m < d.M; ++m) {
        const Eigen::Map<const Eigen::MatrixXcd> X(ctilde.data() + m * d.N * d.L, d.N, d.L);
        adjoint_block(U[m], V[m], X, partial);
        if (m == 0)
            G = partial;
        else
            G += partial;
    }
}

void fill_dictionary(std::span<const Eigen::MatrixXcd> U, std::span<const Eigen::MatrixXcd> V,
                     Eigen::MatrixXcd& phi) {
    const KronDims d = kron_dims(U, V);
    phi.resize(d.M * d.N * d.L, d.MN * d.ML);
    for (Eigen::Index col = 0; col < phi.cols(); ++col) fill_column(U, V, d, col, phi);
}

double max_column_coherence(const Eigen::MatrixXcd& A) {
    const Eigen::VectorXd norms = column_norms(A);
    double mu = 0.0;
    for (Eigen::Index i = 0; i < A.cols(); ++i)
        for (Eigen::Index j = i + 1; j < A.cols(); ++j) mu = std::max(mu, column_pair(A, norms, i, j));
    return std::min(mu, 1.0);
}

}  // namespace serial

}  // namespace bilimo::kernels
