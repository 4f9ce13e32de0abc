#pragma once

#include <Eigen/Dense>

#include "bilimo/model.hpp"
#include "bilimo/statistics.hpp"

namespace testing_helpers {

inline bilimo::RadarConfig full_ula() { return bilimo::make_ula_config(8, 12, 1e6, 9e-6, 10e9); }
// L = B_h T_0 = 3
inline bilimo::RadarConfig small_ula(int M, int N, int L = 3) {
    return bilimo::make_ula_config(M, N, 1e6, L * 1e-6, 10e9);
}

inline Eigen::MatrixXcd random_matrix(bilimo::Rng& rng, Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXcd A(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) A(i, j) = bilimo::complex_normal(rng, 1.0);
    return A;
}

inline Eigen::VectorXcd random_vector(bilimo::Rng& rng, Eigen::Index n, double var = 1.0) {
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = bilimo::complex_normal(rng, var);
    return v;
}

// Well-conditioned random Hermitian PD matrix.
inline Eigen::MatrixXcd random_hpd(bilimo::Rng& rng, Eigen::Index n, double ridge = 0.5) {
    const Eigen::MatrixXcd G = random_matrix(rng, n, n);
    Eigen::MatrixXcd H = G * G.adjoint() / double(n);
    H.diagonal().array() += ridge;
    return 0.5 * (H + H.adjoint());
}

// Random block-diagonal statistics with L blocks of size MN.
inline bilimo::SignalStatistics random_stats(bilimo::Rng& rng, int L, int MN, double noise = 0.3) {
    bilimo::SignalStatistics st;
    for (int i = 0; i < L; ++i) {
        st.signal.push_back(random_hpd(rng, MN, 0.2));
        st.noise.push_back(noise * random_hpd(rng, MN, 0.5));
    }
    return st;
}

inline bilimo::CompressionMatrix random_compression(bilimo::Rng& rng, int L, Eigen::Index Ji, Eigen::Index MN) {
    bilimo::CompressionMatrix M;
    for (int i = 0; i < L; ++i) M.blocks.push_back(random_matrix(rng, Ji, MN));
    return M;
}

// Draw from CN(0, R) through a Cholesky factor.
inline Eigen::VectorXcd draw_gaussian(bilimo::Rng& rng, const Eigen::MatrixXcd& chol_lower) {
    return chol_lower * random_vector(rng, chol_lower.rows());
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing_helpers
