#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bilimo/dictionary.hpp"
#include "bilimo/model.hpp"

namespace bilimo {

// Block-diagonal second-order statistics of c = P Phi a and of the noise w,
// one MN x MN block per tone.
struct SignalStatistics {
    std::vector<Eigen::MatrixXcd> signal;  // R_{c_i}
    std::vector<Eigen::MatrixXcd> noise;   // R_{w_i}

    int tones() const { return static_cast<int>(signal.size()); }
    Eigen::Index block_size() const { return signal.empty() ? 0 : signal[0].rows(); }
    Eigen::MatrixXcd total(int i) const { return signal[i] + noise[i]; }

    Eigen::MatrixXcd signal_dense() const;
    Eigen::MatrixXcd noise_dense() const;
    Eigen::MatrixXcd total_dense() const { return signal_dense() + noise_dense(); }

    // Hermitian PSD blocks, matching sizes, positive-definite totals.
    void validate() const;
};

// Default model: R_c = K sigma_alpha^2 I, R_w = sigma_n^2 I.
SignalStatistics build_covariances(const RadarConfig& cfg, int K);

// Splits full MNL x MNL covariances into blocks; rejects anything outside the
// block diagonal or non-PSD.
SignalStatistics statistics_from_dense(const Eigen::MatrixXcd& Rc, const Eigen::MatrixXcd& Rw,
                                       Eigen::Index block_size);

enum class CompressionKind { gaussian, bernoulli, dft };

CompressionKind parse_compression_kind(const std::string& name);
std::string to_string(CompressionKind kind);

// Compressive matrix M stored through the blocks M_i of M P^H (J_i x MN, acting
// on the tone-major blocks c_i), so s_i = M_i c_i.
struct CompressionMatrix {
    std::vector<Eigen::MatrixXcd> blocks;
    CompressionKind kind = CompressionKind::gaussian;
    double dcr = 1.0;

    int tones() const { return static_cast<int>(blocks.size()); }
    Eigen::Index rows() const;  // J
    Eigen::Index block_rows() const { return blocks.empty() ? 0 : blocks[0].rows(); }
    Eigen::Index block_cols() const { return blocks.empty() ? 0 : blocks[0].cols(); }

    Eigen::MatrixXcd task_dense() const;                     // M P^T, tone-major columns
    Eigen::MatrixXcd dense(const Permutation& perm) const;   // M, c~ columns
    Eigen::VectorXcd apply_task(const Eigen::VectorXcd& c) const;
    Eigen::VectorXcd apply_task_adjoint(const Eigen::VectorXcd& s) const;
};

// J = floor(MNL / dcr) rounded down to a multiple of L.
Eigen::Index compressed_length(const RadarConfig& cfg, double dcr);
// P = ceil(J / L).
int analog_channels(Eigen::Index J, int L);

CompressionMatrix build_compression_matrix(Rng& rng, const RadarConfig& cfg, double dcr, CompressionKind kind);

// Recovers the blocks of a dense M (c~ columns); throws if M P^H is not block diagonal.
CompressionMatrix compression_from_dense(const Eigen::MatrixXcd& M, const Permutation& perm, int L);

// Gamma = M P^T R_c Sigma^{-1} (J x MNL, tone-major columns), blockwise.
Eigen::MatrixXcd lmmse_transform(const CompressionMatrix& M, const SignalStatistics& stats);
std::vector<Eigen::MatrixXcd> lmmse_blocks(const CompressionMatrix& M, const SignalStatistics& stats);
// eps_L = Tr[M P^T R_c P M^H - M P^T R_c Sigma^{-1} R_c P M^H], blockwise.
double lmmse_error(const CompressionMatrix& M, const SignalStatistics& stats);

// Full-matrix references of the same quantities.
Eigen::MatrixXcd lmmse_transform_dense(const Eigen::MatrixXcd& M, const Permutation& perm,
                                       const Eigen::MatrixXcd& Rc, const Eigen::MatrixXcd& Rw);
double lmmse_error_dense(const Eigen::MatrixXcd& M, const Permutation& perm, const Eigen::MatrixXcd& Rc,
                         const Eigen::MatrixXcd& Rw);

}  // namespace bilimo
