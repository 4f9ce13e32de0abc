#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bilimo/dictionary.hpp"
#include "bilimo/statistics.hpp"

namespace bilimo {

struct WaterfillResult {
    Eigen::VectorXd lambda2;  // Lambda^2_l, length = number of eligible modes (min(J, P, #lambda))
    double zeta = 0.0;
    int active = 0;           // modes with Lambda^2 > 0
};

// Quantization noise constant 4 eta^2 / (3 b^2 P): per-complex-sample error
// variance at support eta / sqrt(P).
double quantization_noise_constant(double eta, int b, int P);

// Active-set solve of c0 * sum_l (zeta lambda_l - 1)^+ = 1 over the first
// min(J_block, P) entries of the descending list lambda.
WaterfillResult waterfill(const Eigen::VectorXd& lambda, int P, int b, double eta, Eigen::Index J_block);

// Unitary U with U H U^H having constant diagonal Tr(H)/P. Pairwise rotations on
// the (max, min) diagonal pair. Throws on non-Hermitian input or when the
// 50 P^2 rotation cap is hit.
Eigen::MatrixXcd equalizing_unitary(const Eigen::MatrixXcd& H, double rel_tol = 1e-10, int* rotations = nullptr);

struct BlockDesign {
    Eigen::MatrixXcd B;           // P x MN
    Eigen::VectorXd singular;     // singular values of Gamma~_i, descending
    Eigen::VectorXd lambda2;      // Lambda_i^2 diagonal (eligible modes)
    Eigen::MatrixXcd V;           // right singular vectors of Gamma~_i (MN x MN)
    Eigen::MatrixXcd U;           // equalizing unitary (P x P)
    double zeta = 0.0;
    double emse = 0.0;            // eps_i
    Eigen::MatrixXcd D;           // J_i x P, per-tone digital filter
};

// One tone block: Gamma~ = M_i R_ci Sigma_i^{-1/2}, waterfill, equalize,
// B_i = U Lambda V^H Sigma_i^{-1/2}, D_i for the support eta / sqrt(P).
BlockDesign design_block(const Eigen::MatrixXcd& Mi, const Eigen::MatrixXcd& Rci, const Eigen::MatrixXcd& Sigma_i,
                         int P, int b, double eta);

struct AcquisitionDesign {
    std::vector<BlockDesign> blocks;
    int channels = 0;   // P
    int tones = 0;      // L
    int levels = 0;     // b
    double eta = 0.0;
    double support = 0.0;       // gamma
    double emse = 0.0;          // eps_o
    double lmmse = 0.0;         // eps_L
    Eigen::MatrixXcd D;         // J x PL, blkdiag(D_i) Fbar^H

    double noise_variance() const { return 4.0 * support * support / (3.0 * double(levels) * levels); }
    Eigen::MatrixXcd combiner_dense() const;  // Bbar = blkdiag(B_i), PL x MNL tone-major

    // y = Fbar Bbar x for a tone-major x of length MNL.
    Eigen::VectorXcd analog(const Eigen::VectorXcd& x) const;
    // s_hat = D z.
    Eigen::VectorXcd digital(const Eigen::VectorXcd& z) const;
};

// L = 1 path; stats may have an arbitrary (non-diagonal) single block.
AcquisitionDesign design_monotone(const SignalStatistics& stats, const CompressionMatrix& M, int P, int b, double eta);
// Block-diagonal design over L tones.
AcquisitionDesign design_multitone(const SignalStatistics& stats, const CompressionMatrix& M, int P, int b, double eta);

double theoretical_emse(const AcquisitionDesign& design);

// EMSE of any block combiner at a fixed quantization noise variance sigma_q2.
double emse_of_combiner(const std::vector<Eigen::MatrixXcd>& B, const SignalStatistics& stats,
                        const CompressionMatrix& M, double sigma_q2);
// Dense form Tr[T (Sigma^{-1} - B^H (B Sigma B^H + sigma_q2 I)^{-1} B) T^H], T = M P^T R_c.
double emse_of_combiner_dense(const Eigen::MatrixXcd& Bbar, const Eigen::MatrixXcd& T, const Eigen::MatrixXcd& Sigma,
                              double sigma_q2);

// Support from the eta rule for an arbitrary block combiner:
// gamma^2 = eta^2 max_p (1/L) sum_i (B_i Sigma_i B_i^H)_pp.
double support_for_combiner(const std::vector<Eigen::MatrixXcd>& B, const SignalStatistics& stats, double eta);

// E||s - D z||^2 with z = Fbar Bbar x + e, e white with variance sigma_q2.
double modeled_mse(const Eigen::MatrixXcd& D, const AcquisitionDesign& design, const SignalStatistics& stats,
                   const CompressionMatrix& M);

struct FilterSample {
    int p = 0;
    int n = 0;
    int m = 0;
    int tone = 0;           // i in [-(L-1)/2, (L-1)/2]
    double frequency_hz = 0.0;
    cplx gain;
};

// Frequency response samples of the analog filter b_{p,n} at i/T_0 + f_m.
// h0 holds the pulse spectrum at 2 pi i / T_0 (length L, empty = flat 1).
std::vector<FilterSample> analog_filter_response(const AcquisitionDesign& design, const RadarConfig& cfg, int p,
                                                 int n, const Eigen::VectorXcd& h0 = {});
// Inverse map back to B_i entries (used for round-trip checks).
std::vector<Eigen::MatrixXcd> combiner_from_responses(const std::vector<FilterSample>& samples,
                                                      const RadarConfig& cfg, int P,
                                                      const Eigen::VectorXcd& h0 = {});

}  // namespace bilimo
