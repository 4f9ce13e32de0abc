#include "bilimo/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bilimo/linalg.hpp"

namespace bilimo {

namespace {

Eigen::MatrixXcd block_diagonal(const std::vector<Eigen::MatrixXcd>& blocks) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

std::vector<Eigen::MatrixXcd> split_blocks(const Eigen::MatrixXcd& A, Eigen::Index block_size, const char* what) {
    if (block_size < 1 || A.rows() != A.cols() || A.rows() % block_size != 0)
        throw std::invalid_argument(std::string(what) + ": size is not a multiple of the block size");
    const Eigen::Index count = A.rows() / block_size;
    Eigen::MatrixXcd rest = A;
    std::vector<Eigen::MatrixXcd> blocks;
    for (Eigen::Index i = 0; i < count; ++i) {
        blocks.push_back(A.block(i * block_size, i * block_size, block_size, block_size));
        rest.block(i * block_size, i * block_size, block_size, block_size).setZero();
    }
    if (rest.cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument(std::string(what) + ": non-zero entries outside the block diagonal");
    return blocks;
}

}  // namespace

Eigen::MatrixXcd SignalStatistics::signal_dense() const { return block_diagonal(signal); }
Eigen::MatrixXcd SignalStatistics::noise_dense() const { return block_diagonal(noise); }

void SignalStatistics::validate() const {
    if (signal.empty() || signal.size() != noise.size()) throw std::invalid_argument("statistics: block count mismatch");
    for (int i = 0; i < tones(); ++i) {
        if (signal[i].rows() != block_size() || noise[i].rows() != block_size())
            throw std::invalid_argument("statistics: block sizes differ");
        if (!linalg::is_psd(signal[i]) || !linalg::is_psd(noise[i]))
            throw std::invalid_argument("statistics: covariance block is not Hermitian PSD");
    }
}

SignalStatistics build_covariances(const RadarConfig& cfg, int K) {
    cfg.validate();
    if (K < 0) throw std::invalid_argument("negative target count");
    const Eigen::Index MN = cfg.virtual_elements();
    SignalStatistics stats;
    for (int i = 0; i < cfg.L; ++i) {
        stats.signal.push_back(Eigen::MatrixXcd::Identity(MN, MN) * (K * cfg.sigma_alpha2));
        stats.noise.push_back(Eigen::MatrixXcd::Identity(MN, MN) * cfg.sigma_n2);
    }
    return stats;
}

SignalStatistics statistics_from_dense(const Eigen::MatrixXcd& Rc, const Eigen::MatrixXcd& Rw,
                                       Eigen::Index block_size) {
    SignalStatistics stats{split_blocks(Rc, block_size, "R_c"), split_blocks(Rw, block_size, "R_w")};
    stats.validate();
    return stats;
}

CompressionKind parse_compression_kind(const std::string& name) {
    if (name == "gaussian") return CompressionKind::gaussian;
    if (name == "bernoulli") return CompressionKind::bernoulli;
    if (name == "dft") return CompressionKind::dft;
    throw std::invalid_argument("unknown compression kind: " + name);
}

std::string to_string(CompressionKind kind) {
    switch (kind) {
        case CompressionKind::gaussian: return "gaussian";
        case CompressionKind::bernoulli: return "bernoulli";
        case CompressionKind::dft: return "dft";
    }
    return "unknown";
}

Eigen::Index CompressionMatrix::rows() const {
    Eigen::Index J = 0;
    for (const auto& b : blocks) J += b.rows();
    return J;
}

Eigen::MatrixXcd CompressionMatrix::task_dense() const { return block_diagonal(blocks); }

Eigen::MatrixXcd CompressionMatrix::dense(const Permutation& perm) const {
    const Eigen::MatrixXcd T = task_dense();
    if (T.cols() != perm.size()) throw std::invalid_argument("compression/permutation size mismatch");
    Eigen::MatrixXcd M(T.rows(), T.cols());
    for (Eigen::Index k = 0; k < perm.size(); ++k) M.col(k) = T.col(perm[k]);
    return M;
}

Eigen::VectorXcd CompressionMatrix::apply_task(const Eigen::VectorXcd& c) const {
    const Eigen::Index MN = block_cols();
    if (c.size() != MN * tones()) throw std::invalid_argument("apply_task: length mismatch");
    Eigen::VectorXcd s(rows());
    Eigen::Index r = 0;
    for (int i = 0; i < tones(); ++i) {
        s.segment(r, blocks[i].rows()).noalias() = blocks[i] * c.segment(i * MN, MN);
        r += blocks[i].rows();
    }
    return s;
}

Eigen::VectorXcd CompressionMatrix::apply_task_adjoint(const Eigen::VectorXcd& s) const {
    const Eigen::Index MN = block_cols();
    if (s.size() != rows()) throw std::invalid_argument("apply_task_adjoint: length mismatch");
    Eigen::VectorXcd c(MN * tones());
    Eigen::Index r = 0;
    for (int i = 0; i < tones(); ++i) {
        c.segment(i * MN, MN).noalias() = blocks[i].adjoint() * s.segment(r, blocks[i].rows());
        r += blocks[i].rows();
    }
    return c;
}

Eigen::Index compressed_length(const RadarConfig& cfg, double dcr) {
    if (!(dcr >= 1.0)) throw std::invalid_argument("compression ratio must be >= 1");
    const Eigen::Index raw = static_cast<Eigen::Index>(std::floor(double(cfg.samples()) / dcr + 1e-9));
    const Eigen::Index J = (raw / cfg.L) * cfg.L;
    if (J < cfg.L) throw std::invalid_argument("compression ratio leaves fewer than one row per tone block");
    return J;
}

int analog_channels(Eigen::Index J, int L) {
    if (J < 1 || L < 1) throw std::invalid_argument("analog_channels: J and L must be positive");
    return static_cast<int>((J + L - 1) / L);
}

CompressionMatrix build_compression_matrix(Rng& rng, const RadarConfig& cfg, double dcr, CompressionKind kind) {
    cfg.validate();
    const Eigen::Index J = compressed_length(cfg, dcr);
    const Eigen::Index Ji = J / cfg.L;
    const Eigen::Index MN = cfg.virtual_elements();

    CompressionMatrix out;
    out.kind = kind;
    out.dcr = dcr;
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::bernoulli_distribution coin(0.5);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(MN));

    for (int i = 0; i < cfg.L; ++i) {
        Eigen::MatrixXcd Mi(Ji, MN);
        switch (kind) {
            case CompressionKind::gaussian:
                for (Eigen::Index c = 0; c < MN; ++c)
                    for (Eigen::Index r = 0; r < Ji; ++r) {
                        const double re = gauss(rng);
                        const double im = gauss(rng);
                        Mi(r, c) = {re, im};
                    }
                break;
            case CompressionKind::bernoulli:
                for (Eigen::Index c = 0; c < MN; ++c)
                    for (Eigen::Index r = 0; r < Ji; ++r) {
                        const double re = coin(rng) ? 1.0 : -1.0;
                        const double im = coin(rng) ? 1.0 : -1.0;
                        Mi(r, c) = cplx(re, im) * inv_sqrt2;
                    }
                break;
            case CompressionKind::dft: {
                std::iota(rows.begin(), rows.end(), Eigen::Index{0});
                std::vector<Eigen::Index> chosen;
                std::sample(rows.begin(), rows.end(), std::back_inserter(chosen), Ji, rng);
                for (Eigen::Index r = 0; r < Ji; ++r)
                    for (Eigen::Index c = 0; c < MN; ++c)
                        Mi(r, c) = std::polar(1.0, -2.0 * M_PI * double((chosen[r] * c) % MN) / double(MN));
                break;
            }
        }
        out.blocks.push_back(std::move(Mi));
    }
    return out;
}

CompressionMatrix compression_from_dense(const Eigen::MatrixXcd& M, const Permutation& perm, int L) {
    if (M.cols() != perm.size() || L < 1 || M.cols() % L != 0 || M.rows() % L != 0)
        throw std::invalid_argument("compression_from_dense: incompatible dimensions");
    Eigen::MatrixXcd T(M.rows(), M.cols());
    for (Eigen::Index k = 0; k < perm.size(); ++k) T.col(perm[k]) = M.col(k);
    const Eigen::Index Ji = M.rows() / L, MN = M.cols() / L;
    CompressionMatrix out;
    Eigen::MatrixXcd rest = T;
    for (int i = 0; i < L; ++i) {
        out.blocks.push_back(T.block(i * Ji, i * MN, Ji, MN));
        rest.block(i * Ji, i * MN, Ji, MN).setZero();
    }
    if (rest.cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument("M P^H is not block diagonal");
    out.dcr = double(M.cols()) / double(M.rows());
    return out;
}

std::vector<Eigen::MatrixXcd> lmmse_blocks(const CompressionMatrix& M, const SignalStatistics& stats) {
    if (M.tones() != stats.tones() || M.block_cols() != stats.block_size())
        throw std::invalid_argument("compression and statistics block structure differ");
    std::vector<Eigen::MatrixXcd> gamma(stats.tones());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < stats.tones(); ++i)
        gamma[i] = M.blocks[i] * stats.signal[i] * linalg::hpd_inverse(stats.total(i));
    return gamma;
}

Eigen::MatrixXcd lmmse_transform(const CompressionMatrix& M, const SignalStatistics& stats) {
    return block_diagonal(lmmse_blocks(M, stats));
}

double lmmse_error(const CompressionMatrix& M, const SignalStatistics& stats) {
    const auto gamma = lmmse_blocks(M, stats);
    double eps = 0.0;
    for (int i = 0; i < stats.tones(); ++i) {
        const Eigen::MatrixXcd T = M.blocks[i] * stats.signal[i];
        eps += (T * M.blocks[i].adjoint() - gamma[i] * T.adjoint()).trace().real();
    }
    return std::max(eps, 0.0);
}

Eigen::MatrixXcd lmmse_transform_dense(const Eigen::MatrixXcd& M, const Permutation& perm,
                                       const Eigen::MatrixXcd& Rc, const Eigen::MatrixXcd& Rw) {
    const Eigen::MatrixXcd MPt = M * perm.matrix().transpose().cast<cplx>();
    return MPt * Rc * linalg::hpd_inverse(Rc + Rw);
}

double lmmse_error_dense(const Eigen::MatrixXcd& M, const Permutation& perm, const Eigen::MatrixXcd& Rc,
                         const Eigen::MatrixXcd& Rw) {
    const Eigen::MatrixXcd MPt = M * perm.matrix().transpose().cast<cplx>();
    const Eigen::MatrixXcd T = MPt * Rc;
    const Eigen::MatrixXcd Sinv = linalg::hpd_inverse(Rc + Rw);
    return std::max((T * MPt.adjoint() - T * Sinv * T.adjoint()).trace().real(), 0.0);
}

}  // namespace bilimo
