#include "bilimo/dictionary.hpp"

#include <cmath>
#include <stdexcept>

#include "bilimo/kernels.hpp"

namespace bilimo {

namespace {

constexpr double two_pi = 2.0 * M_PI;

cplx unit_phasor(double cycles) { return std::polar(1.0, two_pi * cycles); }

}  // namespace

Permutation::Permutation(std::vector<Eigen::Index> to_c) : to_c_(std::move(to_c)) {
    std::vector<bool> hit(to_c_.size(), false);
    for (Eigen::Index k : to_c_) {
        if (k < 0 || k >= size() || hit[k]) throw std::invalid_argument("not a permutation");
        hit[k] = true;
    }
}

Permutation Permutation::tone_major(int M, int N, int L) {
    std::vector<Eigen::Index> to_c(static_cast<std::size_t>(M) * N * L);
    for (int m = 0; m < M; ++m)
        for (int i = 0; i < L; ++i)
            for (int n = 0; n < N; ++n)
                to_c[Eigen::Index(m) * N * L + Eigen::Index(i) * N + n] =
                    Eigen::Index(i) * M * N + Eigen::Index(m) * N + n;
    return Permutation(std::move(to_c));
}

Eigen::VectorXcd Permutation::apply(const Eigen::VectorXcd& ctilde) const {
    if (ctilde.size() != size()) throw std::invalid_argument("permutation length mismatch");
    Eigen::VectorXcd c(size());
    for (Eigen::Index k = 0; k < size(); ++k) c[to_c_[k]] = ctilde[k];
    return c;
}

Eigen::VectorXcd Permutation::apply_inverse(const Eigen::VectorXcd& c) const {
    if (c.size() != size()) throw std::invalid_argument("permutation length mismatch");
    Eigen::VectorXcd ctilde(size());
    for (Eigen::Index k = 0; k < size(); ++k) ctilde[k] = c[to_c_[k]];
    return ctilde;
}

Eigen::MatrixXd Permutation::matrix() const {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(size(), size());
    for (Eigen::Index k = 0; k < size(); ++k) P(to_c_[k], k) = 1.0;
    return P;
}

SteeringDictionary::SteeringDictionary(const RadarConfig& cfg, DictionaryOptions options) : cfg_(cfg) {
    cfg_.validate();
    const int M = cfg_.M, N = cfg_.N, L = cfg_.L;
    const int MN = cfg_.angle_cells(), ML = cfg_.delay_cells();

    U_.resize(M);
    V_.resize(M);
    for (int m = 0; m < M; ++m) {
        U_[m].resize(N, MN);
        for (int n = 0; n < N; ++n)
            for (int l = 0; l < MN; ++l) {
                const double theta = -1.0 + 2.0 * l / MN;
                U_[m](n, l) = unit_phasor((cfg_.tx_positions[m] + cfg_.rx_positions[n]) * theta);
            }
        const double fT = cfg_.tone_offsets_hz[m] * cfg_.pri_s;
        V_[m].resize(L, ML);
        for (int i = 0; i < L; ++i) {
            const double tone = i - cfg_.half_tones();
            for (int l = 0; l < ML; ++l)
                V_[m](i, l) = unit_phasor(-(tone + fT) * static_cast<double>(l) / ML);
        }
    }
    perm_ = Permutation::tone_major(M, N, L);

    if (options.dense) {
        const double bytes = double(rows()) * double(cols()) * sizeof(cplx);
        if (bytes > double(options.memory_cap_bytes))
            throw std::length_error("dense dictionary exceeds the configured memory cap; build matrix-free");
        kernels::fill_dictionary(U_, V_, phi_);
    }
}

const Eigen::MatrixXcd& SteeringDictionary::phi() const {
    if (!has_dense()) throw std::logic_error("dictionary was built matrix-free");
    return phi_;
}

Eigen::VectorXcd SteeringDictionary::apply(const Eigen::VectorXcd& a) const {
    Eigen::VectorXcd out;
    kernels::kron_apply(U_, V_, a, out);
    return out;
}

Eigen::VectorXcd SteeringDictionary::apply_adjoint(const Eigen::VectorXcd& ctilde) const {
    Eigen::VectorXcd out;
    kernels::kron_adjoint(U_, V_, ctilde, out);
    return out;
}

SteeringDictionary build_dictionary(const RadarConfig& cfg, DictionaryOptions options) {
    return SteeringDictionary(cfg, options);
}

Eigen::VectorXcd eval_c_direct(const TargetScene& scene, const RadarConfig& cfg) {
    const int M = cfg.M, N = cfg.N, L = cfg.L;
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(cfg.samples());
    for (int k = 0; k < scene.size(); ++k) {
        const double tau = scene.delay(cfg, k);
        const double theta = scene.azimuth_sine(cfg, k);
        const cplx alpha = scene.targets[k].alpha;
        for (int m = 0; m < M; ++m)
            for (int i = 0; i < L; ++i) {
                const double tone = i - cfg.half_tones();
                for (int n = 0; n < N; ++n) {
                    const double cycles = (cfg.tx_positions[m] + cfg.rx_positions[n]) * theta -
                                          tone * tau / cfg.pri_s - cfg.tone_offsets_hz[m] * tau;
                    c[Eigen::Index(m) * N * L + Eigen::Index(i) * N + n] += alpha * unit_phasor(cycles);
                }
            }
    }
    return c;
}

double coherence(const Eigen::MatrixXcd& A) { return kernels::max_column_coherence(A); }

Eigen::MatrixXcd dft_matrix(int L) {
    if (L < 1) throw std::invalid_argument("DFT size must be positive");
    Eigen::MatrixXcd F(L, L);
    const double scale = 1.0 / std::sqrt(double(L));
    for (int k = 0; k < L; ++k)
        for (int t = 0; t < L; ++t) F(k, t) = scale * unit_phasor(-double((k * t) % L) / L);
    return F;
}

Eigen::VectorXcd apply_fbar(int P, int L, const Eigen::VectorXcd& x) {
    if (P < 1 || x.size() != Eigen::Index(P) * L) throw std::invalid_argument("apply_fbar: length mismatch");
    if (L == 1) return x;
    const Eigen::Map<const Eigen::MatrixXcd> X(x.data(), P, L);
    Eigen::VectorXcd y(x.size());
    Eigen::Map<Eigen::MatrixXcd>(y.data(), P, L).noalias() = X * dft_matrix(L).conjugate();
    return y;
}

Eigen::VectorXcd apply_fbar_adjoint(int P, int L, const Eigen::VectorXcd& y) {
    if (P < 1 || y.size() != Eigen::Index(P) * L) throw std::invalid_argument("apply_fbar_adjoint: length mismatch");
    if (L == 1) return y;
    const Eigen::Map<const Eigen::MatrixXcd> Y(y.data(), P, L);
    Eigen::VectorXcd x(y.size());
    Eigen::Map<Eigen::MatrixXcd>(x.data(), P, L).noalias() = Y * dft_matrix(L);
    return x;
}

Eigen::MatrixXcd fbar_matrix(int P, int L) {
    const Eigen::MatrixXcd F = dft_matrix(L);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(Eigen::Index(P) * L, Eigen::Index(P) * L);
    for (int t = 0; t < L; ++t)
        for (int i = 0; i < L; ++i)
            out.block(Eigen::Index(t) * P, Eigen::Index(i) * P, P, P).diagonal().setConstant(std::conj(F(i, t)));
    return out;
}

}  // namespace bilimo
