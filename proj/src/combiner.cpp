#include "bilimo/combiner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bilimo/linalg.hpp"

namespace bilimo {

double quantization_noise_constant(double eta, int b, int P) {
    if (!(eta > 0.0) || b < 2 || P < 1) throw std::invalid_argument("quantization constant: bad eta, b or P");
    return 4.0 * eta * eta / (3.0 * double(b) * b * P);
}

WaterfillResult waterfill(const Eigen::VectorXd& lambda, int P, int b, double eta, Eigen::Index J_block) {
    const double c0 = quantization_noise_constant(eta, b, P);
    const Eigen::Index n = std::min<Eigen::Index>({lambda.size(), Eigen::Index(P), J_block});
    for (Eigen::Index l = 1; l < lambda.size(); ++l)
        if (lambda[l] > lambda[l - 1]) throw std::invalid_argument("waterfill: singular values must be descending");
    Eigen::Index positive = 0;
    while (positive < n && lambda[positive] > 0.0) ++positive;
    if (positive == 0) throw std::domain_error("waterfill: no positive singular value");

    WaterfillResult out;
    out.lambda2 = Eigen::VectorXd::Zero(n);
    double sum = 0.0;
    for (Eigen::Index r = 1; r <= positive; ++r) {
        sum += lambda[r - 1];
        const double zeta = (1.0 / c0 + double(r)) / sum;
        const bool last = (r == positive);
        if (zeta * lambda[r - 1] > 1.0 && (last || zeta * lambda[r] <= 1.0)) {
            out.zeta = zeta;
            out.active = int(r);
            break;
        }
    }
    // numerically the loop always accepts; fall back to the full set if rounding bites
    if (out.active == 0) {
        out.active = int(positive);
        out.zeta = (1.0 / c0 + double(positive)) / lambda.head(positive).sum();
    }
    for (Eigen::Index l = 0; l < out.active; ++l) out.lambda2[l] = c0 * std::max(out.zeta * lambda[l] - 1.0, 0.0);
    return out;
}

Eigen::MatrixXcd equalizing_unitary(const Eigen::MatrixXcd& H, double rel_tol, int* rotations) {
    if (!linalg::is_hermitian(H)) throw std::invalid_argument("equalizing_unitary: input is not Hermitian");
    const Eigen::Index P = H.rows();
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(P, P);
    Eigen::MatrixXcd W = H;
    const double target = H.trace().real() / double(P);
    const double tol = rel_tol * std::abs(target);
    const long cap = 50L * P * P;
    long steps = 0;

    while (true) {
        Eigen::Index hi = 0, lo = 0;
        const Eigen::VectorXd d = W.diagonal().real();
        d.maxCoeff(&hi);
        d.minCoeff(&lo);
        if (d[hi] - target <= tol && target - d[lo] <= tol) break;
        if (steps++ >= cap) throw std::runtime_error("equalizing_unitary: rotation cap exceeded");

        const double a = d[hi], dd = d[lo];
        const cplx h = W(hi, lo);
        // phase kills the cross term; cos^2 pins the farther entry at the target
        const double phi = std::arg(h) + M_PI / 2.0;
        double c2 = (a - target >= target - dd) ? (target - dd) / (a - dd) : (a - target) / (a - dd);
        c2 = std::clamp(c2, 0.0, 1.0);
        const double c = std::sqrt(c2), s = std::sqrt(1.0 - c2);
        const cplx e = std::polar(1.0, phi);

        Eigen::MatrixXcd G = Eigen::MatrixXcd::Identity(P, P);
        G(hi, hi) = c;
        G(hi, lo) = s * e;
        G(lo, hi) = -s * std::conj(e);
        G(lo, lo) = c;
        W = G * W * G.adjoint();
        U = G * U;
    }
    if (rotations) *rotations = int(steps);
    return U;
}

BlockDesign design_block(const Eigen::MatrixXcd& Mi, const Eigen::MatrixXcd& Rci, const Eigen::MatrixXcd& Sigma_i,
                         int P, int b, double eta) {
    if (Mi.cols() != Rci.rows() || Rci.rows() != Sigma_i.rows()) throw std::invalid_argument("design_block: size mismatch");
    const Eigen::Index MN = Mi.cols();
    const Eigen::MatrixXcd S_isqrt = linalg::hpd_inverse_sqrt(Sigma_i);
    const Eigen::MatrixXcd T = Mi * Rci;
    const Eigen::MatrixXcd Gt = T * S_isqrt;

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(Gt, Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) throw std::runtime_error("design_block: SVD failed");

    BlockDesign out;
    out.singular = svd.singularValues();
    out.V = svd.matrixV();
    const WaterfillResult wf = waterfill(out.singular, P, b, eta, Mi.rows());
    out.lambda2 = wf.lambda2;
    out.zeta = wf.zeta;

    // Lambda V^H, P x MN
    Eigen::MatrixXcd LV = Eigen::MatrixXcd::Zero(P, MN);
    for (Eigen::Index l = 0; l < wf.lambda2.size(); ++l)
        LV.row(l) = std::sqrt(wf.lambda2[l]) * out.V.col(l).adjoint();
    Eigen::MatrixXcd LLt = Eigen::MatrixXcd::Zero(P, P);
    LLt.diagonal().head(wf.lambda2.size()) = wf.lambda2.cast<cplx>();
    out.U = equalizing_unitary(LLt);
    out.B = out.U * LV * S_isqrt;

    const double sigma_q2 = quantization_noise_constant(eta, b, P);
    Eigen::MatrixXcd inner = out.B * Sigma_i * out.B.adjoint();
    inner.diagonal().array() += sigma_q2;
    out.D = T * out.B.adjoint() * linalg::hpd_inverse(inner);

    double eps = 0.0;
    for (Eigen::Index l = 0; l < out.singular.size(); ++l) {
        const double lam2 = out.singular[l] * out.singular[l];
        if (l < wf.lambda2.size())
            eps += lam2 / (std::max(wf.zeta * out.singular[l] - 1.0, 0.0) + 1.0);
        else
            eps += lam2;
    }
    out.emse = eps;
    return out;
}

Eigen::MatrixXcd AcquisitionDesign::combiner_dense() const {
    const Eigen::Index P = channels, MN = blocks.at(0).B.cols();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(P * tones, MN * tones);
    for (int i = 0; i < tones; ++i) out.block(i * P, i * MN, P, MN) = blocks[i].B;
    return out;
}

Eigen::VectorXcd AcquisitionDesign::analog(const Eigen::VectorXcd& x) const {
    const Eigen::Index MN = blocks.at(0).B.cols();
    if (x.size() != MN * tones) throw std::invalid_argument("analog: length mismatch");
    Eigen::VectorXcd bx(Eigen::Index(channels) * tones);
    for (int i = 0; i < tones; ++i) bx.segment(i * channels, channels).noalias() = blocks[i].B * x.segment(i * MN, MN);
    return apply_fbar(channels, tones, bx);
}

Eigen::VectorXcd AcquisitionDesign::digital(const Eigen::VectorXcd& z) const {
    const Eigen::VectorXcd u = apply_fbar_adjoint(channels, tones, z);
    Eigen::Index J = 0;
    for (const auto& blk : blocks) J += blk.D.rows();
    Eigen::VectorXcd s(J);
    Eigen::Index r = 0;
    for (int i = 0; i < tones; ++i) {
        const auto& Di = blocks[i].D;
        s.segment(r, Di.rows()).noalias() = Di * u.segment(i * channels, channels);
        r += Di.rows();
    }
    return s;
}

namespace {

AcquisitionDesign assemble(const SignalStatistics& stats, const CompressionMatrix& M, int P, int b, double eta) {
    stats.validate();
    if (M.tones() != stats.tones() || M.block_cols() != stats.block_size())
        throw std::invalid_argument("design: compression and statistics block structure differ");
    if (P < 1) throw std::invalid_argument("design: need at least one channel");
    if (b < 2 || (b & (b - 1)) != 0) throw std::invalid_argument("design: b must be a power of two >= 2");
    const int L = stats.tones();

    AcquisitionDesign d;
    d.channels = P;
    d.tones = L;
    d.levels = b;
    d.eta = eta;
    d.support = eta / std::sqrt(double(P));
    d.blocks.resize(L);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < L; ++i) d.blocks[i] = design_block(M.blocks[i], stats.signal[i], stats.total(i), P, b, eta);

    d.emse = 0.0;
    for (const auto& blk : d.blocks) d.emse += blk.emse;
    d.lmmse = lmmse_error(M, stats);

    // D = blkdiag(D_i) Fbar^H: block (i, t) = F(i, t) D_i
    const Eigen::MatrixXcd F = dft_matrix(L);
    const Eigen::Index J = M.rows();
    d.D = Eigen::MatrixXcd::Zero(J, Eigen::Index(P) * L);
    Eigen::Index r = 0;
    for (int i = 0; i < L; ++i) {
        const auto& Di = d.blocks[i].D;
        for (int t = 0; t < L; ++t) d.D.block(r, Eigen::Index(t) * P, Di.rows(), P) = F(i, t) * Di;
        r += Di.rows();
    }
    return d;
}

}  // namespace

AcquisitionDesign design_monotone(const SignalStatistics& stats, const CompressionMatrix& M, int P, int b, double eta) {
    if (stats.tones() != 1) throw std::invalid_argument("design_monotone: requires L = 1");
    return assemble(stats, M, P, b, eta);
}

AcquisitionDesign design_multitone(const SignalStatistics& stats, const CompressionMatrix& M, int P, int b,
                                   double eta) {
    return assemble(stats, M, P, b, eta);
}

double theoretical_emse(const AcquisitionDesign& design) {
    double eps = 0.0;
    for (const auto& blk : design.blocks) eps += blk.emse;
    return eps;
}

double emse_of_combiner(const std::vector<Eigen::MatrixXcd>& B, const SignalStatistics& stats,
                        const CompressionMatrix& M, double sigma_q2) {
    if (int(B.size()) != stats.tones() || M.tones() != stats.tones())
        throw std::invalid_argument("emse_of_combiner: block count mismatch");
    double eps = 0.0;
    for (int i = 0; i < stats.tones(); ++i) {
        const Eigen::MatrixXcd T = M.blocks[i] * stats.signal[i];
        const Eigen::MatrixXcd Sigma = stats.total(i);
        Eigen::MatrixXcd inner = B[i] * Sigma * B[i].adjoint();
        inner.diagonal().array() += sigma_q2;
        const Eigen::MatrixXcd core = linalg::hpd_inverse(Sigma) - B[i].adjoint() * linalg::hpd_inverse(inner) * B[i];
        eps += (T * core * T.adjoint()).trace().real();
    }
    return eps;
}

double emse_of_combiner_dense(const Eigen::MatrixXcd& Bbar, const Eigen::MatrixXcd& T, const Eigen::MatrixXcd& Sigma,
                              double sigma_q2) {
    Eigen::MatrixXcd inner = Bbar * Sigma * Bbar.adjoint();
    inner.diagonal().array() += sigma_q2;
    const Eigen::MatrixXcd core = linalg::hpd_inverse(Sigma) - Bbar.adjoint() * linalg::hpd_inverse(inner) * Bbar;
    return (T * core * T.adjoint()).trace().real();
}

double support_for_combiner(const std::vector<Eigen::MatrixXcd>& B, const SignalStatistics& stats, double eta) {
    if (B.empty() || int(B.size()) != stats.tones()) throw std::invalid_argument("support_for_combiner: block count mismatch");
    Eigen::VectorXd var = Eigen::VectorXd::Zero(B[0].rows());
    for (int i = 0; i < stats.tones(); ++i)
        var += (B[i] * stats.total(i) * B[i].adjoint()).diagonal().real();
    var /= double(stats.tones());
    return eta * std::sqrt(var.maxCoeff());
}

double modeled_mse(const Eigen::MatrixXcd& D, const AcquisitionDesign& design, const SignalStatistics& stats,
                   const CompressionMatrix& M) {
    const Eigen::MatrixXcd G = fbar_matrix(design.channels, design.tones) * design.combiner_dense();
    const Eigen::MatrixXcd TM = M.task_dense();
    const Eigen::MatrixXcd Rc = stats.signal_dense();
    const Eigen::MatrixXcd Sigma = stats.total_dense();
    Eigen::MatrixXcd Rz = G * Sigma * G.adjoint();
    Rz.diagonal().array() += design.noise_variance();
    const Eigen::MatrixXcd cross = G * Rc * TM.adjoint();  // E[z s^H]
    return (TM * Rc * TM.adjoint()).trace().real() - 2.0 * (D * cross).trace().real() +
           (D * Rz * D.adjoint()).trace().real();
}

namespace {

cplx pulse_at(const Eigen::VectorXcd& h0, int idx) {
    if (h0.size() == 0) return {1.0, 0.0};
    const cplx h = h0[idx];
    if (std::abs(h) == 0.0) throw std::domain_error("pulse spectrum vanishes at a required tone");
    return h;
}

}  // namespace

std::vector<FilterSample> analog_filter_response(const AcquisitionDesign& design, const RadarConfig& cfg, int p,
                                                 int n, const Eigen::VectorXcd& h0) {
    if (p < 0 || p >= design.channels || n < 0 || n >= cfg.N) throw std::out_of_range("filter index out of range");
    if (h0.size() != 0 && h0.size() != cfg.L) throw std::invalid_argument("pulse spectrum must have L samples");
    if (design.tones != cfg.L) throw std::invalid_argument("design does not match the configuration");
    std::vector<FilterSample> out;
    out.reserve(std::size_t(cfg.M) * cfg.L);
    for (int m = 0; m < cfg.M; ++m)
        for (int idx = 0; idx < cfg.L; ++idx) {
            FilterSample fs;
            fs.p = p;
            fs.n = n;
            fs.m = m;
            fs.tone = idx - cfg.half_tones();
            fs.frequency_hz = fs.tone / cfg.pri_s + cfg.tone_offsets_hz[m];
            // T0 b h0^* / |h0|^2 = T0 b / h0
            fs.gain = cfg.pri_s * design.blocks[idx].B(p, m * cfg.N + n) / pulse_at(h0, idx);
            out.push_back(fs);
        }
    return out;
}

std::vector<Eigen::MatrixXcd> combiner_from_responses(const std::vector<FilterSample>& samples,
                                                      const RadarConfig& cfg, int P, const Eigen::VectorXcd& h0) {
    std::vector<Eigen::MatrixXcd> B(cfg.L, Eigen::MatrixXcd::Zero(P, cfg.virtual_elements()));
    for (const auto& fs : samples) {
        const int idx = fs.tone + cfg.half_tones();
        B.at(idx)(fs.p, fs.m * cfg.N + fs.n) = fs.gain * pulse_at(h0, idx) / cfg.pri_s;
    }
    return B;
}

}  // namespace bilimo
