#include <doctest.h>

#include "bilimo/dictionary.hpp"
#include "bilimo/harness.hpp"
#include "bilimo/statistics.hpp"
#include "helpers.hpp"

using namespace bilimo;
using testing_helpers::full_ula;
using testing_helpers::random_hpd;
using testing_helpers::random_matrix;
using testing_helpers::random_vector;
using testing_helpers::small_ula;

using testing_helpers::random_compression;
using testing_helpers::random_stats;

TEST_CASE("default covariances") {
    RadarConfig cfg = full_ula();
    cfg.sigma_n2 = 0.1;
    const SignalStatistics st = build_covariances(cfg, 4);
    REQUIRE(st.tones() == 9);
    REQUIRE(st.block_size() == 96);
    CHECK(st.signal[0].isApprox(4.0 * Eigen::MatrixXcd::Identity(96, 96)));
    CHECK(st.noise[3].isApprox(0.1 * Eigen::MatrixXcd::Identity(96, 96)));

    const SignalStatistics zero = build_covariances(cfg, 0);
    CHECK(zero.signal[0].norm() == 0.0);

    cfg.sigma_n2 = 0.0;
    const SignalStatistics clean = build_covariances(cfg, 2);
    CHECK(clean.total(0).isApprox(clean.signal[0]));
}

TEST_CASE("signal covariance against Monte Carlo (ULA)") {
    const RadarConfig cfg = small_ula(2, 3);
    const SteeringDictionary dict(cfg);
    const SignalStatistics st = build_covariances(cfg, 4);
    const Eigen::MatrixXcd R = st.signal_dense();
    const Eigen::Index n = R.rows();
    Rng rng(31);
    const int draws = 100000;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXd acc2 = Eigen::MatrixXd::Zero(n, n);
    for (int d = 0; d < draws; ++d) {
        const TargetScene s = sample_scene(rng, 4, cfg, CoefficientModel::gaussian);
        const Eigen::VectorXcd c = dict.permutation().apply(synthesize(dict, scene_to_sparse_vector(s, cfg)));
        const Eigen::MatrixXcd outer = c * c.adjoint();
        acc += outer;
        acc2 += outer.cwiseAbs2();
    }
    const Eigen::MatrixXcd Rhat = acc / double(draws);
    double diag_err = 0.0;
    int beyond3 = 0;
    double worst_sigma = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            if (j == k) {
                diag_err = std::max(diag_err, std::abs(Rhat(j, j).real() - 4.0) / 4.0);
                continue;
            }
            const double var = acc2(j, k) / draws - std::norm(Rhat(j, k));
            const double se = std::sqrt(var / draws);
            const double z = std::abs(Rhat(j, k) - R(j, k)) / se;
            worst_sigma = std::max(worst_sigma, z);
            if (z > 3.0) ++beyond3;
        }
    CHECK(diag_err < 0.02);
    // Off-diagonals are estimator noise; a complex z-score exceeds 3 with
    // probability e^{-4.5}, so a handful out of ~300 is expected.
    CHECK(beyond3 <= int(0.03 * n * (n - 1)));
    CHECK(worst_sigma < 5.0);
}

TEST_CASE("statistics_from_dense validates structure") {
    Rng rng(2);
    const SignalStatistics st = random_stats(rng, 3, 4);
    const SignalStatistics back = statistics_from_dense(st.signal_dense(), st.noise_dense(), 4);
    for (int i = 0; i < 3; ++i) CHECK(back.signal[i].isApprox(st.signal[i]));

    Eigen::MatrixXcd bad = st.signal_dense();
    bad(0, 5) = 0.1;
    bad(5, 0) = 0.1;
    CHECK_THROWS(statistics_from_dense(bad, st.noise_dense(), 4));
    Eigen::MatrixXcd neg = st.signal_dense();
    neg.topLeftCorner(4, 4) = -Eigen::MatrixXcd::Identity(4, 4);
    CHECK_THROWS(statistics_from_dense(neg, st.noise_dense(), 4));
    CHECK_THROWS(statistics_from_dense(st.signal_dense(), st.noise_dense(), 5));
}

TEST_CASE("compressed length and channels") {
    const RadarConfig cfg = full_ula();
    CHECK(compressed_length(cfg, 2.0) == 432);
    CHECK(analog_channels(432, 9) == 48);
    CHECK(compressed_length(cfg, 1.0) == 864);
    CHECK(compressed_length(cfg, 5.0) == 171);  // 172.8 -> 172 -> multiple of 9
    CHECK(compressed_length(cfg, 8.0) == 108);
    CHECK_THROWS(compressed_length(cfg, 200.0));
    CHECK_THROWS(compressed_length(cfg, 0.5));
    CHECK(compressed_length(small_ula(3, 4), 2.0) == 18);
    CHECK(analog_channels(18, 3) == 6);
}

TEST_CASE("compression matrix kinds") {
    const RadarConfig cfg = full_ula();
    for (auto kind : {CompressionKind::gaussian, CompressionKind::bernoulli, CompressionKind::dft}) {
        Rng r1(7), r2(7);
        const CompressionMatrix A = build_compression_matrix(r1, cfg, 2.0, kind);
        const CompressionMatrix B = build_compression_matrix(r2, cfg, 2.0, kind);
        CHECK(A.rows() == 432);
        CHECK(A.tones() == 9);
        CHECK(A.block_rows() == 48);
        CHECK(A.block_cols() == 96);
        CHECK(A.kind == kind);
        for (int i = 0; i < 9; ++i) CHECK(A.blocks[i] == B.blocks[i]);
        double ms = 0.0;
        for (const auto& b : A.blocks) ms += b.squaredNorm();
        CHECK(ms / (432.0 * 96.0) == doctest::Approx(1.0).epsilon(0.03));
        CHECK(parse_compression_kind(to_string(kind)) == kind);
    }
    Rng rng(8);
    const CompressionMatrix D = build_compression_matrix(rng, cfg, 2.0, CompressionKind::dft);
    for (const auto& b : D.blocks) {
        CHECK((b.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
        // distinct DFT rows are orthogonal
        const Eigen::MatrixXcd G = b * b.adjoint() / 96.0;
        CHECK(G.isIdentity(1e-10));
    }
    const CompressionMatrix Bn = build_compression_matrix(rng, cfg, 2.0, CompressionKind::bernoulli);
    CHECK((Bn.blocks[0].cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK_THROWS(parse_compression_kind("sparse"));
}

TEST_CASE("dense compression round trip") {
    const RadarConfig cfg = small_ula(3, 4);
    const Permutation perm = Permutation::tone_major(3, 4, 3);
    Rng rng(9);
    const CompressionMatrix M = build_compression_matrix(rng, cfg, 2.0, CompressionKind::gaussian);
    const Eigen::MatrixXcd Md = M.dense(perm);
    CHECK((Md * perm.matrix().transpose().cast<cplx>() - M.task_dense()).norm() < 1e-12);
    const CompressionMatrix back = compression_from_dense(Md, perm, 3);
    for (int i = 0; i < 3; ++i) CHECK(back.blocks[i].isApprox(M.blocks[i]));
    Eigen::MatrixXcd bad = Md;
    // an entry outside the block of tone 0 in row 0
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(36);
    e[20] = 1.0;  // tone-major index 20 belongs to tone 1
    Eigen::Index col = 0;
    perm.apply_inverse(e).cwiseAbs().maxCoeff(&col);
    bad(0, col) = 1.0;
    CHECK_THROWS(compression_from_dense(bad, perm, 3));

    const Eigen::VectorXcd c = random_vector(rng, 36);
    const Eigen::VectorXcd s = random_vector(rng, 18);
    CHECK((M.apply_task(c) - M.task_dense() * c).norm() < 1e-12);
    CHECK((M.apply_task_adjoint(s) - M.task_dense().adjoint() * s).norm() < 1e-12);
}

TEST_CASE("lmmse examples") {
    // R_w = 0 and square invertible M: Gamma = M P^T
    Rng rng(10);
    const SignalStatistics st = random_stats(rng, 3, 3, 0.0);
    SignalStatistics clean = st;
    for (auto& n : clean.noise) n.setZero();
    CompressionMatrix I;
    for (int i = 0; i < 3; ++i) I.blocks.push_back(Eigen::MatrixXcd::Identity(3, 3));
    CHECK(lmmse_transform(I, clean).isIdentity(1e-9));
    CHECK(std::abs(lmmse_error(I, clean)) < 1e-9);

    // scalar Wiener filter
    SignalStatistics white;
    for (int i = 0; i < 3; ++i) {
        white.signal.push_back(4.0 * Eigen::MatrixXcd::Identity(5, 5));
        white.noise.push_back(0.5 * Eigen::MatrixXcd::Identity(5, 5));
    }
    const CompressionMatrix G = random_compression(rng, 3, 2, 5);
    CHECK(lmmse_transform(G, white).isApprox(4.0 / 4.5 * G.task_dense(), 1e-12));

    // orthonormal rows: eps_L = J c w / (c + w)
    const RadarConfig cfg = small_ula(2, 3);
    Rng r2(3);
    CompressionMatrix F = build_compression_matrix(r2, cfg, 2.0, CompressionKind::dft);
    for (auto& b : F.blocks) b /= std::sqrt(double(b.cols()));
    SignalStatistics w6;
    for (int i = 0; i < 3; ++i) {
        w6.signal.push_back(4.0 * Eigen::MatrixXcd::Identity(6, 6));
        w6.noise.push_back(0.5 * Eigen::MatrixXcd::Identity(6, 6));
    }
    CHECK(lmmse_error(F, w6) == doctest::Approx(9.0 * 4.0 * 0.5 / 4.5).epsilon(1e-10));
}

TEST_CASE("blockwise lmmse equals the dense reference") {
    Rng rng(12);
    const int L = 3, MN = 6;
    const Permutation perm = Permutation::tone_major(2, 3, L);
    const SignalStatistics st = random_stats(rng, L, MN);
    const CompressionMatrix M = random_compression(rng, L, 4, MN);
    const Eigen::MatrixXcd Rc = st.signal_dense();
    const Eigen::MatrixXcd Rw = st.noise_dense();
    const Eigen::MatrixXcd Gd = lmmse_transform_dense(M.dense(perm), perm, Rc, Rw);
    CHECK((lmmse_transform(M, st) - Gd).norm() <= 1e-10 * Gd.norm());
    const double ed = lmmse_error_dense(M.dense(perm), perm, Rc, Rw);
    CHECK(std::abs(lmmse_error(M, st) - ed) <= 1e-10 * ed);

    // permuting the rows of M permutes Gamma's rows and keeps eps_L
    CompressionMatrix Mp = M;
    for (auto& b : Mp.blocks) b.row(0).swap(b.row(3));
    CHECK(lmmse_error(Mp, st) == doctest::Approx(lmmse_error(M, st)).epsilon(1e-12));
    const auto g = lmmse_blocks(M, st);
    const auto gp = lmmse_blocks(Mp, st);
    CHECK(gp[1].row(0).isApprox(g[1].row(3)));
}

TEST_CASE("lmmse against Monte Carlo and alternative estimators") {
    RadarConfig cfg = small_ula(2, 3);
    cfg.sigma_n2 = 0.5;
    const SteeringDictionary dict(cfg);
    const int K = 2;
    const SignalStatistics st = build_covariances(cfg, K);
    Rng mr(5);
    const CompressionMatrix M = build_compression_matrix(mr, cfg, 2.0, CompressionKind::gaussian);
    const Eigen::MatrixXcd G = lmmse_transform(M, st);
    const double eps = lmmse_error(M, st);

    Rng rng(6);
    std::vector<Eigen::MatrixXcd> alts;
    for (int k = 0; k < 5; ++k) alts.push_back(G + 0.05 * random_matrix(rng, G.rows(), G.cols()));
    std::vector<double> alt_err(alts.size(), 0.0);
    Eigen::VectorXcd cross = Eigen::VectorXcd::Zero(G.rows());
    double acc = 0.0;
    const int draws = 100000;
    double sum_err_norm = 0.0;
    double own_err = 0.0;
    for (int d = 0; d < draws; ++d) {
        const TargetScene s = sample_scene(rng, K, cfg, CoefficientModel::gaussian);
        const Eigen::VectorXcd c = dict.permutation().apply(synthesize(dict, scene_to_sparse_vector(s, cfg)));
        const Eigen::VectorXcd x = c + random_vector(rng, c.size(), cfg.sigma_n2);
        const Eigen::VectorXcd sv = M.apply_task(c);
        const Eigen::VectorXcd e = sv - G * x;
        acc += e.squaredNorm();
        if (d < 10000) {
            for (std::size_t k = 0; k < alts.size(); ++k) alt_err[k] += (sv - alts[k] * x).squaredNorm();
            own_err += e.squaredNorm();
            cross += e * std::conj(x[0]);
            sum_err_norm += e.norm() * x.norm();
        }
    }
    CHECK(acc / draws == doctest::Approx(eps).epsilon(0.03));
    // orthogonality principle: E[e x^H] ~ 0
    CHECK(cross.norm() / 10000.0 < 0.05 * sum_err_norm / 10000.0);
    for (std::size_t k = 0; k < alts.size(); ++k) CHECK(alt_err[k] > own_err);
}
