#include <doctest.h>

#include <set>

#include "bilimo/dictionary.hpp"
#include "bilimo/harness.hpp"
#include "bilimo/io.hpp"
#include "helpers.hpp"

using namespace bilimo;
using testing_helpers::full_ula;
using testing_helpers::random_vector;
using testing_helpers::small_ula;

TEST_CASE("dictionary dimensions and entries") {
    const SteeringDictionary dict(full_ula());
    CHECK(dict.rows() == 864);
    CHECK(dict.cols() == 6912);
    const Eigen::MatrixXcd& phi = dict.phi();
    CHECK(phi.rows() == 864);
    CHECK(phi.cols() == 6912);
    CHECK((phi.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK((phi.colwise().squaredNorm().array() - 864.0).abs().maxCoeff() < 1e-8);
    for (int m = 0; m < 8; ++m) {
        CHECK(dict.U()[m].rows() == 12);
        CHECK(dict.U()[m].cols() == 96);
        CHECK(dict.V()[m].rows() == 9);
        CHECK(dict.V()[m].cols() == 72);
    }
}

TEST_CASE("degenerate 1x1x1 dictionary") {
    const RadarConfig cfg = make_ula_config(1, 1, 1e6, 1e-6, 10e9);
    const SteeringDictionary dict(cfg);
    CHECK(dict.phi().rows() == 1);
    CHECK(dict.phi().cols() == 1);
    CHECK(std::abs(dict.phi()(0, 0)) == doctest::Approx(1.0));
    CHECK(dict.permutation().matrix().isIdentity());
    CHECK(fbar_matrix(1, 1).isIdentity(1e-15));
}

TEST_CASE("dictionary matches the closed-form oracle") {
    for (const RadarConfig& cfg : {full_ula(), default_config(3), small_ula(3, 4)}) {
        const SteeringDictionary dict(cfg);
        Rng rng(99);
        double worst = 0.0;
        for (int r = 0; r < 20; ++r) {
            const TargetScene s = sample_scene(rng, 4, cfg, CoefficientModel::gaussian);
            const Eigen::VectorXcd a = scene_to_sparse_vector(s, cfg);
            const Eigen::VectorXcd direct = eval_c_direct(s, cfg);
            worst = std::max(worst, (dict.phi() * a - direct).norm() / direct.norm());
            worst = std::max(worst, (dict.apply(a) - direct).norm() / direct.norm());
        }
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("oracle corner cases") {
    const RadarConfig cfg = small_ula(2, 3);
    CHECK(eval_c_direct(TargetScene{}, cfg).norm() == 0.0);
    // zero-delay target: every tone of a given (m, n) is the same
    TargetScene s;
    s.targets.push_back({0, 2, {1.0, 0.0}});
    const Eigen::VectorXcd c = eval_c_direct(s, cfg);
    for (int m = 0; m < cfg.M; ++m)
        for (int n = 0; n < cfg.N; ++n)
            for (int i = 1; i < cfg.L; ++i) {
                const Eigen::Index base = m * cfg.N * cfg.L + n;
                CHECK(std::abs(c[base + i * cfg.N] - c[base]) < 1e-12);
            }
}

TEST_CASE("matrix-free apply and adjoint") {
    const RadarConfig cfg = default_config(5);
    const SteeringDictionary dense(cfg);
    const SteeringDictionary lean(cfg, DictionaryOptions{false});
    CHECK_FALSE(lean.has_dense());
    CHECK_THROWS(lean.phi());
    Rng rng(1);
    const Eigen::VectorXcd a = random_vector(rng, dense.cols());
    const Eigen::VectorXcd y = random_vector(rng, dense.rows());
    CHECK((lean.apply(a) - dense.phi() * a).norm() <= 1e-9 * (dense.phi() * a).norm());
    CHECK((lean.apply_adjoint(y) - dense.phi().adjoint() * y).norm() <= 1e-9 * (dense.phi().adjoint() * y).norm());
    const cplx lhs = lean.apply(a).dot(y);
    const cplx rhs = a.dot(lean.apply_adjoint(y));
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(lhs));
}

TEST_CASE("memory cap refuses a dense build") {
    DictionaryOptions opt;
    opt.memory_cap_bytes = 1024;
    CHECK_THROWS_AS(SteeringDictionary(small_ula(2, 3), opt), std::length_error);
    opt.dense = false;
    CHECK_NOTHROW(SteeringDictionary(small_ula(2, 3), opt));
}

TEST_CASE("tone-major permutation") {
    const int M = 3, N = 4, L = 3;
    const Permutation P = Permutation::tone_major(M, N, L);
    REQUIRE(P.size() == M * N * L);
    std::set<Eigen::Index> image;
    for (int m = 0; m < M; ++m)
        for (int i = 0; i < L; ++i)
            for (int n = 0; n < N; ++n) {
                const Eigen::Index from = m * N * L + i * N + n;
                CHECK(P[from] == i * M * N + m * N + n);
                image.insert(P[from]);
            }
    CHECK(image.size() == std::size_t(M * N * L));

    Rng rng(4);
    const Eigen::VectorXcd x = random_vector(rng, P.size());
    CHECK(P.apply_inverse(P.apply(x)) == x);
    CHECK((P.matrix().cast<cplx>() * x - P.apply(x)).norm() == 0.0);
    CHECK((P.matrix() * P.matrix().transpose()).isIdentity());

    // M = 1: the layouts coincide
    CHECK(Permutation::tone_major(1, 5, 3).matrix().isIdentity());
}

TEST_CASE("dft and Fbar") {
    const Eigen::MatrixXcd F = dft_matrix(5);
    CHECK((F * F.adjoint()).isIdentity(1e-12));

    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(4);
    e0[0] = 1.0;
    const Eigen::VectorXcd y = apply_fbar(1, 4, e0);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(y[k] - cplx(0.5, 0.0)) < 1e-15);

    Rng rng(2);
    for (auto [P, L] : {std::pair{1, 1}, std::pair{3, 1}, std::pair{2, 5}, std::pair{4, 9}}) {
        const Eigen::VectorXcd x = random_vector(rng, P * L);
        const Eigen::MatrixXcd Fb = fbar_matrix(P, L);
        CHECK((Fb * Fb.adjoint()).isIdentity(1e-12));
        CHECK((Fb * x - apply_fbar(P, L, x)).norm() < 1e-12 * x.norm());
        CHECK((apply_fbar_adjoint(P, L, apply_fbar(P, L, x)) - x).norm() < 1e-12 * x.norm());
        if (L == 1) CHECK(apply_fbar(P, L, x) == x);
    }
    CHECK_THROWS(apply_fbar(2, 3, Eigen::VectorXcd::Zero(5)));
}

TEST_CASE("coherence") {
    CHECK(coherence(Eigen::MatrixXcd::Identity(4, 4)) == 0.0);
    Eigen::MatrixXcd dup(2, 2);
    dup << 1.0, 1.0, 2.0, 2.0;
    CHECK(coherence(dup) == doctest::Approx(1.0));
    Eigen::MatrixXcd ex(2, 2);
    ex << 1.0, 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0);
    CHECK(coherence(ex) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS(coherence(Eigen::MatrixXcd::Zero(3, 2)));

    Rng rng(6);
    Eigen::MatrixXcd A = testing_helpers::random_matrix(rng, 6, 9);
    const double mu = coherence(A);
    CHECK((mu >= 0.0 && mu <= 1.0));
    Eigen::MatrixXcd B = A;
    B.col(0) *= cplx(0.0, 3.0);
    B.col(3).swap(B.col(7));
    CHECK(coherence(B) == doctest::Approx(mu).epsilon(1e-12));
}
