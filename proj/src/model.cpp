#include "bilimo/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace bilimo {

namespace {

std::vector<double> ordered_tone_offsets(int M, double bandwidth_hz) {
    std::vector<double> f(M);
    for (int m = 0; m < M; ++m)
        f[m] = (m - (M + 1) / 2.0) * bandwidth_hz;
    return f;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

int tones_per_band(double bandwidth_hz, double pri_s) {
    require(bandwidth_hz > 0.0 && pri_s > 0.0, "bandwidth and PRI must be positive");
    const double product = bandwidth_hz * pri_s;
    const long L = std::lround(product);
    require(L >= 1, "B_h*T_0 must round to a positive integer");
    require(L % 2 == 1, "B_h*T_0 must round to an odd integer, got " + std::to_string(L));
    return static_cast<int>(L);
}

void RadarConfig::validate() const {
    require(M >= 1 && N >= 1, "M and N must be >= 1");
    require(L >= 1 && L % 2 == 1, "L must be a positive odd integer");
    require(L == tones_per_band(bandwidth_hz, pri_s), "L must equal round(B_h*T_0)");
    require(static_cast<int>(rx_positions.size()) == N, "rx_positions must have N entries");
    require(static_cast<int>(tx_positions.size()) == M, "tx_positions must have M entries");
    require(static_cast<int>(tone_offsets_hz.size()) == M, "tone_offsets_hz must have M entries");
    require(rx_positions[0] == 0.0 && tx_positions[0] == 0.0, "first rx/tx element must sit at 0");
    for (int m = 0; m < M; ++m)
        for (int k = m + 1; k < M; ++k)
            require(std::abs(tone_offsets_hz[m] - tone_offsets_hz[k]) >= bandwidth_hz * (1.0 - 1e-9),
                    "FDMA bands overlap");
    require(eta > 0.0, "eta must be positive");
    require(sigma_alpha2 > 0.0, "sigma_alpha2 must be positive");
    require(sigma_n2 >= 0.0, "sigma_n2 must be non-negative");
}

RadarConfig make_ula_config(int M, int N, double bandwidth_hz, double pri_s, double carrier_hz,
                            double eta, double sigma_alpha2, double sigma_n2) {
    require(M >= 1 && N >= 1, "M and N must be >= 1");
    RadarConfig cfg;
    cfg.M = M;
    cfg.N = N;
    cfg.L = tones_per_band(bandwidth_hz, pri_s);
    cfg.bandwidth_hz = bandwidth_hz;
    cfg.pri_s = pri_s;
    cfg.carrier_hz = carrier_hz;
    cfg.rx_positions.resize(N);
    cfg.tx_positions.resize(M);
    for (int n = 0; n < N; ++n) cfg.rx_positions[n] = n / 2.0;
    for (int m = 0; m < M; ++m) cfg.tx_positions[m] = N * m / 2.0;
    cfg.tone_offsets_hz = ordered_tone_offsets(M, bandwidth_hz);
    cfg.eta = eta;
    cfg.sigma_alpha2 = sigma_alpha2;
    cfg.sigma_n2 = sigma_n2;
    cfg.validate();
    return cfg;
}

RadarConfig make_random_array_config(Rng& rng, int M, int N, double bandwidth_hz, double pri_s,
                                     double carrier_hz, double eta, double sigma_alpha2,
                                     double sigma_n2) {
    RadarConfig cfg = make_ula_config(M, N, bandwidth_hz, pri_s, carrier_hz, eta, sigma_alpha2, sigma_n2);
    std::uniform_real_distribution<double> aperture(0.0, M * N / 2.0);
    for (int n = 1; n < N; ++n) cfg.rx_positions[n] = aperture(rng);
    for (int m = 1; m < M; ++m) cfg.tx_positions[m] = aperture(rng);

    // distinct slots keep the bands disjoint
    std::vector<int> slot(M);
    std::iota(slot.begin(), slot.end(), 0);
    std::shuffle(slot.begin(), slot.end(), rng);
    for (int m = 0; m < M; ++m)
        cfg.tone_offsets_hz[m] = (slot[m] - (M + 1) / 2.0) * bandwidth_hz;
    cfg.validate();
    return cfg;
}

double TargetScene::delay(const RadarConfig& cfg, int k) const {
    return cfg.pri_s * targets.at(k).delay_index / cfg.delay_cells();
}

double TargetScene::azimuth_sine(const RadarConfig& cfg, int k) const {
    return -1.0 + 2.0 * targets.at(k).angle_index / cfg.angle_cells();
}

TargetScene sample_scene(Rng& rng, int K, const RadarConfig& cfg, CoefficientModel model) {
    const Eigen::Index cells = cfg.grid_size();
    if (K < 0 || K > cells)
        throw std::invalid_argument("target count exceeds the delay-angle grid");

    std::vector<Eigen::Index> all(static_cast<std::size_t>(cells));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    std::vector<Eigen::Index> picked;
    picked.reserve(K);
    std::sample(all.begin(), all.end(), std::back_inserter(picked), K, rng);
    std::shuffle(picked.begin(), picked.end(), rng);

    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    TargetScene scene;
    scene.targets.reserve(K);
    for (Eigen::Index flat : picked) {
        auto [l1, l2] = grid_cell(cfg, flat);
        Target t{l1, l2, {}};
        if (model == CoefficientModel::gaussian)
            t.alpha = complex_normal(rng, cfg.sigma_alpha2);
        else
            t.alpha = std::polar(std::sqrt(cfg.sigma_alpha2), phase(rng));
        scene.targets.push_back(t);
    }
    return scene;
}

Eigen::Index grid_index(const RadarConfig& cfg, int delay_index, int angle_index) {
    if (delay_index < 0 || delay_index >= cfg.delay_cells() || angle_index < 0 ||
        angle_index >= cfg.angle_cells())
        throw std::out_of_range("grid cell outside the delay-angle grid");
    return Eigen::Index(delay_index) * cfg.angle_cells() + angle_index;
}

std::pair<int, int> grid_cell(const RadarConfig& cfg, Eigen::Index flat) {
    if (flat < 0 || flat >= cfg.grid_size()) throw std::out_of_range("grid index out of range");
    return {static_cast<int>(flat / cfg.angle_cells()), static_cast<int>(flat % cfg.angle_cells())};
}

Eigen::VectorXcd scene_to_sparse_vector(const TargetScene& scene, const RadarConfig& cfg) {
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(cfg.grid_size());
    std::set<Eigen::Index> seen;
    for (const auto& t : scene.targets) {
        const Eigen::Index idx = grid_index(cfg, t.delay_index, t.angle_index);
        if (!seen.insert(idx).second) throw std::invalid_argument("duplicate target cell in scene");
        a[idx] = t.alpha;
    }
    return a;
}

TargetScene sparse_vector_to_scene(const Eigen::VectorXcd& a, const RadarConfig& cfg) {
    if (a.size() != cfg.grid_size()) throw std::invalid_argument("sparse vector has wrong length");
    TargetScene scene;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] == cplx{0.0, 0.0}) continue;
        auto [l1, l2] = grid_cell(cfg, i);
        scene.targets.push_back({l1, l2, a[i]});
    }
    return scene;
}

double snr_to_noise_variance(double snr_linear, const RadarConfig& cfg, int K) {
    if (!(snr_linear > 0.0)) throw std::invalid_argument("SNR must be positive");
    if (K < 0) throw std::invalid_argument("negative target count");
    // E||Phi a||^2 = K * MNL * sigma_alpha^2 for unit-modulus dictionary entries.
    return cfg.sigma_alpha2 / snr_linear;
}

cplx complex_normal(Rng& rng, double variance) {
    std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
    const double re = g(rng);
    const double im = g(rng);
    return {re, im};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto splitmix = [](std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    };
    return splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

}  // namespace bilimo
