#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bilimo {

using cplx = std::complex<double>;
using Rng = std::mt19937_64;

// Array geometry, FDMA tone plan and statistical parameters of one radar.
// Positions are in carrier wavelengths; frequencies in Hz.
struct RadarConfig {
    int M = 1;  // transmit antennas
    int N = 1;  // receive antennas
    int L = 1;  // tones per band, L = B_h * T_0 (odd)
    double bandwidth_hz = 1e6;
    double pri_s = 1e-6;
    double carrier_hz = 10e9;  // metadata only
    std::vector<double> rx_positions;
    std::vector<double> tx_positions;
    std::vector<double> tone_offsets_hz;
    double eta = 2.0;
    double sigma_alpha2 = 1.0;
    double sigma_n2 = 0.0;

    int virtual_elements() const { return M * N; }
    int delay_cells() const { return M * L; }
    int angle_cells() const { return M * N; }
    Eigen::Index samples() const { return Eigen::Index(M) * N * L; }
    Eigen::Index grid_size() const { return Eigen::Index(M) * M * N * L; }
    int half_tones() const { return (L - 1) / 2; }

    // Throws std::invalid_argument on any broken invariant.
    void validate() const;
};

// Rounds B_h*T_0 and rejects non-odd or non-positive products.
int tones_per_band(double bandwidth_hz, double pri_s);

RadarConfig make_ula_config(int M, int N, double bandwidth_hz, double pri_s, double carrier_hz,
                            double eta = 2.0, double sigma_alpha2 = 1.0, double sigma_n2 = 0.0);

// Element positions uniform over the virtual aperture [0, MN/2] (first element of
// each array pinned to 0) and FDMA tones on a random permutation of band slots.
RadarConfig make_random_array_config(Rng& rng, int M, int N, double bandwidth_hz, double pri_s,
                                     double carrier_hz, double eta = 2.0, double sigma_alpha2 = 1.0,
                                     double sigma_n2 = 0.0);

struct Target {
    int delay_index = 0;  // l1 in [0, ML)
    int angle_index = 0;  // l2 in [0, MN)
    cplx alpha{0.0, 0.0};
};

struct TargetScene {
    std::vector<Target> targets;

    int size() const { return static_cast<int>(targets.size()); }
    double delay(const RadarConfig& cfg, int k) const;
    double azimuth_sine(const RadarConfig& cfg, int k) const;
};

enum class CoefficientModel { gaussian, unit_modulus };

TargetScene sample_scene(Rng& rng, int K, const RadarConfig& cfg, CoefficientModel model);

// a = vec(A), A in C^{MN x ML}, A(l2, l1) = alpha: flat index l1*MN + l2.
Eigen::Index grid_index(const RadarConfig& cfg, int delay_index, int angle_index);
std::pair<int, int> grid_cell(const RadarConfig& cfg, Eigen::Index flat);

Eigen::VectorXcd scene_to_sparse_vector(const TargetScene& scene, const RadarConfig& cfg);
TargetScene sparse_vector_to_scene(const Eigen::VectorXcd& a, const RadarConfig& cfg);

// sigma_n^2 such that E||Phi a||^2 / (MNL K sigma_n^2) equals the requested SNR.
double snr_to_noise_variance(double snr_linear, const RadarConfig& cfg, int K);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// CN(0, variance) draw.
cplx complex_normal(Rng& rng, double variance);

// Stable 64-bit mix of a seed with stream indices (splitmix64 finaliser).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace bilimo
