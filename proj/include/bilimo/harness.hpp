#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bilimo/adc.hpp"
#include "bilimo/combiner.hpp"
#include "bilimo/dictionary.hpp"
#include "bilimo/model.hpp"
#include "bilimo/recovery.hpp"
#include "bilimo/statistics.hpp"

namespace bilimo {

enum class Method { bilimo, task_ignorant, noquan_dr, noquan_lmmse };

Method parse_method(const std::string& name);
std::string to_string(Method m);
CoefficientModel parse_coefficient_model(const std::string& name);
std::string to_string(CoefficientModel m);

struct TrialMetrics {
    bool ok = false;
    std::string error;
    double err_s = 0.0;   // ||s - s_hat||^2
    double err_a = 0.0;   // ||a - a_hat||^2
    double mse_s = 0.0;   // relative
    double mse_a = 0.0;   // relative
    double hit = 0.0;
    std::uint64_t saturated = 0;
    std::uint64_t quantized = 0;
    int iterations = 0;
};

// Everything a trial needs that is fixed within a sweep point. Built once,
// shared read-only by the trial workers.
struct PointContext {
    const SteeringDictionary* dict = nullptr;
    CompressionMatrix M;
    SignalStatistics stats;
    std::vector<Eigen::MatrixXcd> gamma;          // LMMSE blocks
    std::optional<AcquisitionDesign> design;      // only when bilimo runs
    RecoverySpec recovery;
    LinearOperator task_op;                       // M Phi
    LinearOperator phi_op;                        // Phi (c~ rows)
    double lipschitz_task = 0.0;
    double lipschitz_phi = 0.0;
    long budget_bits = 0;
    int K = 0;
    bool dither = true;
    CoefficientModel coeff = CoefficientModel::gaussian;

    const RadarConfig& config() const { return dict->config(); }
    Eigen::VectorXcd lmmse_apply(const Eigen::VectorXcd& x) const;  // Gamma x, tone-major x
};

struct TrialInput {
    TargetScene scene;
    Eigen::VectorXcd a;
    Eigen::VectorXcd c;   // P Phi a, tone-major
    Eigen::VectorXcd w;   // tone-major noise
};

LinearOperator task_operator(const SteeringDictionary& dict, const CompressionMatrix& M);
LinearOperator dictionary_operator(const SteeringDictionary& dict);

// Phi a from the K nonzero columns (no full apply needed).
Eigen::VectorXcd synthesize(const SteeringDictionary& dict, const Eigen::VectorXcd& a);

TrialInput draw_trial_input(Rng& rng, const PointContext& ctx);

TrialMetrics run_bilimo_trial(const PointContext& ctx, const TrialInput& in, Rng& rng);
TrialMetrics run_task_ignorant_trial(const PointContext& ctx, const TrialInput& in, Rng& rng);
TrialMetrics run_noquan_dr_trial(const PointContext& ctx, const TrialInput& in);
TrialMetrics run_noquan_lmmse_trial(const PointContext& ctx, const TrialInput& in);

struct ExperimentSpec {
    RadarConfig config;
    std::vector<long> budget_bits{1728};
    std::vector<double> snr_db{10.0};
    std::vector<double> dcr{2.0};
    std::vector<int> k{4};
    std::vector<CompressionKind> kinds{CompressionKind::gaussian};
    int trials = 100;
    std::uint64_t seed = 1;
    std::vector<Method> methods{Method::bilimo, Method::task_ignorant, Method::noquan_dr, Method::noquan_lmmse};
    RecoverySpec recovery;
    CoefficientModel coeff = CoefficientModel::gaussian;
    bool dither = true;
    bool record_wall_time = false;  // wall_ms column in the CSV (breaks byte determinism)

    void validate() const;
};

struct PointResult {
    Method method = Method::bilimo;
    long budget_bits = 0;
    double snr_db = 0.0;
    double dcr = 0.0;
    int k = 0;
    CompressionKind kind = CompressionKind::gaussian;
    double mse_s_mean = 0.0, mse_s_se = 0.0;
    double mse_a_mean = 0.0, mse_a_se = 0.0;
    double hit_rate_mean = 0.0, hit_rate_se = 0.0;
    double err_s_mean = 0.0;               // absolute E||s - s_hat||^2
    double eps_lmmse = 0.0;
    std::optional<double> eps_emse;        // bilimo only
    double saturation_rate = 0.0;
    int trials = 0;
    int failed = 0;
    double wall_ms = 0.0;
    // design metadata
    Eigen::Index J = 0;
    int channels = 0;
    int levels = 0;
    double support = 0.0;
    double rho_scale = 0.0;
};

struct ExperimentResult {
    std::vector<PointResult> rows;
    std::vector<std::vector<TrialMetrics>> per_trial;  // aligned with rows
};

// Trial seed for a sweep point: scenes and noise depend on (SNR, K, trial) only,
// so every method, matrix kind, compression ratio and budget sees the same draws.
std::uint64_t trial_seed(std::uint64_t master, double snr_db, int K, int trial);

// Compression matrices depend on (dcr, kind) only.
std::uint64_t matrix_seed(std::uint64_t master, double dcr, CompressionKind kind);

ExperimentResult run_sweep(const ExperimentSpec& spec);

void write_csv(const ExperimentResult& result, std::ostream& os, bool wall_time);
void write_csv_file(const ExperimentResult& result, const std::string& path, bool wall_time);
// JSON provenance next to the CSV.
void write_sidecar(const ExperimentSpec& spec, const ExperimentResult& result, const std::string& path);

// Mean and standard error (n - 1 denominator) of a sample.
std::pair<double, double> mean_and_se(const std::vector<double>& v);

}  // namespace bilimo
