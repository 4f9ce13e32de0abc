#include "bilimo/harness.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "bilimo/io.hpp"

namespace bilimo {

Method parse_method(const std::string& name) {
    if (name == "bilimo") return Method::bilimo;
    if (name == "task_ignorant") return Method::task_ignorant;
    if (name == "noquan_dr") return Method::noquan_dr;
    if (name == "noquan_lmmse") return Method::noquan_lmmse;
    throw std::invalid_argument("unknown method: " + name);
}

std::string to_string(Method m) {
    switch (m) {
        case Method::bilimo: return "bilimo";
        case Method::task_ignorant: return "task_ignorant";
        case Method::noquan_dr: return "noquan_dr";
        case Method::noquan_lmmse: return "noquan_lmmse";
    }
    return "unknown";
}

CoefficientModel parse_coefficient_model(const std::string& name) {
    if (name == "gaussian") return CoefficientModel::gaussian;
    if (name == "unit_modulus") return CoefficientModel::unit_modulus;
    throw std::invalid_argument("unknown coefficient model: " + name);
}

std::string to_string(CoefficientModel m) {
    return m == CoefficientModel::gaussian ? "gaussian" : "unit_modulus";
}

Eigen::VectorXcd PointContext::lmmse_apply(const Eigen::VectorXcd& x) const {
    const Eigen::Index MN = stats.block_size();
    Eigen::VectorXcd s(M.rows());
    Eigen::Index r = 0;
    for (int i = 0; i < stats.tones(); ++i) {
        s.segment(r, gamma[i].rows()).noalias() = gamma[i] * x.segment(i * MN, MN);
        r += gamma[i].rows();
    }
    return s;
}

LinearOperator task_operator(const SteeringDictionary& dict, const CompressionMatrix& M) {
    LinearOperator op;
    op.rows = M.rows();
    op.cols = dict.cols();
    op.forward = [&dict, &M](const Eigen::VectorXcd& a) -> Eigen::VectorXcd {
        return M.apply_task(dict.permutation().apply(dict.apply(a)));
    };
    op.adjoint = [&dict, &M](const Eigen::VectorXcd& s) -> Eigen::VectorXcd {
        return dict.apply_adjoint(dict.permutation().apply_inverse(M.apply_task_adjoint(s)));
    };
    return op;
}

LinearOperator dictionary_operator(const SteeringDictionary& dict) {
    LinearOperator op;
    op.rows = dict.rows();
    op.cols = dict.cols();
    op.forward = [&dict](const Eigen::VectorXcd& a) -> Eigen::VectorXcd { return dict.apply(a); };
    op.adjoint = [&dict](const Eigen::VectorXcd& c) -> Eigen::VectorXcd { return dict.apply_adjoint(c); };
    return op;
}

Eigen::VectorXcd synthesize(const SteeringDictionary& dict, const Eigen::VectorXcd& a) {
    if (!dict.has_dense()) return dict.apply(a);
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(dict.rows());
    for (Eigen::Index k = 0; k < a.size(); ++k)
        if (a[k] != cplx(0.0, 0.0)) c += a[k] * dict.phi().col(k);
    return c;
}

TrialInput draw_trial_input(Rng& rng, const PointContext& ctx) {
    const RadarConfig& cfg = ctx.config();
    TrialInput in;
    in.scene = sample_scene(rng, ctx.K, cfg, ctx.coeff);
    in.a = scene_to_sparse_vector(in.scene, cfg);
    in.c = ctx.dict->permutation().apply(synthesize(*ctx.dict, in.a));
    const double sn2 = ctx.stats.noise[0](0, 0).real();
    in.w.resize(cfg.samples());
    for (Eigen::Index k = 0; k < in.w.size(); ++k) in.w[k] = complex_normal(rng, sn2);
    return in;
}

namespace {

// Recovery + metrics shared by all methods.
TrialMetrics finish(const PointContext& ctx, const TrialInput& in, const LinearOperator& A, double lipschitz,
                    const Eigen::VectorXcd& meas, const Eigen::VectorXcd& s_hat) {
    TrialMetrics m;
    const Eigen::VectorXcd s = ctx.M.apply_task(in.c);
    m.err_s = (s - s_hat).squaredNorm();
    m.mse_s = relative_mse(s, s_hat);

    RecoverySpec spec = ctx.recovery;
    spec.lipschitz = lipschitz;
    const FistaResult fr = fista(A, meas, spec);
    Eigen::VectorXcd a_hat = fr.x;
    if (spec.debias) a_hat = debias(A, meas, largest_entries(a_hat, in.scene.size()));
    m.iterations = fr.iterations;
    m.err_a = (in.a - a_hat).squaredNorm();
    m.mse_a = relative_mse(in.a, a_hat);
    m.hit = hit_rate(in.scene, estimate_support(a_hat, in.scene.size(), ctx.config()));
    m.ok = true;
    return m;
}

}  // namespace

TrialMetrics run_bilimo_trial(const PointContext& ctx, const TrialInput& in, Rng& rng) {
    if (!ctx.design) throw std::logic_error("bilimo trial without a design");
    const AcquisitionDesign& d = *ctx.design;
    const Eigen::VectorXcd y = d.analog(in.c + in.w);
    QuantizeStats qs;
    const Eigen::VectorXcd z = quantize_complex_vector(y, {d.levels, d.support, ctx.dither}, rng, &qs);
    const Eigen::VectorXcd s_hat = d.digital(z);
    TrialMetrics m = finish(ctx, in, ctx.task_op, ctx.lipschitz_task, s_hat, s_hat);
    m.saturated = qs.saturated;
    m.quantized = qs.samples;
    return m;
}

TrialMetrics run_task_ignorant_trial(const PointContext& ctx, const TrialInput& in, Rng& rng) {
    const RadarConfig& cfg = ctx.config();
    const int b = levels_from_budget(ctx.budget_bits, cfg.virtual_elements(), cfg.L);
    const double var = ctx.K * cfg.sigma_alpha2 + ctx.stats.noise[0](0, 0).real();
    const double gamma = cfg.eta * std::sqrt(var);
    QuantizeStats qs;
    const Eigen::VectorXcd z = quantize_complex_vector(in.c + in.w, {b, gamma, ctx.dither}, rng, &qs);
    const Eigen::VectorXcd ct = ctx.dict->permutation().apply_inverse(z);
    TrialMetrics m = finish(ctx, in, ctx.phi_op, ctx.lipschitz_phi, ct, ctx.lmmse_apply(z));
    m.saturated = qs.saturated;
    m.quantized = qs.samples;
    return m;
}

TrialMetrics run_noquan_dr_trial(const PointContext& ctx, const TrialInput& in) {
    const Eigen::VectorXcd x = in.c + in.w;
    return finish(ctx, in, ctx.phi_op, ctx.lipschitz_phi, ctx.dict->permutation().apply_inverse(x),
                  ctx.lmmse_apply(x));
}

TrialMetrics run_noquan_lmmse_trial(const PointContext& ctx, const TrialInput& in) {
    const Eigen::VectorXcd s_tilde = ctx.lmmse_apply(in.c + in.w);
    return finish(ctx, in, ctx.task_op, ctx.lipschitz_task, s_tilde, s_tilde);
}

void ExperimentSpec::validate() const {
    config.validate();
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (budget_bits.empty() || snr_db.empty() || dcr.empty() || k.empty() || kinds.empty() || methods.empty())
        throw std::invalid_argument("every sweep axis needs at least one value");
    for (int K : k)
        if (K < 1 || K > config.grid_size()) throw std::invalid_argument("K must lie in [1, grid size]");
    recovery.validate();
    const long MNL = long(config.samples());
    for (Method m : methods)
        if (m == Method::task_ignorant)
            for (long bb : budget_bits)
                if (bb < 2 * MNL) throw std::invalid_argument("task-ignorant budget is below one bit per real sample");
}

std::uint64_t trial_seed(std::uint64_t master, double snr_db, int K, int trial) {
    return mix_seed(mix_seed(master, std::bit_cast<std::uint64_t>(snr_db), std::uint64_t(K)), std::uint64_t(trial));
}

std::uint64_t matrix_seed(std::uint64_t master, double dcr, CompressionKind kind) {
    return mix_seed(master, std::bit_cast<std::uint64_t>(dcr), 0x4d00ULL + std::uint64_t(kind));
}

std::pair<double, double> mean_and_se(const std::vector<double>& v) {
    if (v.empty()) return {std::nan(""), std::nan("")};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / double(v.size() - 1) / double(v.size()))};
}

namespace {

bool uses_task_operator(const std::vector<Method>& methods) {
    for (Method m : methods)
        if (m == Method::bilimo || m == Method::noquan_lmmse) return true;
    return false;
}

bool uses_phi_operator(const std::vector<Method>& methods) {
    for (Method m : methods)
        if (m == Method::task_ignorant || m == Method::noquan_dr) return true;
    return false;
}

}  // namespace

ExperimentResult run_sweep(const ExperimentSpec& spec) {
    spec.validate();
    const SteeringDictionary dict(spec.config);
    const LinearOperator phi_op = dictionary_operator(dict);
    const double lip_phi = uses_phi_operator(spec.methods) ? lipschitz_constant(phi_op) : 0.0;
    const int nm = int(spec.methods.size());

    ExperimentResult result;
    for (CompressionKind kind : spec.kinds)
        for (double dcr : spec.dcr) {
            Rng mrng(matrix_seed(spec.seed, dcr, kind));
            const CompressionMatrix M = build_compression_matrix(mrng, spec.config, dcr, kind);
            const int P = analog_channels(M.rows(), spec.config.L);
            double lip_task = 0.0;
            if (uses_task_operator(spec.methods)) lip_task = lipschitz_constant(task_operator(dict, M));

            for (long budget : spec.budget_bits)
                for (double snr : spec.snr_db)
                    for (int K : spec.k) {
                        const auto t0 = std::chrono::steady_clock::now();
                        RadarConfig cfg = spec.config;
                        cfg.sigma_n2 = snr_to_noise_variance(db_to_linear(snr), cfg, K);

                        PointContext ctx;
                        ctx.dict = &dict;
                        ctx.M = M;
                        ctx.stats = build_covariances(cfg, K);
                        ctx.gamma = lmmse_blocks(ctx.M, ctx.stats);
                        ctx.recovery = spec.recovery;
                        ctx.task_op = task_operator(dict, ctx.M);
                        ctx.phi_op = phi_op;
                        ctx.lipschitz_task = lip_task;
                        ctx.lipschitz_phi = lip_phi;
                        ctx.budget_bits = budget;
                        ctx.K = K;
                        ctx.dither = spec.dither;
                        ctx.coeff = spec.coeff;
                        int b = 0;
                        for (Method m : spec.methods)
                            if (m == Method::bilimo) {
                                b = levels_from_budget(budget, P, cfg.L);
                                ctx.design = design_multitone(ctx.stats, ctx.M, P, b, cfg.eta);
                            }
                        const double eps_l = lmmse_error(ctx.M, ctx.stats);

                        std::vector<std::vector<TrialMetrics>> metrics(nm, std::vector<TrialMetrics>(spec.trials));
#pragma omp parallel for schedule(dynamic)
                        for (int t = 0; t < spec.trials; ++t) {
                            const std::uint64_t seed = trial_seed(spec.seed, snr, K, t);
                            TrialInput in;
                            try {
                                Rng rng(seed);
                                in = draw_trial_input(rng, ctx);
                            } catch (const std::exception& e) {
                                for (int mi = 0; mi < nm; ++mi) metrics[mi][t].error = e.what();
                                continue;
                            }
                            for (int mi = 0; mi < nm; ++mi) {
                                Rng qrng(mix_seed(seed, 0x5100ULL + std::uint64_t(spec.methods[mi])));
                                try {
                                    switch (spec.methods[mi]) {
                                        case Method::bilimo: metrics[mi][t] = run_bilimo_trial(ctx, in, qrng); break;
                                        case Method::task_ignorant:
                                            metrics[mi][t] = run_task_ignorant_trial(ctx, in, qrng);
                                            break;
                                        case Method::noquan_dr: metrics[mi][t] = run_noquan_dr_trial(ctx, in); break;
                                        case Method::noquan_lmmse:
                                            metrics[mi][t] = run_noquan_lmmse_trial(ctx, in);
                                            break;
                                    }
                                } catch (const std::exception& e) {
                                    metrics[mi][t] = TrialMetrics{};
                                    metrics[mi][t].error = e.what();
                                }
                            }
                        }
                        const double wall =
                            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

                        for (int mi = 0; mi < nm; ++mi) {
                            PointResult r;
                            r.method = spec.methods[mi];
                            r.budget_bits = budget;
                            r.snr_db = snr;
                            r.dcr = dcr;
                            r.k = K;
                            r.kind = kind;
                            r.eps_lmmse = eps_l;
                            if (r.method == Method::bilimo) {
                                r.eps_emse = ctx.design->emse;
                                r.levels = b;
                                r.support = ctx.design->support;
                            } else if (r.method == Method::task_ignorant) {
                                r.levels = levels_from_budget(budget, cfg.virtual_elements(), cfg.L);
                                r.support = cfg.eta * std::sqrt(K * cfg.sigma_alpha2 + cfg.sigma_n2);
                            }
                            r.J = M.rows();
                            r.channels = P;
                            r.rho_scale = spec.recovery.rho_scale;
                            r.wall_ms = wall;
                            std::vector<double> ms, ma, hr;
                            double es = 0.0;
                            std::uint64_t sat = 0, tot = 0;
                            for (int t = 0; t < spec.trials; ++t) {
                                const TrialMetrics& tm = metrics[mi][t];
                                if (!tm.ok) {
                                    ++r.failed;
                                    std::clog << "bilimo: " << to_string(r.method) << " trial " << t
                                              << " failed: " << tm.error << "\n";
                                    continue;
                                }
                                ms.push_back(tm.mse_s);
                                ma.push_back(tm.mse_a);
                                hr.push_back(tm.hit);
                                es += tm.err_s;
                                sat += tm.saturated;
                                tot += tm.quantized;
                            }
                            r.trials = int(ms.size());
                            std::tie(r.mse_s_mean, r.mse_s_se) = mean_and_se(ms);
                            std::tie(r.mse_a_mean, r.mse_a_se) = mean_and_se(ma);
                            std::tie(r.hit_rate_mean, r.hit_rate_se) = mean_and_se(hr);
                            r.err_s_mean = r.trials ? es / r.trials : std::nan("");
                            r.saturation_rate = tot ? double(sat) / double(tot) : 0.0;
                            result.rows.push_back(r);
                            result.per_trial.push_back(std::move(metrics[mi]));
                        }
                    }
        }
    return result;
}

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

void write_csv(const ExperimentResult& result, std::ostream& os, bool wall_time) {
    os << "method,budget_bits,snr_db,dcr,k,matrix_kind,mse_s_mean,mse_s_se,mse_a_mean,mse_a_se,hit_rate_mean,"
          "hit_rate_se,eps_lmmse,eps_emse,saturation_rate,trials,wall_ms\n";
    for (const PointResult& r : result.rows) {
        os << to_string(r.method) << ',' << r.budget_bits << ',' << num(r.snr_db) << ',' << num(r.dcr) << ','
           << r.k << ',' << to_string(r.kind) << ',' << num(r.mse_s_mean) << ',' << num(r.mse_s_se) << ','
           << num(r.mse_a_mean) << ',' << num(r.mse_a_se) << ',' << num(r.hit_rate_mean) << ','
           << num(r.hit_rate_se) << ',' << num(r.eps_lmmse) << ',' << (r.eps_emse ? num(*r.eps_emse) : "NA")
           << ',' << num(r.saturation_rate) << ',' << r.trials << ',' << (wall_time ? num(r.wall_ms) : "NA")
           << '\n';
    }
}

void write_csv_file(const ExperimentResult& result, const std::string& path, bool wall_time) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_csv(result, out, wall_time);
}

void write_sidecar(const ExperimentSpec& spec, const ExperimentResult& result, const std::string& path) {
    using nlohmann::json;
    json j;
    j["library_version"] = library_version;
    j["convention"] = convention_tag;
    j["seed"] = spec.seed;
    j["eta"] = spec.config.eta;
    j["config_hash"] = hex64(config_hash(spec.config));
    j["config"] = json::parse(config_to_json_text(spec.config));
    j["trials_requested"] = spec.trials;
    j["rho_rule"] = spec.recovery.rho >= 0.0 ? "fixed" : "rho_scale * max|A^H s_hat|";
    j["rho"] = spec.recovery.rho;
    j["rho_scale"] = spec.recovery.rho_scale;
    j["fista_max_iter"] = spec.recovery.max_iter;
    j["fista_tol"] = spec.recovery.tol;
    j["debias"] = spec.recovery.debias;
    j["coefficient_model"] = to_string(spec.coeff);
    j["dither"] = spec.dither;
    j["trial_seed_rule"] = "mix(mix(seed, snr_db bits, K), trial)";
    j["timestamp_utc"] = [] {
        const std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        return std::string(buf);
    }();
    for (const PointResult& r : result.rows) {
        j["points"].push_back({{"method", to_string(r.method)},
                               {"budget_bits", r.budget_bits},
                               {"snr_db", r.snr_db},
                               {"dcr", r.dcr},
                               {"k", r.k},
                               {"matrix_kind", to_string(r.kind)},
                               {"J", r.J},
                               {"channels", r.channels},
                               {"levels", r.levels},
                               {"support", r.support},
                               {"trials", r.trials},
                               {"failed", r.failed},
                               {"wall_ms", r.wall_ms}});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace bilimo
