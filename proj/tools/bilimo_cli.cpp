// bilimo: design / simulate / sweep front end.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bilimo/combiner.hpp"
#include "bilimo/harness.hpp"
#include "bilimo/io.hpp"

namespace {

struct Common {
    std::string config_path;
    std::uint64_t seed = 1;
    int trials = 100;
    double eta = -1.0;
    double rho_scale = 0.05;
    int max_iter = 300;
    double tol = 1e-5;
    std::string coeff = "gaussian";
    std::vector<std::string> methods{"bilimo", "task_ignorant", "noquan_dr", "noquan_lmmse"};
    std::vector<std::string> kinds{"gaussian"};
    std::vector<long> budgets{1728};
    std::vector<double> snrs{10.0};
    std::vector<double> dcrs{2.0};
    std::vector<int> ks{4};
    std::string out;
    bool wall_time = false;
    bool no_dither = false;
};

void add_common(CLI::App* app, Common& c, bool lists) {
    app->add_option("--config", c.config_path, "radar config JSON (default: 8x12 random array, L = 9)");
    app->add_option("--seed", c.seed, "master seed");
    app->add_option("--eta", c.eta, "support multiplier (overrides config)");
    app->add_option("--matrix-kind", c.kinds, "gaussian | bernoulli | dft")->delimiter(',');
    app->add_option("--budget-bits", c.budgets, "bit budget per PRI")->delimiter(',');
    app->add_option("--snr-db", c.snrs, "SNR in dB")->delimiter(',');
    app->add_option("--dcr", c.dcrs, "compression ratio MNL / J")->delimiter(',');
    app->add_option("--k", c.ks, "number of targets")->delimiter(',');
    if (!lists) {
        for (auto* name : {"--matrix-kind", "--budget-bits", "--snr-db", "--dcr", "--k"})
            app->get_option(name)->expected(1);
    }
}

bilimo::RadarConfig load(const Common& c) {
    bilimo::RadarConfig cfg =
        c.config_path.empty() ? bilimo::default_config(c.seed) : bilimo::load_config(c.config_path, c.seed);
    if (c.eta > 0.0) cfg.eta = c.eta;
    return cfg;
}

bilimo::ExperimentSpec make_spec(const Common& c) {
    bilimo::ExperimentSpec spec;
    spec.config = load(c);
    spec.budget_bits = c.budgets;
    spec.snr_db = c.snrs;
    spec.dcr = c.dcrs;
    spec.k = c.ks;
    spec.kinds.clear();
    for (const auto& k : c.kinds) spec.kinds.push_back(bilimo::parse_compression_kind(k));
    spec.methods.clear();
    for (const auto& m : c.methods) spec.methods.push_back(bilimo::parse_method(m));
    spec.trials = c.trials;
    spec.seed = c.seed;
    spec.recovery.rho_scale = c.rho_scale;
    spec.recovery.max_iter = c.max_iter;
    spec.recovery.tol = c.tol;
    spec.coeff = bilimo::parse_coefficient_model(c.coeff);
    spec.dither = !c.no_dither;
    spec.record_wall_time = c.wall_time;
    return spec;
}

int run_experiment(const Common& c) {
    const bilimo::ExperimentSpec spec = make_spec(c);
    const bilimo::ExperimentResult res = bilimo::run_sweep(spec);
    if (c.out.empty()) {
        bilimo::write_csv(res, std::cout, c.wall_time);
    } else {
        bilimo::write_csv_file(res, c.out, c.wall_time);
        bilimo::write_sidecar(spec, res, c.out + ".json");
        std::cerr << "wrote " << c.out << " (" << res.rows.size() << " rows)\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bit-limited MIMO radar receiver: acquisition design and Monte Carlo experiments"};
    app.require_subcommand(1);

    Common design_opts, sim_opts, sweep_opts;
    std::string design_out = "design.blmo", filter_csv;

    auto* design = app.add_subcommand("design", "compute the acquisition design for one operating point");
    add_common(design, design_opts, false);
    design->add_option("--out", design_out, "design bundle path");
    design->add_option("--filter-csv", filter_csv, "write analog filter responses (all p, n) as CSV");

    for (auto [name, help, opts, lists] :
         {std::tuple{"simulate", "run one sweep point", &sim_opts, false},
          std::tuple{"sweep", "run a full experiment grid", &sweep_opts, true}}) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, *opts, lists);
        sub->add_option("--trials", opts->trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
        sub->add_option("--methods", opts->methods, "bilimo,task_ignorant,noquan_dr,noquan_lmmse")->delimiter(',');
        sub->add_option("--rho-scale", opts->rho_scale, "LASSO weight as a fraction of max|A^H s|");
        sub->add_option("--max-iter", opts->max_iter, "FISTA iteration cap");
        sub->add_option("--tol", opts->tol, "FISTA relative-change tolerance");
        sub->add_option("--coeff-model", opts->coeff, "gaussian | unit_modulus");
        sub->add_option("--out", opts->out, "CSV output path (stdout if omitted)");
        sub->add_flag("--wall-time", opts->wall_time, "fill the wall_ms column (output no longer byte-stable)");
        sub->add_flag("--no-dither", opts->no_dither, "disable quantizer dither");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (design->parsed()) {
            const auto& c = design_opts;
            const bilimo::RadarConfig cfg = load(c);
            const int K = c.ks.at(0);
            bilimo::RadarConfig noisy = cfg;
            noisy.sigma_n2 = bilimo::snr_to_noise_variance(bilimo::db_to_linear(c.snrs.at(0)), cfg, K);
            const auto kind = bilimo::parse_compression_kind(c.kinds.at(0));
            bilimo::Rng mrng(bilimo::matrix_seed(c.seed, c.dcrs.at(0), kind));
            const auto M = bilimo::build_compression_matrix(mrng, noisy, c.dcrs.at(0), kind);
            const int P = bilimo::analog_channels(M.rows(), cfg.L);
            const int b = bilimo::levels_from_budget(c.budgets.at(0), P, cfg.L);
            const auto stats = bilimo::build_covariances(noisy, K);
            const auto d = bilimo::design_multitone(stats, M, P, b, cfg.eta);
            bilimo::export_design(design_out, d, noisy, c.seed);
            if (!filter_csv.empty()) {
                std::vector<bilimo::FilterSample> all;
                for (int p = 0; p < P; ++p)
                    for (int n = 0; n < cfg.N; ++n) {
                        auto r = bilimo::analog_filter_response(d, noisy, p, n);
                        all.insert(all.end(), r.begin(), r.end());
                    }
                bilimo::write_filter_csv(filter_csv, all);
            }
            std::cout << "J=" << M.rows() << " P=" << P << " b=" << b << " gamma=" << d.support
                      << " eps_lmmse=" << d.lmmse << " eps_emse=" << d.emse << " -> " << design_out << "\n";
            return 0;
        }
        if (app.get_subcommand("simulate")->parsed()) return run_experiment(sim_opts);
        return run_experiment(sweep_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
