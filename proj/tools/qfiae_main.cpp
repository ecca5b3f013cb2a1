#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfiae/artifacts.hpp"
#include "qfiae/pipeline.hpp"

namespace {

using qfiae::pipeline::RunConfig;

void add_common_options(CLI::App* cmd, RunConfig& cfg, std::vector<double>& masses,
                        std::vector<double>& mass_override) {
    cmd->add_option("--process", cfg.process, "process name from the registry")
        ->capture_default_str();
    cmd->add_option("--mass-ratio", masses, "final-state mass ratio 2m/sqrt(s); repeatable");
    cmd->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
    cmd->add_option("--shots", cfg.iqae.shots, "IQAE shots per round")->capture_default_str();
    cmd->add_option("--epsilon", cfg.iqae.epsilon, "IQAE target half-width")
        ->capture_default_str();
    cmd->add_option("--alpha", cfg.iqae.alpha, "IQAE confidence complement")
        ->capture_default_str();
    cmd->add_option("--layers", cfg.ansatz.n_layers, "QNN layers")->capture_default_str();
    cmd->add_option("--n-fourier", cfg.n_fourier, "Fourier truncation")->capture_default_str();
    cmd->add_option("--steps", cfg.train.max_steps, "Adam iterations")->capture_default_str();
    cmd->add_option("--step-size", cfg.train.step_size, "Adam learning rate")
        ->capture_default_str();
    cmd->add_option("--restarts", cfg.train.restarts, "training restarts")
        ->capture_default_str();
    cmd->add_option("--dataset-grid", cfg.dataset_n1, "training grid points per dimension")
        ->capture_default_str();
    cmd->add_option("--grid-bits", cfg.grid_bits, "IQAE grid qubits per dimension (two values)")
        ->expected(2);
    cmd->add_option("--coupling", cfg.coupling, "overall coupling factor")
        ->capture_default_str();
    cmd->add_option("--masses", mass_override,
                    "override m1..m5 (m6 stays sqrt(s)); five values")
        ->expected(5);
    cmd->add_option("--quad-order", cfg.quad_order, "oracle Gauss-Legendre order")
        ->capture_default_str();
    cmd->add_option("--quad-panels", cfg.quad_panels, "oracle panel count")
        ->capture_default_str();
    cmd->add_option("--cache-dir", cfg.cache_dir, "model artifact cache directory")
        ->capture_default_str();
    cmd->add_flag("--reuse-model,!--no-reuse-model", cfg.reuse_artifacts,
                  "reuse cached model artifacts when present");
    auto* exact = cmd->add_flag("--exact", "exact-expectation IQAE (default)");
    auto* sampled = cmd->add_flag("--sampled", "shot-based IQAE");
    exact->excludes(sampled);
    cmd->add_option("--out", cfg.out_path, "output path (CSV for scan, JSON artifact for fit)");
    cmd->parse_complete_callback([&cfg, sampled]() {
        if (sampled->count() > 0) cfg.exact_mode = false;
    });
}

void finalize(RunConfig& cfg, std::vector<double>& masses, std::vector<double>& mass_override) {
    if (!masses.empty()) cfg.mass_scan = masses;
    if (!mass_override.empty()) {
        std::array<double, 5> m{};
        for (int i = 0; i < 5; ++i) m[static_cast<std::size_t>(i)] = mass_override[static_cast<std::size_t>(i)];
        cfg.mass_override = m;
    }
    cfg.dataset_n2 = cfg.dataset_n1;
}

int run_fit(const RunConfig& cfg) {
    for (double mass : cfg.mass_scan) {
        const auto fit = qfiae::pipeline::cmd_fit(cfg, mass);
        std::cout << "fit " << cfg.process << " mass_ratio=" << mass
                  << " final_mse=" << fit.final_mse
                  << (fit.reused_artifact ? " (reused artifact)" : "") << "\n";
        if (!fit.artifact_path.empty()) {
            std::cout << "  model artifact: " << fit.artifact_path << "\n";
        }
        if (!cfg.out_path.empty()) {
            qfiae::artifacts::TrainingMeta meta;
            meta.seed = cfg.seed;
            meta.final_mse = fit.final_mse;
            meta.steps = cfg.train.max_steps;
            meta.restarts = cfg.train.restarts;
            qfiae::artifacts::save_model(fit.model, meta, cfg.out_path);
            std::cout << "  wrote " << cfg.out_path << "\n";
        }
    }
    return 0;
}

int run_integrate(const RunConfig& cfg, const std::string& model_path) {
    for (double mass : cfg.mass_scan) {
        qfiae::vqc::QnnModel model;
        double mse = 0.0;
        if (!model_path.empty()) {
            qfiae::artifacts::TrainingMeta meta;
            model = qfiae::artifacts::load_model(model_path, &meta);
            mse = meta.final_mse;
        } else {
            const auto fit = qfiae::pipeline::cmd_fit(cfg, mass);
            model = fit.model;
            mse = fit.final_mse;
        }
        const auto outcome = qfiae::pipeline::cmd_integrate(cfg, model, mass, mse);
        std::cout << qfiae::pipeline::csv_header() << "\n"
                  << qfiae::pipeline::csv_line(outcome.row) << "\n";
        std::cout << "result: "
                  << qfiae::pipeline::format_with_uncertainty(outcome.row.estimate,
                                                              outcome.row.half_width)
                  << "  (out-of-band power " << outcome.out_of_band_power << ")\n";
        std::cout << "per-term report (w1 w2 amplitude phase a_hat ci_lo ci_hi queries rounds "
                     "sinc skipped):\n";
        for (const auto& t : outcome.report.terms) {
            if (t.skipped && t.amplitude == 0.0) continue;
            std::cout << "  " << t.w1 << " " << t.w2 << " " << t.amplitude << " " << t.phase
                      << " " << t.a_hat << " " << t.ci_lo << " " << t.ci_hi << " " << t.queries
                      << " " << t.rounds << " " << t.sinc_factor << " "
                      << (t.skipped ? 1 : 0) << "\n";
        }
    }
    return 0;
}

int run_oracle(const RunConfig& cfg) {
    bool any_flagged = false;
    std::cout << qfiae::pipeline::csv_header() << "\n";
    for (double mass : cfg.mass_scan) {
        const auto row = qfiae::pipeline::cmd_oracle(cfg, mass);
        any_flagged = any_flagged || row.flagged;
        std::cout << qfiae::pipeline::csv_line(row) << "\n";
    }
    return any_flagged ? 1 : 0;
}

int run_scan(const RunConfig& cfg) {
    const auto outcome = qfiae::pipeline::cmd_scan(cfg, &std::cout);
    std::cout << "\n" << outcome.csv;
    if (!cfg.out_path.empty()) std::cout << "wrote " << cfg.out_path << "\n";
    bool any_flagged = false;
    for (const auto& row : outcome.rows) any_flagged = any_flagged || row.flagged;
    return any_flagged ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"QFIAE: quantum Fourier amplitude-estimation integration of LTD decay rates"};
    app.set_config("--config", "", "key = value configuration file");
    app.require_subcommand(1);

    RunConfig cfg;
    std::vector<double> masses, mass_override;
    std::string model_path;

    auto* fit = app.add_subcommand("fit", "train the QNN surrogate of the integrand");
    add_common_options(fit, cfg, masses, mass_override);

    auto* integrate =
        app.add_subcommand("integrate", "extract the Fourier series and integrate it with IQAE");
    add_common_options(integrate, cfg, masses, mass_override);
    integrate->add_option("--model", model_path, "existing model artifact to integrate");

    auto* oracle = app.add_subcommand("oracle", "classical Gauss-Legendre reference value");
    add_common_options(oracle, cfg, masses, mass_override);

    auto* scan = app.add_subcommand("scan", "oracle + qfiae rows over the mass scan");
    add_common_options(scan, cfg, masses, mass_override);

    auto* selftest = app.add_subcommand("selftest", "fast invariant checks of every module");

    CLI11_PARSE(app, argc, argv);

    try {
        finalize(cfg, masses, mass_override);
        if (fit->parsed()) return run_fit(cfg);
        if (integrate->parsed()) return run_integrate(cfg, model_path);
        if (oracle->parsed()) return run_oracle(cfg);
        if (scan->parsed()) return run_scan(cfg);
        if (selftest->parsed()) return qfiae::pipeline::cmd_selftest(std::cout) ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
