#include "qfiae/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qfiae/artifacts.hpp"
#include "qfiae/rng.hpp"

namespace qfiae::pipeline {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::uint64_t mass_seed(const RunConfig& cfg, double mass_ratio) {
    return rng::mix(cfg.seed, std::bit_cast<std::uint64_t>(mass_ratio));
}

// Samples the raw <Z> of the model over the full angle period in one batched
// pass and feeds the DFT through an index lookup.
fourier::FourierSeries2D extract_model_series(const vqc::QnnModel& model, int n_max) {
    const int g = 2 * n_max + 1;
    std::vector<std::array<double, 2>> angles;
    angles.reserve(static_cast<std::size_t>(g) * g);
    for (int j1 = 0; j1 < g; ++j1) {
        for (int j2 = 0; j2 < g; ++j2) {
            angles.push_back({kTwoPi * j1 / g, kTwoPi * j2 / g});
        }
    }
    std::vector<double> z(angles.size());
    vqc::BatchEvaluator eval(model.ansatz);
    eval.forward(model.params, angles, z);

    auto grid_index = [g](double x) {
        auto j = static_cast<long long>(std::llround(x * g / kTwoPi));
        return static_cast<std::size_t>(((j % g) + g) % g);
    };
    return fourier::extract(
        [&](double x1, double x2) {
            return z[grid_index(x1) * static_cast<std::size_t>(g) + grid_index(x2)];
        },
        n_max);
}

}  // namespace

void RunConfig::validate() const {
    ansatz.validate();
    for (double m : mass_scan) {
        if (!(m >= 0.0 && m < 1.0)) {
            throw std::invalid_argument("mass_scan values must be in [0, 1)");
        }
    }
    if (n_fourier < 0) throw std::invalid_argument("n_fourier must be >= 0");
    if (dataset_n1 < 2 || dataset_n2 < 2) {
        throw std::invalid_argument("dataset grid must be at least 2x2");
    }
    if (!(iqae.epsilon > 0.0 && iqae.epsilon < 0.5) || !(iqae.alpha > 0.0 && iqae.alpha < 1.0)) {
        throw std::invalid_argument("invalid IQAE settings");
    }
    if (quad_order < 2 || quad_panels < 1) throw std::invalid_argument("invalid oracle settings");
}

ltd::ProcessSpec process_for(const RunConfig& cfg, double mass_ratio) {
    ltd::ProcessSpec spec = ltd::make_process(cfg.process, mass_ratio, cfg.sqrt_s, cfg.coupling);
    if (cfg.mass_override) {
        for (int i = 0; i < 5; ++i) spec.masses[static_cast<std::size_t>(i)] = (*cfg.mass_override)[static_cast<std::size_t>(i)];
    }
    return spec;
}

vqc::Dataset make_dataset(const RunConfig& cfg, const ltd::ProcessSpec& spec) {
    return vqc::Dataset::grid(
        [&spec](double u1, double u2) { return ltd::integrand_2d(u1, u2, spec); },
        cfg.dataset_n1, cfg.dataset_n2);
}

std::uint64_t model_cache_key(const RunConfig& cfg, double mass_ratio) {
    std::ostringstream os;
    os << cfg.process << '|' << fmt_double(mass_ratio) << '|' << fmt_double(cfg.sqrt_s) << '|'
       << fmt_double(cfg.coupling) << '|' << cfg.ansatz.n_qubits << '|' << cfg.ansatz.n_layers
       << '|' << cfg.ansatz.encodings_per_variable << '|' << cfg.ansatz.measured_qubit << '|'
       << cfg.dataset_n1 << 'x' << cfg.dataset_n2 << '|' << cfg.train.max_steps << '|'
       << fmt_double(cfg.train.step_size) << '|' << cfg.train.restarts << '|' << cfg.seed;
    if (cfg.mass_override) {
        for (double m : *cfg.mass_override) os << '|' << fmt_double(m);
    }
    return artifacts::fnv1a(os.str());
}

FitOutcome fit_function(const RunConfig& cfg, const std::function<double(double, double)>& target,
                        std::uint64_t train_seed) {
    cfg.validate();
    const vqc::Dataset data = vqc::Dataset::grid(target, cfg.dataset_n1, cfg.dataset_n2);

    vqc::QnnModel model;
    model.ansatz = cfg.ansatz;
    model.params = vqc::ParamSet::random(cfg.ansatz, train_seed);
    vqc::prepare_output_scaling(model, data);

    vqc::TrainConfig train_cfg = cfg.train;
    train_cfg.seed = train_seed;
    vqc::TrainResult result = vqc::train(model, data, train_cfg);

    FitOutcome out;
    out.model = std::move(result.model);
    out.final_mse = result.final_loss;
    out.loss_history = std::move(result.loss_history);
    return out;
}

FitOutcome cmd_fit(const RunConfig& cfg, double mass_ratio) {
    cfg.validate();
    const std::uint64_t key = model_cache_key(cfg, mass_ratio);
    std::string path;
    if (!cfg.cache_dir.empty()) {
        char name[64];
        std::snprintf(name, sizeof(name), "model_%016llx.json",
                      static_cast<unsigned long long>(key));
        path = (std::filesystem::path(cfg.cache_dir) / name).string();
    }

    if (cfg.reuse_artifacts && !path.empty() && std::filesystem::exists(path)) {
        artifacts::TrainingMeta meta;
        FitOutcome out;
        out.model = artifacts::load_model(path, &meta);
        out.final_mse = meta.final_mse;
        out.artifact_path = path;
        out.reused_artifact = true;
        return out;
    }

    const ltd::ProcessSpec spec = process_for(cfg, mass_ratio);
    FitOutcome out = fit_function(
        cfg, [&spec](double u1, double u2) { return ltd::integrand_2d(u1, u2, spec); },
        mass_seed(cfg, mass_ratio));

    if (!path.empty()) {
        std::filesystem::create_directories(cfg.cache_dir);
        artifacts::TrainingMeta meta;
        meta.seed = mass_seed(cfg, mass_ratio);
        meta.final_mse = out.final_mse;
        meta.steps = cfg.train.max_steps;
        meta.restarts = cfg.train.restarts;
        artifacts::save_model(out.model, meta, path);
        out.artifact_path = path;
    }
    return out;
}

IntegrateOutcome cmd_integrate(const RunConfig& cfg, const vqc::QnnModel& model,
                               double mass_ratio, double fit_mse) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    // Alias-free extraction at the model's spectrum bound, then a hard
    // truncation to n_fourier; the discarded power is a diagnostic.
    const int bound = model.ansatz.spectrum_bound();
    const fourier::FourierSeries2D full = extract_model_series(model, bound);
    const int n_keep = std::min(cfg.n_fourier, bound);
    fourier::FourierSeries2D series = fourier::truncate(full, n_keep);

    const fourier::Box2 angle_box{0.0, model.input_scale[0], 0.0, model.input_scale[1]};
    iqae::IqaeConfig iqae_cfg = cfg.iqae;
    iqae_cfg.mode = cfg.exact_mode ? iqae::Mode::ExactExpectation : iqae::Mode::ShotBased;
    iqae_cfg.seed = rng::mix(mass_seed(cfg, mass_ratio), 0x51AEu);

    const iqae::SeriesIntegral report =
        iqae::integrate_series(series, angle_box, cfg.grid_bits, iqae_cfg);

    // undo the output scaling and the input-scale change of variables
    const double angle_volume = model.input_scale[0] * model.input_scale[1];
    const double estimate =
        model.output_offset + model.output_scale * report.total / angle_volume;
    const double half_width = std::abs(model.output_scale) * report.half_width / angle_volume;

    IntegrateOutcome out;
    out.series = std::move(series);
    out.out_of_band_power = fourier::band_power_outside(full, n_keep);
    out.report = report;
    out.row.process = cfg.process;
    out.row.mass_ratio = mass_ratio;
    out.row.method = "qfiae";
    out.row.estimate = estimate;
    out.row.half_width = half_width;
    out.row.mse = fit_mse;
    out.row.queries = report.total_queries;
    out.row.flagged = report.any_ill_conditioned || !report.all_converged;
    out.row.seconds = elapsed_seconds(start);
    return out;
}

namespace {

// u1 positions of the non-smooth kinematic lines for one mass assignment:
// the edge of the three-body support (energy exhausted at l2 = 0) and the
// loop-threshold corner l1 = l2*.
void collect_u1_cuts(const ltd::ProcessSpec& spec, std::vector<double>& cuts) {
    const double sq = spec.sqrt_s;
    auto add = [&](double l1) {
        if (!(l1 > 0.0) || !std::isfinite(l1)) return;
        const double u = l1 / (sq + l1);
        if (u > 1e-9 && u < 1.0 - 1e-9) cuts.push_back(u);
    };
    // gate: sqrt(l1^2 + m1^2) + sqrt(l1^2 + m3^2) = sq - m5
    const double rhs = sq - spec.masses[4];
    if (rhs > 0.0) {
        const double m1 = spec.masses[0], m3 = spec.masses[2];
        const double a = (rhs * rhs + m1 * m1 - m3 * m3) / (2.0 * rhs);
        if (a >= m1) add(std::sqrt(std::max(0.0, a * a - m1 * m1)));
    }
    // corner: l1 equal to the two-body root
    try {
        add(ltd::resolve_two_body(spec).l2_star);
    } catch (const std::exception&) {
        // closed two-body channel has no corner
    }
}

}  // namespace

quad::QuadResult oracle_quadrature(const ltd::ProcessSpec& spec,
                                   const std::function<double(double, double)>& f, int order,
                                   int panels) {
    std::vector<double> cuts{0.0, 1.0};
    collect_u1_cuts(spec, cuts);
    ltd::ProcessSpec partner = spec;
    std::swap(partner.masses[1], partner.masses[4]);
    std::swap(partner.masses[2], partner.masses[3]);
    collect_u1_cuts(partner, cuts);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-9; }),
               cuts.end());

    quad::QuadResult total;
    for (std::size_t r = 0; r + 1 < cuts.size(); ++r) {
        const double a = cuts[r], b = cuts[r + 1];
        const auto piece = quad::gauss_2d(
            [&](double t, double s) {
                const double u1 = a + (b - a) * t;
                const double v = 1.0 - s * s;
                if (!(v < 1.0)) return 0.0;
                return (b - a) * 2.0 * s * f(u1, v);
            },
            order, panels);
        total.value += piece.value;
        total.error_estimate += piece.error_estimate;
        total.evaluations += piece.evaluations;
    }
    return total;
}

ScanRow cmd_oracle(const RunConfig& cfg, double mass_ratio) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const ltd::ProcessSpec spec = process_for(cfg, mass_ratio);
    const quad::QuadResult q = oracle_quadrature(
        spec, [&spec](double u1, double u2) { return ltd::integrand_2d(u1, u2, spec); },
        cfg.quad_order, cfg.quad_panels);

    ScanRow row;
    row.process = cfg.process;
    row.mass_ratio = mass_ratio;
    row.method = "oracle";
    row.estimate = q.value;
    row.half_width = q.error_estimate;
    row.queries = 0;
    // refinement change >= 0.1% counts as non-convergence
    row.flagged = q.error_estimate >= 1e-3 * std::max(std::abs(q.value), 1e-300);
    row.seconds = elapsed_seconds(start);
    return row;
}

ScanOutcome cmd_scan(const RunConfig& cfg, std::ostream* log) {
    cfg.validate();
    ScanOutcome out;
    std::ostringstream csv;
    csv << csv_header() << "\n";

    for (double mass : cfg.mass_scan) {
        ScanRow oracle_row;
        try {
            oracle_row = cmd_oracle(cfg, mass);
        } catch (const std::exception& e) {
            oracle_row.process = cfg.process;
            oracle_row.mass_ratio = mass;
            oracle_row.method = "oracle";
            oracle_row.estimate = std::nan("");
            oracle_row.flagged = true;
            if (log) *log << "oracle failed at mass_ratio " << mass << ": " << e.what() << "\n";
        }
        out.rows.push_back(oracle_row);
        csv << csv_line(oracle_row) << "\n";
        if (log) {
            *log << cfg.process << " mass_ratio=" << mass << " oracle: "
                 << format_with_uncertainty(oracle_row.estimate, oracle_row.half_width)
                 << (oracle_row.flagged ? " [flagged]" : "") << "\n";
        }

        ScanRow qfiae_row;
        try {
            const auto fit_start = std::chrono::steady_clock::now();
            const FitOutcome fit = cmd_fit(cfg, mass);
            const double fit_seconds = elapsed_seconds(fit_start);
            IntegrateOutcome integ = cmd_integrate(cfg, fit.model, mass, fit.final_mse);
            qfiae_row = integ.row;
            qfiae_row.seconds += fit_seconds;
            if (log) {
                *log << cfg.process << " mass_ratio=" << mass << " qfiae:  "
                     << format_with_uncertainty(qfiae_row.estimate, qfiae_row.half_width)
                     << " (mse " << fit.final_mse << ", oob power " << integ.out_of_band_power
                     << ", queries " << qfiae_row.queries << ")"
                     << (qfiae_row.flagged ? " [flagged]" : "") << "\n";
            }
        } catch (const std::exception& e) {
            qfiae_row.process = cfg.process;
            qfiae_row.mass_ratio = mass;
            qfiae_row.method = "qfiae";
            qfiae_row.estimate = std::nan("");
            qfiae_row.flagged = true;
            if (log) *log << "qfiae failed at mass_ratio " << mass << ": " << e.what() << "\n";
        }
        out.rows.push_back(qfiae_row);
        csv << csv_line(qfiae_row) << "\n";
    }

    out.csv = csv.str();
    if (!cfg.out_path.empty()) {
        std::ofstream f(cfg.out_path);
        if (!f) throw std::runtime_error("cannot write results file: " + cfg.out_path);
        f << out.csv;
    }
    return out;
}

std::string csv_header() {
    return "process,mass_ratio,method,estimate,half_width,mse,queries,seconds";
}

std::string csv_line(const ScanRow& row) {
    std::ostringstream os;
    char sec[32];
    std::snprintf(sec, sizeof(sec), "%.3f", row.seconds);
    os << row.process << ',' << fmt_double(row.mass_ratio) << ',' << row.method << ','
       << fmt_double(row.estimate) << ',' << fmt_double(row.half_width) << ','
       << fmt_double(row.mse) << ',' << row.queries << ',' << sec;
    return os.str();
}

std::string format_with_uncertainty(double value, double half_width) {
    char buf[96];
    if (!std::isfinite(value)) return "nan";
    if (!(half_width > 0.0)) {
        std::snprintf(buf, sizeof(buf), "%.6g", value);
        return buf;
    }
    int decimals = static_cast<int>(-std::floor(std::log10(half_width))) + 1;
    decimals = std::max(0, std::min(decimals, 17));
    const double scale = std::pow(10.0, decimals);
    const auto paren = static_cast<long long>(std::llround(half_width * scale));
    std::snprintf(buf, sizeof(buf), "%.*f(%lld)", decimals, value, paren);
    return buf;
}

}  // namespace qfiae::pipeline
