#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qfiae/fourier.hpp"
#include "qfiae/iqae.hpp"
#include "qfiae/ltd.hpp"
#include "qfiae/quad.hpp"
#include "qfiae/vqc.hpp"

namespace qfiae::pipeline {

struct RunConfig {
    std::string process = "phi";
    std::vector<double> mass_scan{0.0, 0.1, 0.2, 0.3, 0.4};
    double sqrt_s = 1.0;
    double coupling = 1.0;
    std::optional<std::array<double, 5>> mass_override;  // m1..m5 (m6 stays sqrt_s)

    vqc::AnsatzSpec ansatz{};      // 6 qubits, 20 layers
    vqc::TrainConfig train{};      // 15000 steps, 0.001, 3 restarts
    int dataset_n1 = 31;
    int dataset_n2 = 31;

    int n_fourier = 20;
    std::array<int, 2> grid_bits{2, 2};  // + 1 ancilla = 5 qubits
    iqae::IqaeConfig iqae{};             // eps 0.01, alpha 0.05, shots 1000
    bool exact_mode = true;              // exact-expectation vs shot-based IQAE

    std::uint64_t seed = 0;
    bool reuse_artifacts = false;
    std::string cache_dir = "artifacts";
    std::string out_path;

    // oracle settings
    int quad_order = 32;
    int quad_panels = 8;

    void validate() const;
};

struct ScanRow {
    std::string process;
    double mass_ratio = 0.0;
    std::string method;  // "qfiae" or "oracle"
    double estimate = 0.0;
    double half_width = 0.0;
    double mse = 0.0;
    long long queries = 0;
    double seconds = 0.0;
    bool flagged = false;
};

ltd::ProcessSpec process_for(const RunConfig& cfg, double mass_ratio);
vqc::Dataset make_dataset(const RunConfig& cfg, const ltd::ProcessSpec& spec);
std::uint64_t model_cache_key(const RunConfig& cfg, double mass_ratio);

struct FitOutcome {
    vqc::QnnModel model;
    double final_mse = 0.0;
    std::vector<double> loss_history;
    std::string artifact_path;  // empty when not persisted
    bool reused_artifact = false;
};

// Trains the QNN surrogate of the integrand for one mass point (or reloads a
// cached artifact when cfg.reuse_artifacts is set).
FitOutcome cmd_fit(const RunConfig& cfg, double mass_ratio);

// Fit against an arbitrary target on the unit square; cmd_fit delegates here
// with the LTD integrand.
FitOutcome fit_function(const RunConfig& cfg, const std::function<double(double, double)>& target,
                        std::uint64_t train_seed);

struct IntegrateOutcome {
    ScanRow row;
    iqae::SeriesIntegral report;
    fourier::FourierSeries2D series;  // truncated to n_fourier
    double out_of_band_power = 0.0;
};

IntegrateOutcome cmd_integrate(const RunConfig& cfg, const vqc::QnnModel& model,
                               double mass_ratio, double fit_mse);

// Reference quadrature for LTD integrands: tensor Gauss-Legendre with panel
// cuts on the known kinematic lines (three-body support edge, loop-threshold
// corner) and a v = 1 - s^2 substitution that resolves the soft layer at the
// v -> 1 boundary. Integrates f over the unit square.
quad::QuadResult oracle_quadrature(const ltd::ProcessSpec& spec,
                                   const std::function<double(double, double)>& f, int order,
                                   int panels);

ScanRow cmd_oracle(const RunConfig& cfg, double mass_ratio);

struct ScanOutcome {
    std::vector<ScanRow> rows;
    std::string csv;
};

ScanOutcome cmd_scan(const RunConfig& cfg, std::ostream* log = nullptr);

bool cmd_selftest(std::ostream& out);

std::string csv_header();
std::string csv_line(const ScanRow& row);
// Table-1 style parenthesis notation, e.g. 0.0439(15).
std::string format_with_uncertainty(double value, double half_width);

}  // namespace qfiae::pipeline
