#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "qfiae/artifacts.hpp"
#include "qfiae/fourier.hpp"
#include "qfiae/pipeline.hpp"
#include "qfiae/rng.hpp"

using namespace qfiae;
using namespace qfiae::pipeline;

namespace {

// small, fast configuration for pipeline mechanics
RunConfig test_config() {
    RunConfig cfg;
    cfg.ansatz.n_qubits = 4;
    cfg.ansatz.n_layers = 3;
    cfg.ansatz.encodings_per_variable = 2;
    cfg.train.max_steps = 250;
    cfg.train.step_size = 0.02;
    cfg.train.restarts = 1;
    cfg.dataset_n1 = 9;
    cfg.dataset_n2 = 9;
    cfg.n_fourier = 12;
    cfg.quad_order = 24;
    cfg.quad_panels = 6;
    cfg.cache_dir.clear();
    return cfg;
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> lines;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

// drop the wall-time column (the one run-dependent field)
std::string strip_seconds(const std::string& line) {
    const auto pos = line.rfind(',');
    return line.substr(0, pos);
}

}  // namespace

TEST_CASE("fitting a constant target reaches near-zero loss") {
    auto cfg = test_config();
    const auto fit = fit_function(cfg, [](double, double) { return 0.37; }, 7);
    CHECK(fit.final_mse <= 1e-8);
    CHECK(fit.model.output_offset == doctest::Approx(0.37));
}

TEST_CASE("integrating an exactly constant model gives the constant with zero width") {
    auto cfg = test_config();
    vqc::QnnModel model;
    model.ansatz = cfg.ansatz;
    model.params = vqc::ParamSet::random(cfg.ansatz, 9);
    model.output_scale = 0.0;  // forward is identically the offset
    model.output_offset = 0.5;
    const auto out = cmd_integrate(cfg, model, 0.1, 0.0);
    CHECK(out.row.estimate == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out.row.half_width == doctest::Approx(0.0));
    CHECK_FALSE(out.row.flagged);
}

TEST_CASE("integrating a band-limited model matches its analytic integral") {
    auto cfg = test_config();
    vqc::QnnModel model;
    model.ansatz = cfg.ansatz;
    model.ansatz.n_layers = 2;
    model.params = vqc::ParamSet::random(model.ansatz, 33);
    model.output_scale = 0.8;
    model.output_offset = 0.05;
    cfg.n_fourier = model.ansatz.spectrum_bound();  // no truncation loss

    const auto out = cmd_integrate(cfg, model, 0.1, 0.0);
    const auto series = fourier::extract(
        [&](double x1, double x2) {
            return (vqc::forward_angles(model, {x1, x2}) - model.output_offset) /
                   model.output_scale;
        },
        model.ansatz.spectrum_bound());
    const double expected =
        model.output_offset +
        model.output_scale * fourier::analytic_integral(series, {0.0, 1.0, 0.0, 1.0});
    CHECK(out.row.estimate == doctest::Approx(expected).epsilon(1e-8));
    CHECK(out.out_of_band_power < 1e-16);
}

TEST_CASE("oracle handles the nearly-closed two-body-only region") {
    auto cfg = test_config();
    const auto row = cmd_oracle(cfg, 0.49);
    CHECK(std::isfinite(row.estimate));
    CHECK(row.method == "oracle");
}

TEST_CASE("oracle converges for scan masses") {
    auto cfg = test_config();
    cfg.quad_order = 32;
    cfg.quad_panels = 8;
    const auto row = cmd_oracle(cfg, 0.4);
    CHECK_FALSE(row.flagged);
    CHECK(row.half_width < 1e-3 * std::abs(row.estimate));
}

TEST_CASE("invalid process name is rejected") {
    auto cfg = test_config();
    cfg.process = "no-such-process";
    CHECK_THROWS_AS(cmd_oracle(cfg, 0.2), std::invalid_argument);
}

TEST_CASE("scan emits oracle and qfiae rows per mass point") {
    auto cfg = test_config();
    cfg.mass_scan = {0.2, 0.4};
    const auto outcome = cmd_scan(cfg);
    REQUIRE(outcome.rows.size() == 4);
    CHECK(outcome.rows[0].method == "oracle");
    CHECK(outcome.rows[1].method == "qfiae");
    CHECK(outcome.rows[2].method == "oracle");
    CHECK(outcome.rows[3].method == "qfiae");
    for (const auto& row : outcome.rows) {
        CHECK(row.half_width >= 0.0);
        CHECK(std::isfinite(row.estimate));
    }

    const auto lines = split_csv(outcome.csv);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == csv_header());
    CHECK(lines[0] == "process,mass_ratio,method,estimate,half_width,mse,queries,seconds");
}

TEST_CASE("scan output is deterministic apart from wall time") {
    auto cfg = test_config();
    cfg.mass_scan = {0.3};
    cfg.exact_mode = false;  // shot mode is the stochastic path worth pinning
    cfg.iqae.shots = 200;
    cfg.n_fourier = 4;
    cfg.seed = 123;
    const auto a = cmd_scan(cfg);
    const auto b = cmd_scan(cfg);
    const auto la = split_csv(a.csv);
    const auto lb = split_csv(b.csv);
    REQUIRE(la.size() == lb.size());
    for (std::size_t i = 0; i < la.size(); ++i) {
        CHECK(strip_seconds(la[i]) == strip_seconds(lb[i]));
    }
    // shot-mode qfiae rows consume oracle queries
    CHECK(a.rows[1].queries > 0);
}

TEST_CASE("model artifacts cache and reload identically") {
    auto cfg = test_config();
    cfg.cache_dir = (std::filesystem::temp_directory_path() / "qfiae_cache_test").string();
    std::filesystem::remove_all(cfg.cache_dir);
    cfg.train.max_steps = 60;

    const auto first = cmd_fit(cfg, 0.3);
    CHECK_FALSE(first.reused_artifact);
    REQUIRE(!first.artifact_path.empty());
    CHECK(std::filesystem::exists(first.artifact_path));

    cfg.reuse_artifacts = true;
    const auto second = cmd_fit(cfg, 0.3);
    CHECK(second.reused_artifact);
    CHECK(second.model.params.angles == first.model.params.angles);
    CHECK(second.final_mse == doctest::Approx(first.final_mse));
    std::filesystem::remove_all(cfg.cache_dir);
}

TEST_CASE("rerunning fit with the same seed yields an identical artifact") {
    auto cfg = test_config();
    cfg.train.max_steps = 60;
    const auto a = cmd_fit(cfg, 0.2);
    const auto b = cmd_fit(cfg, 0.2);
    CHECK(a.model.params.angles == b.model.params.angles);
    CHECK(a.final_mse == b.final_mse);
}

TEST_CASE("selftest passes on a pristine build") {
    std::ostringstream out;
    CHECK(cmd_selftest(out));
    CHECK(out.str().find("[FAIL]") == std::string::npos);
}

TEST_CASE("parenthesis uncertainty notation") {
    CHECK(format_with_uncertainty(0.0439, 0.0015) == "0.0439(15)");
    CHECK(format_with_uncertainty(0.1034, 0.0013) == "0.1034(13)");
    CHECK(format_with_uncertainty(-0.0061, 0.0028) == "-0.0061(28)");
    CHECK(format_with_uncertainty(1.5, 0.0) == "1.5");
}

TEST_CASE("config validation") {
    auto cfg = test_config();
    cfg.mass_scan = {1.2};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = test_config();
    cfg.iqae.epsilon = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
