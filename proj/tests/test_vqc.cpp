#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qfiae/fourier.hpp"
#include "qfiae/rng.hpp"
#include "qfiae/statevec.hpp"
#include "qfiae/vqc.hpp"

using namespace qfiae;
using namespace qfiae::vqc;
namespace sv = qfiae::statevec;

namespace {

constexpr double kPi = std::numbers::pi;

AnsatzSpec small_ansatz(int layers = 2) {
    AnsatzSpec a;
    a.n_qubits = 4;
    a.n_layers = layers;
    a.encodings_per_variable = 2;
    return a;
}

}  // namespace

TEST_CASE("ansatz validation") {
    AnsatzSpec a;
    CHECK_NOTHROW(a.validate());
    a.encodings_per_variable = 2;  // 2 * 2 != 6
    CHECK_THROWS_AS(a.validate(), std::invalid_argument);
    a = AnsatzSpec{};
    a.measured_qubit = 6;
    CHECK_THROWS_AS(a.validate(), std::invalid_argument);
}

TEST_CASE("circuit structure: gate counts per the layer recipe") {
    AnsatzSpec a;
    a.n_layers = 1;
    const auto params = ParamSet::random(a, 1);
    const auto circuit = build_circuit(a, params, {0.3, 0.7});
    int rx_count = 0, cnot_count = 0, rot_count = 0;
    for (const auto& op : circuit.ops) {
        if (op.kind == sv::Gate::RX) ++rx_count;
        if (op.kind == sv::Gate::CNOT) ++cnot_count;
        if (op.kind == sv::Gate::RY || op.kind == sv::Gate::RZ) ++rot_count;
    }
    CHECK(rx_count == 6);        // one encoding step: every qubit encodes one copy
    CHECK(cnot_count == 5);      // five entangling two-qubit gates per layer
    CHECK(rot_count == 2 * 18);  // layer block + trailing block
}

TEST_CASE("all-zero parameters at zero input act as the identity") {
    AnsatzSpec a;
    const auto circuit = build_circuit(a, ParamSet::zeros(a), {0.0, 0.0});
    const auto state = sv::run(circuit, sv::StateVector(a.n_qubits));
    CHECK(std::abs(state[0] - sv::Complex{1.0, 0.0}) < 1e-12);

    QnnModel model{a, ParamSet::zeros(a)};
    CHECK(forward(model, {0.0, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("depth bookkeeping: 20 layers give 140 depth units") {
    AnsatzSpec a;
    CHECK(a.depth_units() == 140);
    CHECK(a.spectrum_bound() == 60);
}

TEST_CASE("engine forward equals the explicit circuit simulation") {
    const auto a = small_ansatz(3);
    const auto params = ParamSet::random(a, 5);
    QnnModel model{a, params, {1.0, 1.0}, 0.7, 0.1};
    rng::Stream stream(9);
    for (int i = 0; i < 25; ++i) {
        const std::array<double, 2> angles{stream.next_symmetric(2.0 * kPi),
                                           stream.next_symmetric(2.0 * kPi)};
        const auto circuit = build_circuit(a, params, angles);
        const auto state = sv::run(circuit, sv::StateVector(a.n_qubits));
        const double expected = 0.1 + 0.7 * sv::expectation_z(state, a.measured_qubit);
        CHECK(forward_angles(model, angles) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("unscaled output is bounded by one on random inputs") {
    const auto a = small_ansatz();
    QnnModel model{a, ParamSet::random(a, 12)};
    rng::Stream stream(13);
    for (int i = 0; i < 100; ++i) {
        const double value = forward(model, {stream.next_double(), stream.next_double()});
        CHECK(std::abs(value) <= 1.0 + 1e-12);
    }
}

TEST_CASE("forward validates the unit box") {
    QnnModel model{small_ansatz(), ParamSet::zeros(small_ansatz())};
    CHECK_THROWS_AS(forward(model, {1.0, 0.5}), std::domain_error);
    CHECK_THROWS_AS(forward(model, {0.5, -0.1}), std::domain_error);
}

TEST_CASE("model is periodic in x with period 2 pi / input_scale") {
    const auto a = small_ansatz();
    QnnModel model{a, ParamSet::random(a, 31)};
    rng::Stream stream(14);
    for (int i = 0; i < 10; ++i) {
        const std::array<double, 2> angles{stream.next_double(), stream.next_double()};
        const std::array<double, 2> shifted{angles[0] + 2.0 * kPi, angles[1]};
        const std::array<double, 2> shifted_both{angles[0] + 2.0 * kPi, angles[1] + 2.0 * kPi};
        CHECK(forward_angles(model, angles) ==
              doctest::Approx(forward_angles(model, shifted)).epsilon(1e-12));
        CHECK(forward_angles(model, angles) ==
              doctest::Approx(forward_angles(model, shifted_both)).epsilon(1e-12));
    }
}

TEST_CASE("parameter-shift gradient matches central finite differences") {
    const auto a = small_ansatz();
    QnnModel model{a, ParamSet::random(a, 41), {1.0, 1.0}, 0.8, 0.05};
    Dataset data = Dataset::grid(
        [](double x, double y) { return 0.4 + 0.3 * std::sin(2.0 * x) * std::cos(y); }, 4, 4);

    const auto shift = parameter_shift_gradient(model, data);
    rng::Stream stream(17);
    const double h = 1e-4;
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = static_cast<std::size_t>(stream.next_u64() %
                                                static_cast<std::uint64_t>(a.total_params()));
        QnnModel bumped = model;
        bumped.params.angles[p] += h;
        const double up = mse_loss(bumped, data);
        bumped.params.angles[p] = model.params.angles[p] - h;
        const double down = mse_loss(bumped, data);
        const double fd = (up - down) / (2.0 * h);
        CHECK(std::abs(shift[p] - fd) <= 1e-5 * std::max({std::abs(fd), std::abs(shift[p]), 1e-4}));
    }
}

TEST_CASE("zero residual at a loss minimum gives a zero gradient") {
    const auto a = small_ansatz();
    QnnModel model{a, ParamSet::random(a, 3)};
    Dataset data;
    data.points = {{0.25, 0.75}};
    data.targets = {forward(model, {0.25, 0.75})};
    for (double g : parameter_shift_gradient(model, data)) {
        CHECK(std::abs(g) < 1e-12);
    }
}

TEST_CASE("doubling the residual doubles the gradient") {
    const auto a = small_ansatz();
    QnnModel model{a, ParamSet::random(a, 6)};
    Dataset base = Dataset::grid([](double, double) { return 0.0; }, 3, 3);
    Dataset shifted = base;
    for (std::size_t i = 0; i < base.targets.size(); ++i) {
        const double out = forward(model, base.points[i]);
        base.targets[i] = out - 0.1;
        shifted.targets[i] = out - 0.2;
    }
    const auto g1 = parameter_shift_gradient(model, base);
    const auto g2 = parameter_shift_gradient(model, shifted);
    for (std::size_t i = 0; i < g1.size(); ++i) {
        CHECK(g2[i] == doctest::Approx(2.0 * g1[i]).epsilon(1e-9));
    }
}

TEST_CASE("adjoint gradient equals the parameter-shift gradient") {
    const auto a = small_ansatz(3);
    QnnModel model{a, ParamSet::random(a, 8), {1.0, 1.0}, 0.6, -0.2};
    Dataset data = Dataset::grid(
        [](double x, double y) { return 0.1 + 0.5 * std::cos(3.0 * x + y); }, 5, 3);
    const auto shift = parameter_shift_gradient(model, data);
    double loss = 0.0;
    const auto adj = adjoint_gradient(model, data, &loss);
    CHECK(loss == doctest::Approx(mse_loss(model, data)).epsilon(1e-12));
    double scale = 0.0;
    for (double g : shift) scale = std::max(scale, std::abs(g));
    for (std::size_t i = 0; i < shift.size(); ++i) {
        CHECK(std::abs(adj[i] - shift[i]) <= 1e-9 * std::max(scale, 1.0));
    }
}

TEST_CASE("model spectrum is band-limited to encodings * layers") {
    AnsatzSpec a;
    a.n_qubits = 6;
    a.n_layers = 2;  // bound = 6
    QnnModel model{a, ParamSet::random(a, 77)};
    const auto series = fourier::extract(
        [&](double x1, double x2) { return forward_angles(model, {x1, x2}); },
        2 * a.spectrum_bound());
    CHECK(fourier::band_power_outside(series, a.spectrum_bound()) < 1e-8);
    // and there is genuine content inside the band
    double inside = 0.0;
    for (int w1 = -a.spectrum_bound(); w1 <= a.spectrum_bound(); ++w1) {
        for (int w2 = -a.spectrum_bound(); w2 <= a.spectrum_bound(); ++w2) {
            inside += std::norm(series.at(w1, w2));
        }
    }
    CHECK(inside > 1e-6);
}

TEST_CASE("training a self-generated target keeps MSE at the fixed point") {
    const auto a = small_ansatz();
    QnnModel model{a, ParamSet::random(a, 100)};
    Dataset data = Dataset::grid([](double, double) { return 0.0; }, 4, 4);
    for (std::size_t i = 0; i < data.points.size(); ++i) {
        data.targets[i] = forward(model, data.points[i]);
    }
    TrainConfig cfg;
    cfg.max_steps = 50;
    cfg.restarts = 1;
    cfg.seed = 5;
    const auto result = train(model, data, cfg);
    CHECK(result.final_loss <= 1e-10);
    CHECK(result.loss_history.size() == 50);
    CHECK(result.loss_history.front() <= 1e-20);
}

TEST_CASE("training is deterministic for a fixed seed") {
    const auto a = small_ansatz();
    QnnModel model{a, ParamSet::random(a, 2)};
    Dataset data = Dataset::grid(
        [](double x, double y) { return 0.2 * std::sin(2.0 * x) + 0.1 * y; }, 4, 4);
    TrainConfig cfg;
    cfg.max_steps = 40;
    cfg.restarts = 2;
    cfg.seed = 9;
    const auto r1 = train(model, data, cfg);
    const auto r2 = train(model, data, cfg);
    REQUIRE(r1.loss_history.size() == r2.loss_history.size());
    for (std::size_t i = 0; i < r1.loss_history.size(); ++i) {
        CHECK(r1.loss_history[i] == r2.loss_history[i]);  // bit-identical
    }
    CHECK(r1.model.params.angles == r2.model.params.angles);
}

TEST_CASE("training fits a band-limited target quickly on a small model") {
    AnsatzSpec a;
    a.n_qubits = 6;
    a.n_layers = 4;
    QnnModel model{a, ParamSet::random(a, 1)};
    Dataset data = Dataset::grid(
        [](double u1, double u2) { return 0.4 + 0.25 * std::sin(3.0 * u1) * std::cos(2.0 * u2); },
        8, 8);
    prepare_output_scaling(model, data);
    TrainConfig cfg;
    cfg.max_steps = 600;
    cfg.step_size = 0.01;
    cfg.restarts = 1;
    cfg.seed = 3;
    const auto result = train(model, data, cfg);
    CHECK(result.final_loss < 5e-3);
    // loss history length equals steps executed
    CHECK(result.loss_history.size() == 600);
}

TEST_CASE("non-finite targets abort training with a diagnostic") {
    const auto a = small_ansatz();
    QnnModel model{a, ParamSet::zeros(a)};
    Dataset data;
    data.points = {{0.1, 0.1}};
    data.targets = {std::numeric_limits<double>::quiet_NaN()};
    TrainConfig cfg;
    cfg.max_steps = 5;
    CHECK_THROWS(train(model, data, cfg));
}

TEST_CASE("output scaling maps targets into the margin") {
    const auto a = small_ansatz();
    QnnModel model{a, ParamSet::zeros(a)};
    Dataset data = Dataset::grid([](double x, double) { return 3.0 + 2.0 * x; }, 5, 2);
    prepare_output_scaling(model, data);
    for (double t : data.targets) {
        const double z = (t - model.output_offset) / model.output_scale;
        CHECK(std::abs(z) <= 0.9 + 1e-12);
    }
    // constant targets are exactly representable through the offset alone
    Dataset flat = Dataset::grid([](double, double) { return 1.3; }, 3, 3);
    prepare_output_scaling(model, flat);
    CHECK(model.output_scale == 0.0);
    CHECK(model.output_offset == doctest::Approx(1.3));
}

TEST_CASE("dataset validation") {
    Dataset d;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d.points = {{0.5, 1.5}};
    d.targets = {1.0};
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}
