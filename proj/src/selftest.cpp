#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <ostream>
#include <vector>

#include "qfiae/artifacts.hpp"
#include "qfiae/fourier.hpp"
#include "qfiae/iqae.hpp"
#include "qfiae/ltd.hpp"
#include "qfiae/pipeline.hpp"
#include "qfiae/quad.hpp"
#include "qfiae/rng.hpp"
#include "qfiae/statevec.hpp"
#include "qfiae/vqc.hpp"

namespace qfiae::pipeline {

namespace {

namespace sv = qfiae::statevec;
constexpr double kPi = std::numbers::pi;

struct Check {
    const char* name;
    std::function<void()> run;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

void require_close(double a, double b, double tol, const std::string& what) {
    require(std::abs(a - b) <= tol, what + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

void statevec_suite() {
    // Bell pair
    sv::Circuit bell(2);
    bell.add(sv::h(0)).add(sv::cnot(0, 1));
    const auto state = sv::run(bell, sv::StateVector(2));
    require_close(std::abs(state[0] - sv::Complex{std::sqrt(0.5), 0.0}), 0.0, 1e-12, "bell amp 00");
    require_close(std::abs(state[3] - sv::Complex{std::sqrt(0.5), 0.0}), 0.0, 1e-12, "bell amp 11");

    // RX(pi)|0> = -i |1>
    const auto flipped = sv::apply_gate(sv::StateVector(1), sv::rx(0, kPi));
    require_close(std::abs(flipped[1] - sv::Complex{0.0, -1.0}), 0.0, 1e-12, "rx(pi)");

    // random circuits preserve the norm
    rng::Stream stream(11);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(stream.next_u64() % 4);
        sv::Circuit c(n);
        for (int g = 0; g < 40; ++g) {
            const int q = static_cast<int>(stream.next_u64() % static_cast<std::uint64_t>(n));
            switch (stream.next_u64() % 5) {
                case 0: c.add(sv::h(q)); break;
                case 1: c.add(sv::rx(q, stream.next_symmetric(kPi))); break;
                case 2: c.add(sv::ry(q, stream.next_symmetric(kPi))); break;
                case 3: c.add(sv::rz(q, stream.next_symmetric(kPi))); break;
                default: c.add(sv::cnot(q, (q + 1) % n)); break;
            }
        }
        const auto out = sv::run(c, sv::StateVector(n));
        require_close(out.norm_squared(), 1.0, 1e-10, "unitarity");
    }

    // reproducible sampling
    const auto plus = sv::apply_gate(sv::StateVector(1), sv::h(0));
    require(sv::sample(plus, 0, 5000, 77) == sv::sample(plus, 0, 5000, 77),
            "sampling must be reproducible");
}

void quad_suite() {
    const auto one = quad::gauss_2d([](double, double) { return 1.0; }, 8, 2);
    require_close(one.value, 1.0, 1e-14, "unit integral");
    const auto xy = quad::gauss_2d([](double x, double y) { return x * y; }, 8, 2);
    require_close(xy.value, 0.25, 1e-14, "xy integral");
    const auto gauss = quad::gauss_2d(
        [](double x, double y) { return std::exp(-x * x - y * y); }, 24, 4);
    require_close(gauss.value, 0.55774628535103364, 1e-10, "erf fixture");
}

void fourier_suite() {
    auto series = fourier::extract(
        [](double x1, double) { return 0.5 + 0.25 * std::cos(3.0 * x1); }, 5);
    require_close(series.at(0, 0).real(), 0.5, 1e-12, "c00");
    require_close(series.at(3, 0).real(), 0.125, 1e-12, "c(3,0)");
    require_close(std::abs(series.at(1, 1)), 0.0, 1e-12, "c(1,1)");
    rng::Stream stream(5);
    for (int i = 0; i < 20; ++i) {
        const double x1 = stream.next_double() * 2.0 * kPi;
        const double x2 = stream.next_double() * 2.0 * kPi;
        require_close(fourier::evaluate(series, x1, x2), 0.5 + 0.25 * std::cos(3.0 * x1), 1e-10,
                      "roundtrip");
    }
    // a corrupted (asymmetric) series must be rejected
    auto corrupted = fourier::FourierSeries2D::zero(2);
    corrupted.at(1, 0) = {0.3, 0.1};
    corrupted.at(-1, 0) = {0.3, 0.1};  // not the conjugate
    bool caught = false;
    try {
        fourier::real_term_list(corrupted);
    } catch (const std::exception&) {
        caught = true;
    }
    require(caught, "symmetry violation must be detected");
}

void iqae_suite() {
    // loader probability equals the classical midpoint average
    for (int w1 = -3; w1 <= 3; w1 += 3) {
        for (int w2 = -2; w2 <= 2; w2 += 2) {
            const fourier::Box2 box{0.0, 1.0, 0.0, 1.0};
            const auto problem =
                iqae::build_sinusoid_loader(1.0, {w1, w2}, 0.4, {2, 2}, box);
            const auto state = sv::run(problem.prep, sv::StateVector(problem.prep.n_qubits));
            double classical = 0.0;
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) {
                    const double x1 = (i + 0.5) * 0.25;
                    const double x2 = (j + 0.5) * 0.25;
                    classical += 0.5 * (1.0 + std::cos(w1 * x1 + w2 * x2 + 0.4));
                }
            }
            classical /= 16.0;
            require_close(sv::probability_one(state, problem.ancilla), classical, 1e-12,
                          "loader exactness");
        }
    }
    // Grover two-dimensional rotation law
    const auto problem = iqae::make_bernoulli_problem(0.3);
    const auto grover = iqae::grover_operator(problem);
    auto state = sv::run(problem.prep, sv::StateVector(1));
    const double theta = std::asin(std::sqrt(0.3));
    for (int k = 1; k <= 3; ++k) {
        state = sv::run(grover, state);
        const double expected = std::pow(std::sin((2 * k + 1) * theta), 2);
        require_close(sv::probability_one(state, 0), expected, 1e-10, "grover law");
    }
    // exact-mode quantum integration of cos over [0,1]^2
    iqae::IqaeConfig cfg;
    cfg.mode = iqae::Mode::ExactExpectation;
    const auto term = iqae::integrate_term(1.0, {1, 0}, 0.0, {0.0, 1.0, 0.0, 1.0}, {2, 2}, cfg);
    require_close(term.estimate, std::sin(1.0), 1e-9, "sin(1) term");
}

void ltd_suite() {
    const auto spec = ltd::make_process("phi", 0.3);
    rng::Stream stream(9);
    for (int i = 0; i < 2000; ++i) {
        const double l1 = 2.0 * stream.next_double();
        const double v = stream.next_double();
        if (const auto root = ltd::resolve_three_body(l1, v, spec)) {
            const ltd::Kinematics kin{l1, root->l2_star, v, spec.sqrt_s, spec.masses};
            const auto e = ltd::on_shell_energies(kin);
            const int unb[] = {1, 3, 5};
            const int bar[] = {6};
            require_close(ltd::causal_lambda(e, unb, bar), 0.0, 1e-10, "three-body residual");
        }
    }
    // homogeneity of the residues under energy rescaling
    ltd::OnShellEnergies e{{1.3, 0.7, 1.1, 0.9, 1.7, 2.9}};
    ltd::OnShellEnergies scaled = e;
    for (int i = 1; i <= 6; ++i) scaled[i] *= 1.7;
    require_close(ltd::residue_456(scaled, spec) / ltd::residue_456(e, spec),
                  std::pow(1.7, -7.0), 1e-10, "456 scaling");
    require_close(ltd::residue_1356(scaled, spec) / ltd::residue_1356(e, spec),
                  std::pow(1.7, -7.0), 1e-10, "1356 scaling");
}

void vqc_suite() {
    vqc::AnsatzSpec ansatz;
    ansatz.n_qubits = 4;
    ansatz.n_layers = 2;
    ansatz.encodings_per_variable = 2;
    const auto params = vqc::ParamSet::random(ansatz, 3);

    // engine forward equals the explicit circuit path
    vqc::QnnModel model{ansatz, params};
    rng::Stream stream(4);
    for (int i = 0; i < 10; ++i) {
        const std::array<double, 2> angles{stream.next_symmetric(kPi), stream.next_symmetric(kPi)};
        const auto circuit = vqc::build_circuit(ansatz, params, angles);
        const auto state = sv::run(circuit, sv::StateVector(ansatz.n_qubits));
        const double expected = sv::expectation_z(state, ansatz.measured_qubit);
        require_close(vqc::forward_angles(model, angles), expected, 1e-12, "engine vs circuit");
    }

    // adjoint gradient equals the parameter-shift gradient
    vqc::Dataset data = vqc::Dataset::grid(
        [](double a, double b) { return 0.3 * std::sin(2.0 * a) + 0.2 * b; }, 4, 4);
    const auto shift = vqc::parameter_shift_gradient(model, data);
    const auto adj = vqc::adjoint_gradient(model, data);
    for (std::size_t i = 0; i < shift.size(); ++i) {
        require_close(adj[i], shift[i], 1e-9, "adjoint vs shift");
    }
}

void artifacts_suite() {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "qfiae_selftest";
    fs::create_directories(dir);

    vqc::QnnModel model;
    model.ansatz.n_layers = 2;
    model.params = vqc::ParamSet::random(model.ansatz, 21);
    model.output_scale = 0.321;
    model.output_offset = -0.07;
    const auto model_path = (dir / "model.json").string();
    artifacts::save_model(model, {}, model_path);
    const auto loaded = artifacts::load_model(model_path);
    require(loaded.params.angles == model.params.angles, "model artifact roundtrip");

    auto series = fourier::FourierSeries2D::zero(3);
    series.at(0, 0) = 0.25;
    series.at(2, 1) = {0.1, -0.05};
    series.at(-2, -1) = {0.1, 0.05};
    const auto series_path = (dir / "series.json").string();
    artifacts::save_series(series, series_path);
    const auto back = artifacts::load_series(series_path);
    require_close(std::abs(back.at(2, 1) - series.at(2, 1)), 0.0, 1e-15, "series roundtrip");

    // a symmetry-broken artifact must fail to load
    auto corrupted = series;
    corrupted.at(-2, -1) = {0.1, -0.05};
    const auto bad_path = (dir / "series_bad.json").string();
    artifacts::save_series(corrupted, bad_path);
    bool caught = false;
    try {
        artifacts::load_series(bad_path);
    } catch (const std::exception&) {
        caught = true;
    }
    require(caught, "corrupted series artifact must be rejected");
}

}  // namespace

bool cmd_selftest(std::ostream& out) {
    const std::vector<Check> checks{
        {"statevec", statevec_suite}, {"quad", quad_suite},   {"fourier", fourier_suite},
        {"iqae", iqae_suite},         {"ltd", ltd_suite},     {"vqc", vqc_suite},
        {"artifacts", artifacts_suite},
    };
    bool all_ok = true;
    for (const auto& check : checks) {
        try {
            check.run();
            out << "  [PASS] " << check.name << "\n";
        } catch (const std::exception& e) {
            all_ok = false;
            out << "  [FAIL] " << check.name << ": " << e.what() << "\n";
        }
    }
    out << (all_ok ? "selftest: all suites passed\n" : "selftest: FAILURES detected\n");
    return all_ok;
}

}  // namespace qfiae::pipeline
