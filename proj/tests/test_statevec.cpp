#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qfiae/rng.hpp"
#include "qfiae/statevec.hpp"

using namespace qfiae;
using namespace qfiae::statevec;

namespace {

constexpr double kPi = std::numbers::pi;

Circuit random_circuit(rng::Stream& stream, int n_qubits, int n_gates) {
    Circuit c(n_qubits);
    for (int g = 0; g < n_gates; ++g) {
        const int q = static_cast<int>(stream.next_u64() % static_cast<std::uint64_t>(n_qubits));
        const int q2 = (q + 1 + static_cast<int>(stream.next_u64() %
                                                 static_cast<std::uint64_t>(n_qubits - 1))) %
                       n_qubits;
        switch (stream.next_u64() % 8) {
            case 0: c.add(h(q)); break;
            case 1: c.add(x(q)); break;
            case 2: c.add(z(q)); break;
            case 3: c.add(rx(q, stream.next_symmetric(kPi))); break;
            case 4: c.add(ry(q, stream.next_symmetric(kPi))); break;
            case 5: c.add(rz(q, stream.next_symmetric(kPi))); break;
            case 6: c.add(cnot(q, q2)); break;
            default: c.add(cz(q, q2)); break;
        }
    }
    return c;
}

StateVector random_state(rng::Stream& stream, int n_qubits) {
    StateVector s(n_qubits);
    double norm = 0.0;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        s[i] = {stream.next_symmetric(1.0), stream.next_symmetric(1.0)};
        norm += std::norm(s[i]);
    }
    for (std::size_t i = 0; i < s.dim(); ++i) s[i] /= std::sqrt(norm);
    return s;
}

}  // namespace

TEST_CASE("hadamard on |0> gives the equal superposition") {
    const auto s = apply_gate(StateVector(1), h(0));
    CHECK(std::abs(s[0] - Complex{1.0 / std::sqrt(2.0), 0.0}) < 1e-15);
    CHECK(std::abs(s[1] - Complex{1.0 / std::sqrt(2.0), 0.0}) < 1e-15);
}

TEST_CASE("rx(pi) on |0> gives -i|1>") {
    const auto s = apply_gate(StateVector(1), rx(0, kPi));
    CHECK(std::abs(s[0]) < 1e-15);
    CHECK(std::abs(s[1] - Complex{0.0, -1.0}) < 1e-15);
}

TEST_CASE("cnot flips the target when the control is set") {
    const auto s = apply_gate(StateVector::basis(2, 0b01), cnot(0, 1));
    CHECK(std::abs(s[0b11] - Complex{1.0, 0.0}) < 1e-15);
}

TEST_CASE("empty circuit leaves the state unchanged") {
    rng::Stream stream(3);
    const auto s = random_state(stream, 3);
    const auto out = run(Circuit(3), s);
    for (std::size_t i = 0; i < s.dim(); ++i) CHECK(std::abs(out[i] - s[i]) < 1e-15);
}

TEST_CASE("H H = identity") {
    Circuit c(1);
    c.add(h(0)).add(h(0));
    const auto out = run(c, StateVector(1));
    CHECK(std::abs(out[0] - Complex{1.0, 0.0}) < 1e-14);
}

TEST_CASE("bell preparation") {
    Circuit c(2);
    c.add(h(0)).add(cnot(0, 1));
    const auto out = run(c, StateVector(2));
    CHECK(out[0].real() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(out[3].real() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(std::abs(out[1]) < 1e-15);
    CHECK(std::abs(out[2]) < 1e-15);
}

TEST_CASE("circuit composition is running both parts in sequence") {
    rng::Stream stream(17);
    const auto c1 = random_circuit(stream, 4, 20);
    const auto c2 = random_circuit(stream, 4, 20);
    Circuit combined(4);
    combined.append(c1).append(c2);
    const auto s = random_state(stream, 4);
    const auto split = run(c2, run(c1, s));
    const auto joined = run(combined, s);
    for (std::size_t i = 0; i < s.dim(); ++i) CHECK(std::abs(split[i] - joined[i]) < 1e-13);
}

TEST_CASE("expectation_z basics") {
    CHECK(expectation_z(StateVector(1), 0) == doctest::Approx(1.0));
    CHECK(expectation_z(StateVector::basis(1, 1), 0) == doctest::Approx(-1.0));
    const auto plus = apply_gate(StateVector(1), h(0));
    CHECK(expectation_z(plus, 0) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("probability_one basics") {
    CHECK(probability_one(StateVector::basis(1, 1), 0) == doctest::Approx(1.0));
    const auto plus = apply_gate(StateVector(1), h(0));
    CHECK(probability_one(plus, 0) == doctest::Approx(0.5));
    const double angle = 2.0 * std::asin(std::sqrt(0.3));
    const auto rotated = apply_gate(StateVector(1), ry(0, angle));
    CHECK(probability_one(rotated, 0) == doctest::Approx(0.3).epsilon(1e-13));
}

TEST_CASE("probability of one plus probability of zero is exactly one") {
    rng::Stream stream(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = run(random_circuit(stream, 4, 30), StateVector(4));
        for (int q = 0; q < 4; ++q) {
            const double p1 = probability_one(s, q);
            const double ez = expectation_z(s, q);
            CHECK(std::abs(p1 - 0.5 * (1.0 - ez)) < 1e-12);
            CHECK(p1 >= 0.0);
            CHECK(p1 <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("unitarity over 1000 random circuits") {
    rng::Stream stream(42);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(stream.next_u64() % 5);
        const int gates = 1 + static_cast<int>(stream.next_u64() % 50);
        const auto out = run(random_circuit(stream, n, gates), StateVector(n));
        CHECK(std::abs(out.norm_squared() - 1.0) < 1e-10);
    }
}

TEST_CASE("linearity of circuit action") {
    rng::Stream stream(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = random_circuit(stream, 3, 25);
        const auto s1 = random_state(stream, 3);
        const auto s2 = random_state(stream, 3);
        const Complex alpha{0.3, -0.4};
        const Complex beta{0.6, 0.2};
        StateVector mix(3);
        for (std::size_t i = 0; i < mix.dim(); ++i) mix[i] = alpha * s1[i] + beta * s2[i];
        const auto lhs = run(c, mix);
        const auto r1 = run(c, s1);
        const auto r2 = run(c, s2);
        for (std::size_t i = 0; i < mix.dim(); ++i) {
            CHECK(std::abs(lhs[i] - (alpha * r1[i] + beta * r2[i])) < 1e-10);
        }
    }
}

TEST_CASE("sampling fixtures and reproducibility") {
    CHECK(sample(StateVector::basis(1, 1), 0, 100, 9) == 100);
    CHECK(sample(StateVector(1), 0, 100, 9) == 0);

    const auto plus = apply_gate(StateVector(1), h(0));
    for (std::uint64_t seed : {1ull, 99ull, 123456ull}) {
        const long long ones = sample(plus, 0, 100000, seed);
        const double fraction = static_cast<double>(ones) / 100000.0;
        // 4 sigma of a fair binomial with 1e5 draws
        CHECK(std::abs(fraction - 0.5) < 4.0 * 0.5 / std::sqrt(100000.0));
        CHECK(sample(plus, 0, 100000, seed) == ones);
    }
}

TEST_CASE("mcz flips the sign of the all-ones component only") {
    StateVector s(3);
    for (std::size_t i = 0; i < s.dim(); ++i) s[i] = Complex{std::sqrt(1.0 / 8.0), 0.0};
    const auto out = apply_gate(s, mcz({0, 1, 2}));
    for (std::size_t i = 0; i < s.dim(); ++i) {
        const double expected = i == 7 ? -std::sqrt(1.0 / 8.0) : std::sqrt(1.0 / 8.0);
        CHECK(out[i].real() == doctest::Approx(expected));
    }
}

TEST_CASE("inverse circuit undoes the original") {
    rng::Stream stream(23);
    for (int trial = 0; trial < 20; ++trial) {
        auto c = random_circuit(stream, 4, 30);
        c.add(cry(0, 2, stream.next_symmetric(kPi)));
        c.add(mcz({0, 1, 2, 3}));
        const auto s = random_state(stream, 4);
        const auto back = run(inverse(c), run(c, s));
        for (std::size_t i = 0; i < s.dim(); ++i) CHECK(std::abs(back[i] - s[i]) < 1e-12);
    }
}

TEST_CASE("error paths") {
    CHECK_THROWS_AS(StateVector(13), std::invalid_argument);          // beyond the cap
    CHECK_THROWS_AS(apply_gate(StateVector(2), h(2)), std::out_of_range);
    CHECK_THROWS_AS(apply_gate(StateVector(2), cnot(1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(apply_gate(StateVector(1), rx(0, std::nan(""))), std::invalid_argument);
    CHECK_THROWS_AS(sample(StateVector(1), 0, 0, 1), std::invalid_argument);
    Circuit c(2);
    CHECK_THROWS_AS(run(c, StateVector(3)), std::invalid_argument);  // qubit count mismatch
    CHECK_THROWS_AS(expectation_z(StateVector(2), 5), std::out_of_range);
}
