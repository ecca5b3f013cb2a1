#include "qfiae/statevec.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "qfiae/rng.hpp"

namespace qfiae::statevec {

namespace {

void check_qubit_count(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("qubit count must be in [1, " +
                                    std::to_string(kMaxQubits) + "], got " +
                                    std::to_string(n_qubits));
    }
}

void check_index(int qubit, int n_qubits) {
    if (qubit < 0 || qubit >= n_qubits) {
        throw std::out_of_range("qubit index " + std::to_string(qubit) +
                                " out of range for " + std::to_string(n_qubits) +
                                " qubits");
    }
}

bool is_rotation(Gate k) { return k == Gate::RX || k == Gate::RY || k == Gate::RZ || k == Gate::CRY; }
bool is_controlled(Gate k) { return k == Gate::CNOT || k == Gate::CZ || k == Gate::CRY; }

void check_gate(const GateOp& g, int n_qubits) {
    if (g.kind == Gate::MCZ) {
        if (g.targets.empty()) throw std::invalid_argument("MCZ needs at least one qubit");
        for (int q : g.targets) check_index(q, n_qubits);
        return;
    }
    check_index(g.target, n_qubits);
    if (is_controlled(g.kind)) {
        check_index(g.control, n_qubits);
        if (g.control == g.target) {
            throw std::invalid_argument("control and target must be distinct");
        }
    }
    if (is_rotation(g.kind) && !std::isfinite(g.angle)) {
        throw std::invalid_argument("rotation gate requires a finite angle");
    }
}

// Iterates amplitude pairs (i, i | 1<<target) and applies a 2x2 action.
template <typename PairFn>
void for_each_pair(StateVector& s, int target, PairFn&& fn) {
    const std::size_t bit = std::size_t{1} << target;
    const std::size_t dim = s.dim();
    auto& a = s.amplitudes();
    for (std::size_t base = 0; base < dim; base += 2 * bit) {
        for (std::size_t i = base; i < base + bit; ++i) {
            fn(i, a[i], a[i + bit]);
        }
    }
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    check_qubit_count(n_qubits);
    amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    amps_[0] = Complex{1.0, 0.0};
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
    StateVector s(n_qubits);
    if (index >= s.dim()) throw std::out_of_range("basis index out of range");
    s.amps_[0] = Complex{0.0, 0.0};
    s.amps_[index] = Complex{1.0, 0.0};
    return s;
}

double StateVector::norm_squared() const {
    double n = 0.0;
    for (const auto& a : amps_) n += std::norm(a);
    return n;
}

GateOp h(int q) { return GateOp{Gate::H, q, -1, 0.0, {}}; }
GateOp x(int q) { return GateOp{Gate::X, q, -1, 0.0, {}}; }
GateOp z(int q) { return GateOp{Gate::Z, q, -1, 0.0, {}}; }
GateOp rx(int q, double angle) { return GateOp{Gate::RX, q, -1, angle, {}}; }
GateOp ry(int q, double angle) { return GateOp{Gate::RY, q, -1, angle, {}}; }
GateOp rz(int q, double angle) { return GateOp{Gate::RZ, q, -1, angle, {}}; }
GateOp cnot(int control, int target) { return GateOp{Gate::CNOT, target, control, 0.0, {}}; }
GateOp cz(int a, int b) { return GateOp{Gate::CZ, b, a, 0.0, {}}; }
GateOp cry(int control, int target, double angle) {
    return GateOp{Gate::CRY, target, control, angle, {}};
}
GateOp mcz(std::vector<int> qubits) {
    GateOp g{Gate::MCZ, -1, -1, 0.0, {}};
    g.targets = std::move(qubits);
    return g;
}

Circuit& Circuit::add(GateOp op) {
    check_gate(op, n_qubits);
    ops.push_back(std::move(op));
    return *this;
}

Circuit& Circuit::append(const Circuit& other) {
    if (other.n_qubits != n_qubits) {
        throw std::invalid_argument("appending circuit with mismatched qubit count");
    }
    ops.insert(ops.end(), other.ops.begin(), other.ops.end());
    return *this;
}

Circuit inverse(const Circuit& c) {
    Circuit inv(c.n_qubits);
    for (auto it = c.ops.rbegin(); it != c.ops.rend(); ++it) {
        GateOp g = *it;
        if (is_rotation(g.kind)) g.angle = -g.angle;
        inv.ops.push_back(std::move(g));  // H, X, Z, CNOT, CZ, MCZ are self-inverse
    }
    return inv;
}

void apply_gate_inplace(StateVector& s, const GateOp& g) {
    check_gate(g, s.n_qubits());
    switch (g.kind) {
        case Gate::H: {
            const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
            for_each_pair(s, g.target, [&](std::size_t, Complex& a0, Complex& a1) {
                const Complex t0 = (a0 + a1) * inv_sqrt2;
                const Complex t1 = (a0 - a1) * inv_sqrt2;
                a0 = t0;
                a1 = t1;
            });
            break;
        }
        case Gate::X:
            for_each_pair(s, g.target, [](std::size_t, Complex& a0, Complex& a1) { std::swap(a0, a1); });
            break;
        case Gate::Z:
            for_each_pair(s, g.target, [](std::size_t, Complex&, Complex& a1) { a1 = -a1; });
            break;
        case Gate::RX: {
            const double c = std::cos(0.5 * g.angle);
            const double sn = std::sin(0.5 * g.angle);
            for_each_pair(s, g.target, [&](std::size_t, Complex& a0, Complex& a1) {
                const Complex t0 = c * a0 - Complex{0.0, sn} * a1;
                const Complex t1 = c * a1 - Complex{0.0, sn} * a0;
                a0 = t0;
                a1 = t1;
            });
            break;
        }
        case Gate::RY: {
            const double c = std::cos(0.5 * g.angle);
            const double sn = std::sin(0.5 * g.angle);
            for_each_pair(s, g.target, [&](std::size_t, Complex& a0, Complex& a1) {
                const Complex t0 = c * a0 - sn * a1;
                const Complex t1 = sn * a0 + c * a1;
                a0 = t0;
                a1 = t1;
            });
            break;
        }
        case Gate::RZ: {
            const Complex p0{std::cos(0.5 * g.angle), -std::sin(0.5 * g.angle)};
            const Complex p1 = std::conj(p0);
            for_each_pair(s, g.target, [&](std::size_t, Complex& a0, Complex& a1) {
                a0 *= p0;
                a1 *= p1;
            });
            break;
        }
        case Gate::CNOT: {
            const std::size_t cbit = std::size_t{1} << g.control;
            for_each_pair(s, g.target, [&](std::size_t i, Complex& a0, Complex& a1) {
                if (i & cbit) std::swap(a0, a1);
            });
            break;
        }
        case Gate::CZ: {
            const std::size_t cbit = std::size_t{1} << g.control;
            for_each_pair(s, g.target, [&](std::size_t i, Complex&, Complex& a1) {
                if (i & cbit) a1 = -a1;
            });
            break;
        }
        case Gate::CRY: {
            const double c = std::cos(0.5 * g.angle);
            const double sn = std::sin(0.5 * g.angle);
            const std::size_t cbit = std::size_t{1} << g.control;
            for_each_pair(s, g.target, [&](std::size_t i, Complex& a0, Complex& a1) {
                if (i & cbit) {
                    const Complex t0 = c * a0 - sn * a1;
                    const Complex t1 = sn * a0 + c * a1;
                    a0 = t0;
                    a1 = t1;
                }
            });
            break;
        }
        case Gate::MCZ: {
            std::size_t mask = 0;
            for (int q : g.targets) mask |= std::size_t{1} << q;
            auto& a = s.amplitudes();
            for (std::size_t i = 0; i < a.size(); ++i) {
                if ((i & mask) == mask) a[i] = -a[i];
            }
            break;
        }
    }
}

StateVector apply_gate(const StateVector& state, const GateOp& g) {
    StateVector out = state;
    apply_gate_inplace(out, g);
    return out;
}

StateVector run(const Circuit& c, const StateVector& initial) {
    if (c.n_qubits != initial.n_qubits()) {
        throw std::invalid_argument("circuit and state qubit counts differ");
    }
    StateVector s = initial;
    for (const auto& g : c.ops) apply_gate_inplace(s, g);
    return s;
}

double expectation_z(const StateVector& state, int qubit) {
    check_index(qubit, state.n_qubits());
    const std::size_t bit = std::size_t{1} << qubit;
    double e = 0.0;
    const auto& a = state.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double p = std::norm(a[i]);
        e += (i & bit) ? -p : p;
    }
    return e;
}

double probability_one(const StateVector& state, int qubit) {
    check_index(qubit, state.n_qubits());
    const std::size_t bit = std::size_t{1} << qubit;
    double p = 0.0;
    const auto& a = state.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i & bit) p += std::norm(a[i]);
    }
    return p;
}

long long sample(const StateVector& state, int qubit, long long shots, std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("shots must be >= 1");
    const double p = probability_one(state, qubit);
    rng::Stream stream(seed);
    long long ones = 0;
    for (long long i = 0; i < shots; ++i) {
        if (stream.next_double() < p) ++ones;
    }
    return ones;
}

}  // namespace qfiae::statevec
