#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace qfiae::statevec {

using Complex = std::complex<double>;

// Dense arrays only; everything in this project fits in 7 qubits.
inline constexpr int kMaxQubits = 12;

// 2^n complex amplitudes. Qubit 0 is the least-significant bit of the basis
// index, fixed once so sampling tests are bit-exact.
class StateVector {
public:
    explicit StateVector(int n_qubits);                         // |0...0>
    static StateVector basis(int n_qubits, std::uint64_t index);

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }

    Complex& operator[](std::size_t i) { return amps_[i]; }
    const Complex& operator[](std::size_t i) const { return amps_[i]; }

    std::vector<Complex>& amplitudes() { return amps_; }
    const std::vector<Complex>& amplitudes() const { return amps_; }

    double norm_squared() const;

private:
    int n_qubits_;
    std::vector<Complex> amps_;
};

enum class Gate { H, X, Z, RX, RY, RZ, CNOT, CZ, CRY, MCZ };

// Rotation convention: RX(t) = exp(-i t X / 2), likewise RY, RZ, so that
// RY(t)|0> has probability_one = sin^2(t/2), which iqae relies on.
struct GateOp {
    Gate kind;
    int target = -1;
    int control = -1;          // controlled kinds only
    double angle = 0.0;        // rotation kinds only
    std::vector<int> targets;  // MCZ only: phase flip where all listed bits are 1
};

GateOp h(int q);
GateOp x(int q);
GateOp z(int q);
GateOp rx(int q, double angle);
GateOp ry(int q, double angle);
GateOp rz(int q, double angle);
GateOp cnot(int control, int target);
GateOp cz(int a, int b);
GateOp cry(int control, int target, double angle);
GateOp mcz(std::vector<int> qubits);

struct Circuit {
    int n_qubits = 0;
    std::vector<GateOp> ops;

    explicit Circuit(int n = 0) : n_qubits(n) {}
    Circuit& add(GateOp op);  // validates indices against n_qubits
    Circuit& append(const Circuit& other);
};

// Reversed op order with each gate inverted (rotations negate their angle).
Circuit inverse(const Circuit& c);

void apply_gate_inplace(StateVector& state, const GateOp& g);
StateVector apply_gate(const StateVector& state, const GateOp& g);
StateVector run(const Circuit& c, const StateVector& initial);

double expectation_z(const StateVector& state, int qubit);
double probability_one(const StateVector& state, int qubit);

// Binomial draw with p = probability_one(state, qubit); deterministic for a
// fixed seed. Returns the number of ones observed.
long long sample(const StateVector& state, int qubit, long long shots, std::uint64_t seed);

}  // namespace qfiae::statevec
