#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qfiae/statevec.hpp"

namespace qfiae::vqc {

// Data re-uploading ansatz: per layer one variational block (RZ RY RZ per
// qubit), a linear CNOT entangling chain, and an RX encoding block; one
// trailing variational block after the last layer. Each qubit encodes exactly
// one copy of one input variable.
struct AnsatzSpec {
    int n_qubits = 6;
    int n_layers = 20;
    int encodings_per_variable = 3;
    int n_variables = 2;
    int measured_qubit = 0;

    void validate() const;
    int variable_for_qubit(int qubit) const { return qubit / encodings_per_variable; }
    int total_params() const { return (n_layers + 1) * n_qubits * 3; }
    int param_index(int layer, int qubit, int rot) const {
        return (layer * n_qubits + qubit) * 3 + rot;
    }
    // per-variable frequency bound of the model spectrum
    int spectrum_bound() const { return encodings_per_variable * n_layers; }
    // depth bookkeeping: encoding + variational + (n_qubits - 1) entangling
    // steps per layer
    int depth_units() const { return (2 + (n_qubits - 1)) * n_layers; }
};

struct ParamSet {
    std::vector<double> angles;  // flat [n_layers + 1][n_qubits][3]

    static ParamSet zeros(const AnsatzSpec& ansatz);
    static ParamSet random(const AnsatzSpec& ansatz, std::uint64_t seed);  // U[-pi, pi)

    double at(const AnsatzSpec& a, int layer, int qubit, int rot) const {
        return angles[static_cast<std::size_t>(a.param_index(layer, qubit, rot))];
    }
    void check_shape(const AnsatzSpec& ansatz) const;
};

struct QnnModel {
    AnsatzSpec ansatz;
    ParamSet params;
    std::array<double, 2> input_scale{1.0, 1.0};  // radians per unit input
    double output_scale = 1.0;
    double output_offset = 0.0;
};

struct TrainConfig {
    long long max_steps = 15000;
    double step_size = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon_adam = 1e-8;
    std::uint64_t seed = 0;
    int restarts = 3;
};

struct Dataset {
    std::vector<std::array<double, 2>> points;  // in [0,1)^2
    std::vector<double> targets;

    void validate() const;
    // uniform midpoint grid: ((i+0.5)/n1, (j+0.5)/n2)
    static Dataset grid(const std::function<double(double, double)>& f, int n1, int n2);
};

// Circuit for one input, with the encoding angles already scaled
// (angle_d = input_scale_d * x_d).
statevec::Circuit build_circuit(const AnsatzSpec& ansatz, const ParamSet& params,
                                std::array<double, 2> encoded_angles);

// output_offset + output_scale * <Z_measured>; input must lie in [0,1)^2.
double forward(const QnnModel& model, std::array<double, 2> input);

// <Z_measured> as a function of raw encoding angles (no box restriction);
// used for Fourier extraction over the full period.
double forward_angles(const QnnModel& model, std::array<double, 2> encoded_angles);

double mse_loss(const QnnModel& model, const Dataset& data);

// Gradient of the MSE loss via the parameter-shift rule
// [f(t + pi/2) - f(t - pi/2)] / 2 chained through the loss.
std::vector<double> parameter_shift_gradient(const QnnModel& model, const Dataset& data);

// Same gradient computed by one adjoint sweep per sample; O(1) circuit
// evaluations per parameter instead of two. Equals parameter_shift_gradient
// up to roundoff (tested).
std::vector<double> adjoint_gradient(const QnnModel& model, const Dataset& data,
                                     double* loss_out = nullptr);

struct TrainResult {
    QnnModel model;                    // best-loss parameters seen
    std::vector<double> loss_history;  // winning restart, one entry per step
    double final_loss = 0.0;
    int best_restart = 0;
};

// Adam loop; restart 0 starts from `init`, further restarts from fresh seeded
// random parameters. Deterministic for a fixed config.
TrainResult train(const QnnModel& init, const Dataset& data, const TrainConfig& cfg);

// Affine map of the dataset targets onto [-0.9, 0.9], stored inversely in
// output_scale / output_offset so forward() stays in physical units.
void prepare_output_scaling(QnnModel& model, const Dataset& data, double margin = 0.9);

// Batched SoA evaluator; this is the training hot path.
class BatchEvaluator {
public:
    struct Op {
        enum class Kind : std::uint8_t { Rot, Cnot, Encode } kind;
        std::uint8_t axis;  // 0 = X, 1 = Y, 2 = Z (Rot only)
        int target;
        int control;   // Cnot
        int param;     // Rot: flat parameter index
        int variable;  // Encode
    };

    explicit BatchEvaluator(const AnsatzSpec& ansatz);

    // z_out[i] = <Z_measured> for encoding angles enc_angles[i]
    void forward(const ParamSet& params, std::span<const std::array<double, 2>> enc_angles,
                 std::span<double> z_out);

    // MSE of (offset + scale * z) against targets; gradient dL/dtheta written
    // to grad_out (length total_params).
    double loss_and_gradient(const ParamSet& params,
                             std::span<const std::array<double, 2>> enc_angles,
                             std::span<const double> targets, double out_scale,
                             double out_offset, std::span<double> grad_out);

private:
    // fused interpreter ops: one SU(2) block per qubit per variational layer,
    // permutation-tracked CNOTs, per-sample RX encodings
    struct FusedOp {
        enum class Kind : std::uint8_t { Su2, Cnot, Encode } kind;
        int target;
        int control;     // Cnot
        int param_base;  // Su2: index of the first of three angles
        int variable;    // Encode
    };

    void load_chunk(std::span<const std::array<double, 2>> enc_angles, std::size_t start,
                    int count);
    void run_chunk_forward(const ParamSet& params);
    void chunk_grad(const ParamSet& params, std::span<double> grad);

    AnsatzSpec ansatz_;
    std::vector<FusedOp> fused_;
    int dim_;
    std::vector<int> perm_;  // logical amplitude -> physical row
    // chunk workspaces, planar [row][sample]
    std::vector<double> re_, im_, lre_, lim_;
    std::vector<double> enc_c_, enc_s_;  // per variable, per sample: cos/sin of angle/2
    std::vector<double> weights_;
};

}  // namespace qfiae::vqc
