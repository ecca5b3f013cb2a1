#include "qfiae/vqc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qfiae/rng.hpp"

namespace qfiae::vqc {

namespace {

constexpr int kChunk = 64;  // samples per SoA block; L2-resident for 6 qubits

}  // namespace

void AnsatzSpec::validate() const {
    if (n_qubits < 1 || n_qubits > statevec::kMaxQubits) {
        throw std::invalid_argument("n_qubits must be in [1, 12]");
    }
    if (n_layers < 1) throw std::invalid_argument("n_layers must be >= 1");
    if (n_variables != 2) {
        throw std::invalid_argument("only 2-variable models are supported");
    }
    if (encodings_per_variable < 1 ||
        n_variables * encodings_per_variable != n_qubits) {
        throw std::invalid_argument(
            "n_variables * encodings_per_variable must equal n_qubits");
    }
    if (measured_qubit < 0 || measured_qubit >= n_qubits) {
        throw std::invalid_argument("measured_qubit out of range");
    }
}

ParamSet ParamSet::zeros(const AnsatzSpec& ansatz) {
    ansatz.validate();
    ParamSet p;
    p.angles.assign(static_cast<std::size_t>(ansatz.total_params()), 0.0);
    return p;
}

ParamSet ParamSet::random(const AnsatzSpec& ansatz, std::uint64_t seed) {
    ParamSet p = zeros(ansatz);
    rng::Stream stream(seed);
    for (auto& a : p.angles) a = stream.next_symmetric(std::numbers::pi);
    return p;
}

void ParamSet::check_shape(const AnsatzSpec& ansatz) const {
    if (angles.size() != static_cast<std::size_t>(ansatz.total_params())) {
        throw std::invalid_argument("parameter count does not match the ansatz shape");
    }
    for (double a : angles) {
        if (!std::isfinite(a)) throw std::invalid_argument("non-finite parameter angle");
    }
}

void Dataset::validate() const {
    if (points.empty()) throw std::invalid_argument("dataset is empty");
    if (points.size() != targets.size()) {
        throw std::invalid_argument("points and targets differ in length");
    }
    for (const auto& p : points) {
        for (double x : p) {
            if (!(x >= 0.0 && x < 1.0)) {
                throw std::invalid_argument("dataset point outside the unit box");
            }
        }
    }
    for (double t : targets) {
        if (!std::isfinite(t)) throw std::invalid_argument("non-finite dataset target");
    }
}

Dataset Dataset::grid(const std::function<double(double, double)>& f, int n1, int n2) {
    if (n1 < 1 || n2 < 1) throw std::invalid_argument("grid sizes must be >= 1");
    Dataset d;
    d.points.reserve(static_cast<std::size_t>(n1) * n2);
    d.targets.reserve(static_cast<std::size_t>(n1) * n2);
    for (int i = 0; i < n1; ++i) {
        const double u1 = (i + 0.5) / n1;
        for (int j = 0; j < n2; ++j) {
            const double u2 = (j + 0.5) / n2;
            d.points.push_back({u1, u2});
            d.targets.push_back(f(u1, u2));
        }
    }
    return d;
}

// Single source of truth for the gate order; consumed by both build_circuit
// and the batched engine.
static std::vector<BatchEvaluator::Op> make_program(const AnsatzSpec& a) {
    using Op = BatchEvaluator::Op;
    std::vector<Op> ops;
    auto variational_block = [&](int layer) {
        for (int q = 0; q < a.n_qubits; ++q) {
            ops.push_back({Op::Kind::Rot, 2, q, -1, a.param_index(layer, q, 0), -1});
            ops.push_back({Op::Kind::Rot, 1, q, -1, a.param_index(layer, q, 1), -1});
            ops.push_back({Op::Kind::Rot, 2, q, -1, a.param_index(layer, q, 2), -1});
        }
    };
    for (int layer = 0; layer < a.n_layers; ++layer) {
        variational_block(layer);
        for (int q = 0; q + 1 < a.n_qubits; ++q) {
            ops.push_back({Op::Kind::Cnot, 0, q + 1, q, -1, -1});
        }
        for (int q = 0; q < a.n_qubits; ++q) {
            ops.push_back({Op::Kind::Encode, 0, q, -1, -1, a.variable_for_qubit(q)});
        }
    }
    variational_block(a.n_layers);
    return ops;
}

statevec::Circuit build_circuit(const AnsatzSpec& ansatz, const ParamSet& params,
                                std::array<double, 2> encoded_angles) {
    ansatz.validate();
    params.check_shape(ansatz);
    statevec::Circuit c(ansatz.n_qubits);
    for (const auto& op : make_program(ansatz)) {
        switch (op.kind) {
            case BatchEvaluator::Op::Kind::Rot: {
                const double angle = params.angles[static_cast<std::size_t>(op.param)];
                if (op.axis == 1) {
                    c.add(statevec::ry(op.target, angle));
                } else {
                    c.add(statevec::rz(op.target, angle));
                }
                break;
            }
            case BatchEvaluator::Op::Kind::Cnot:
                c.add(statevec::cnot(op.control, op.target));
                break;
            case BatchEvaluator::Op::Kind::Encode:
                c.add(statevec::rx(op.target, encoded_angles[static_cast<std::size_t>(op.variable)]));
                break;
        }
    }
    return c;
}

BatchEvaluator::BatchEvaluator(const AnsatzSpec& ansatz) : ansatz_(ansatz) {
    ansatz_.validate();
    dim_ = 1 << ansatz_.n_qubits;
    auto variational_block = [&](int layer) {
        for (int q = 0; q < ansatz_.n_qubits; ++q) {
            fused_.push_back({FusedOp::Kind::Su2, q, -1, ansatz_.param_index(layer, q, 0), -1});
        }
    };
    for (int layer = 0; layer < ansatz_.n_layers; ++layer) {
        variational_block(layer);
        for (int q = 0; q + 1 < ansatz_.n_qubits; ++q) {
            fused_.push_back({FusedOp::Kind::Cnot, q + 1, q, -1, -1});
        }
        for (int q = 0; q < ansatz_.n_qubits; ++q) {
            fused_.push_back({FusedOp::Kind::Encode, q, -1, -1, ansatz_.variable_for_qubit(q)});
        }
    }
    variational_block(ansatz_.n_layers);

    perm_.assign(static_cast<std::size_t>(dim_), 0);
    re_.assign(static_cast<std::size_t>(dim_) * kChunk, 0.0);
    im_.assign(static_cast<std::size_t>(dim_) * kChunk, 0.0);
    lre_.assign(static_cast<std::size_t>(dim_) * kChunk, 0.0);
    lim_.assign(static_cast<std::size_t>(dim_) * kChunk, 0.0);
    enc_c_.assign(static_cast<std::size_t>(2) * kChunk, 1.0);
    enc_s_.assign(static_cast<std::size_t>(2) * kChunk, 0.0);
    weights_.assign(kChunk, 0.0);
}

namespace {

// Row-pair kernels over a full chunk. The pointers never alias: they address
// distinct amplitude rows.

inline void rx_rows_per_sample(double* __restrict r0, double* __restrict i0,
                               double* __restrict r1, double* __restrict i1,
                               const double* __restrict c, const double* __restrict s) {
    for (int b = 0; b < kChunk; ++b) {
        const double a0r = r0[b], a0i = i0[b], a1r = r1[b], a1i = i1[b];
        r0[b] = c[b] * a0r + s[b] * a1i;
        i0[b] = c[b] * a0i - s[b] * a1r;
        r1[b] = c[b] * a1r + s[b] * a0i;
        i1[b] = c[b] * a1i - s[b] * a0r;
    }
}

struct Su2 {
    // U = RZ(a2) RY(a1) RZ(a0) as a dense 2x2
    double u00r, u00i, u01r, u01i, u10r, u10i, u11r, u11i;

    static Su2 from_angles(double a0, double a1, double a2) {
        const double c = std::cos(0.5 * a1), s = std::sin(0.5 * a1);
        const std::complex<double> z0{std::cos(0.5 * a0), -std::sin(0.5 * a0)};
        const std::complex<double> z2{std::cos(0.5 * a2), -std::sin(0.5 * a2)};
        const std::complex<double> u00 = c * z2 * z0;
        const std::complex<double> u01 = -s * z2 * std::conj(z0);
        const std::complex<double> u10 = s * std::conj(z2) * z0;
        const std::complex<double> u11 = c * std::conj(z2) * std::conj(z0);
        return {u00.real(), u00.imag(), u01.real(), u01.imag(),
                u10.real(), u10.imag(), u11.real(), u11.imag()};
    }

    Su2 dagger() const {
        return {u00r, -u00i, u10r, -u10i, u01r, -u01i, u11r, -u11i};
    }
};

inline void su2_rows(double* __restrict r0, double* __restrict i0, double* __restrict r1,
                     double* __restrict i1, const Su2& u) {
    for (int b = 0; b < kChunk; ++b) {
        const double a0r = r0[b], a0i = i0[b], a1r = r1[b], a1i = i1[b];
        r0[b] = u.u00r * a0r - u.u00i * a0i + u.u01r * a1r - u.u01i * a1i;
        i0[b] = u.u00r * a0i + u.u00i * a0r + u.u01r * a1i + u.u01i * a1r;
        r1[b] = u.u10r * a0r - u.u10i * a0i + u.u11r * a1r - u.u11i * a1i;
        i1[b] = u.u10r * a0i + u.u10i * a0r + u.u11r * a1i + u.u11i * a1r;
    }
}

}  // namespace

void BatchEvaluator::load_chunk(std::span<const std::array<double, 2>> enc_angles,
                                std::size_t start, int count) {
    std::fill(re_.begin(), re_.end(), 0.0);
    std::fill(im_.begin(), im_.end(), 0.0);
    for (int b = 0; b < kChunk; ++b) re_[b] = 1.0;
    for (int i = 0; i < dim_; ++i) perm_[static_cast<std::size_t>(i)] = i;
    for (int d = 0; d < 2; ++d) {
        for (int b = 0; b < kChunk; ++b) {
            const double angle =
                b < count ? enc_angles[start + b][static_cast<std::size_t>(d)] : 0.0;
            enc_c_[static_cast<std::size_t>(d) * kChunk + b] = std::cos(0.5 * angle);
            enc_s_[static_cast<std::size_t>(d) * kChunk + b] = std::sin(0.5 * angle);
        }
    }
}

void BatchEvaluator::run_chunk_forward(const ParamSet& params) {
    for (const auto& op : fused_) {
        if (op.kind == FusedOp::Kind::Cnot) {
            // permute logical rows instead of moving amplitudes
            const int tbit = 1 << op.target;
            const int cbit = 1 << op.control;
            for (int base = 0; base < dim_; base += 2 * tbit) {
                for (int i = base; i < base + tbit; ++i) {
                    if (i & cbit) {
                        std::swap(perm_[static_cast<std::size_t>(i)],
                                  perm_[static_cast<std::size_t>(i + tbit)]);
                    }
                }
            }
            continue;
        }
        const int tbit = 1 << op.target;
        Su2 u{};
        if (op.kind == FusedOp::Kind::Su2) {
            const auto p = static_cast<std::size_t>(op.param_base);
            u = Su2::from_angles(params.angles[p], params.angles[p + 1], params.angles[p + 2]);
        }
        const double* ec = &enc_c_[static_cast<std::size_t>(std::max(op.variable, 0)) * kChunk];
        const double* es = &enc_s_[static_cast<std::size_t>(std::max(op.variable, 0)) * kChunk];
        for (int base = 0; base < dim_; base += 2 * tbit) {
            for (int i = base; i < base + tbit; ++i) {
                const auto row0 = static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)]) * kChunk;
                const auto row1 =
                    static_cast<std::size_t>(perm_[static_cast<std::size_t>(i + tbit)]) * kChunk;
                if (op.kind == FusedOp::Kind::Encode) {
                    rx_rows_per_sample(&re_[row0], &im_[row0], &re_[row1], &im_[row1], ec, es);
                } else {
                    su2_rows(&re_[row0], &im_[row0], &re_[row1], &im_[row1], u);
                }
            }
        }
    }
}

void BatchEvaluator::forward(const ParamSet& params,
                             std::span<const std::array<double, 2>> enc_angles,
                             std::span<double> z_out) {
    params.check_shape(ansatz_);
    if (z_out.size() != enc_angles.size()) {
        throw std::invalid_argument("output span size mismatch");
    }
    const int mbit = 1 << ansatz_.measured_qubit;
    const std::size_t n = enc_angles.size();
    for (std::size_t start = 0; start < n; start += kChunk) {
        const int count = static_cast<int>(std::min<std::size_t>(kChunk, n - start));
        load_chunk(enc_angles, start, count);
        run_chunk_forward(params);
        for (int b = 0; b < count; ++b) {
            double z = 0.0;
            for (int amp = 0; amp < dim_; ++amp) {
                const auto row = static_cast<std::size_t>(perm_[static_cast<std::size_t>(amp)]) * kChunk;
                const double p = re_[row + b] * re_[row + b] + im_[row + b] * im_[row + b];
                z += (amp & mbit) ? -p : p;
            }
            z_out[start + b] = z;
        }
    }
}

void BatchEvaluator::chunk_grad(const ParamSet& params, std::span<double> grad) {
    // lambda = weight * Z_measured * psi, built on the physical rows
    const int mbit = 1 << ansatz_.measured_qubit;
    for (int amp = 0; amp < dim_; ++amp) {
        const double sign = (amp & mbit) ? -1.0 : 1.0;
        const auto row = static_cast<std::size_t>(perm_[static_cast<std::size_t>(amp)]) * kChunk;
        for (int b = 0; b < kChunk; ++b) {
            lre_[row + b] = sign * weights_[b] * re_[row + b];
            lim_[row + b] = sign * weights_[b] * im_[row + b];
        }
    }

    for (auto it = fused_.rbegin(); it != fused_.rend(); ++it) {
        const FusedOp& op = *it;
        if (op.kind == FusedOp::Kind::Cnot) {
            const int tbit = 1 << op.target;
            const int cbit = 1 << op.control;
            for (int base = 0; base < dim_; base += 2 * tbit) {
                for (int i = base; i < base + tbit; ++i) {
                    if (i & cbit) {
                        std::swap(perm_[static_cast<std::size_t>(i)],
                                  perm_[static_cast<std::size_t>(i + tbit)]);
                    }
                }
            }
            continue;
        }
        const int tbit = 1 << op.target;
        if (op.kind == FusedOp::Kind::Encode) {
            // not differentiated; rewind both states with the inverse rotation
            const double* ec = &enc_c_[static_cast<std::size_t>(op.variable) * kChunk];
            const double* es = &enc_s_[static_cast<std::size_t>(op.variable) * kChunk];
            double ns[kChunk];
            for (int b = 0; b < kChunk; ++b) ns[b] = -es[b];
            for (int base = 0; base < dim_; base += 2 * tbit) {
                for (int i = base; i < base + tbit; ++i) {
                    const auto row0 =
                        static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)]) * kChunk;
                    const auto row1 =
                        static_cast<std::size_t>(perm_[static_cast<std::size_t>(i + tbit)]) * kChunk;
                    rx_rows_per_sample(&re_[row0], &im_[row0], &re_[row1], &im_[row1], ec, ns);
                    rx_rows_per_sample(&lre_[row0], &lim_[row0], &lre_[row1], &lim_[row1], ec, ns);
                }
            }
            continue;
        }

        // Fused SU(2) block: the three generator overlaps and both rewinds in
        // one pass over the pair rows.
        //   d/da2: Z overlap on the post-gate states
        //   d/da1: RZ(a2)-sandwiched Y overlap, Re(e^{+i a2} l1* p0) - Re(e^{-i a2} l0* p1)
        //   d/da0: Z overlap on the rewound states
        const auto p = static_cast<std::size_t>(op.param_base);
        const double a2 = params.angles[p + 2];
        const Su2 u = Su2::from_angles(params.angles[p], params.angles[p + 1], a2);
        const Su2 ud = u.dagger();
        const double c2 = std::cos(a2), s2 = std::sin(a2);
        double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0;
        for (int base = 0; base < dim_; base += 2 * tbit) {
            for (int i = base; i < base + tbit; ++i) {
                const auto row0 =
                    static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)]) * kChunk;
                const auto row1 =
                    static_cast<std::size_t>(perm_[static_cast<std::size_t>(i + tbit)]) * kChunk;
                double* __restrict pr0 = &re_[row0];
                double* __restrict pi0 = &im_[row0];
                double* __restrict pr1 = &re_[row1];
                double* __restrict pi1 = &im_[row1];
                double* __restrict qr0 = &lre_[row0];
                double* __restrict qi0 = &lim_[row0];
                double* __restrict qr1 = &lre_[row1];
                double* __restrict qi1 = &lim_[row1];
                for (int b = 0; b < kChunk; ++b) {
                    const double xr0 = pr0[b], xi0 = pi0[b], xr1 = pr1[b], xi1 = pi1[b];
                    const double yr0 = qr0[b], yi0 = qi0[b], yr1 = qr1[b], yi1 = qi1[b];
                    // a2: Im(l0* p0) - Im(l1* p1)
                    acc2 += yr0 * xi0 - yi0 * xr0 - (yr1 * xi1 - yi1 * xr1);
                    // a1: w1 = l1* p0, w2 = l0* p1
                    const double w1r = yr1 * xr0 + yi1 * xi0;
                    const double w1i = yr1 * xi0 - yi1 * xr0;
                    const double w2r = yr0 * xr1 + yi0 * xi1;
                    const double w2i = yr0 * xi1 - yi0 * xr1;
                    acc1 += c2 * (w1r - w2r) - s2 * (w1i + w2i);
                    // rewind psi and lambda with U^dag
                    const double nr0 = ud.u00r * xr0 - ud.u00i * xi0 + ud.u01r * xr1 - ud.u01i * xi1;
                    const double ni0 = ud.u00r * xi0 + ud.u00i * xr0 + ud.u01r * xi1 + ud.u01i * xr1;
                    const double nr1 = ud.u10r * xr0 - ud.u10i * xi0 + ud.u11r * xr1 - ud.u11i * xi1;
                    const double ni1 = ud.u10r * xi0 + ud.u10i * xr0 + ud.u11r * xi1 + ud.u11i * xr1;
                    const double mr0 = ud.u00r * yr0 - ud.u00i * yi0 + ud.u01r * yr1 - ud.u01i * yi1;
                    const double mi0 = ud.u00r * yi0 + ud.u00i * yr0 + ud.u01r * yi1 + ud.u01i * yr1;
                    const double mr1 = ud.u10r * yr0 - ud.u10i * yi0 + ud.u11r * yr1 - ud.u11i * yi1;
                    const double mi1 = ud.u10r * yi0 + ud.u10i * yr0 + ud.u11r * yi1 + ud.u11i * yr1;
                    pr0[b] = nr0;
                    pi0[b] = ni0;
                    pr1[b] = nr1;
                    pi1[b] = ni1;
                    qr0[b] = mr0;
                    qi0[b] = mi0;
                    qr1[b] = mr1;
                    qi1[b] = mi1;
                    // a0: Z overlap on the rewound pair
                    acc0 += mr0 * ni0 - mi0 * nr0 - (mr1 * ni1 - mi1 * nr1);
                }
            }
        }
        grad[p] += acc0;
        grad[p + 1] += acc1;
        grad[p + 2] += acc2;
    }
}

double BatchEvaluator::loss_and_gradient(const ParamSet& params,
                                         std::span<const std::array<double, 2>> enc_angles,
                                         std::span<const double> targets, double out_scale,
                                         double out_offset, std::span<double> grad_out) {
    params.check_shape(ansatz_);
    if (targets.size() != enc_angles.size()) {
        throw std::invalid_argument("targets size mismatch");
    }
    if (grad_out.size() != static_cast<std::size_t>(ansatz_.total_params())) {
        throw std::invalid_argument("gradient span size mismatch");
    }
    std::fill(grad_out.begin(), grad_out.end(), 0.0);

    const int mbit = 1 << ansatz_.measured_qubit;
    const std::size_t n = enc_angles.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    double loss = 0.0;

    for (std::size_t start = 0; start < n; start += kChunk) {
        const int count = static_cast<int>(std::min<std::size_t>(kChunk, n - start));
        load_chunk(enc_angles, start, count);
        run_chunk_forward(params);

        for (int b = 0; b < kChunk; ++b) weights_[b] = 0.0;
        for (int b = 0; b < count; ++b) {
            double z = 0.0;
            for (int amp = 0; amp < dim_; ++amp) {
                const auto row = static_cast<std::size_t>(perm_[static_cast<std::size_t>(amp)]) * kChunk;
                const double p = re_[row + b] * re_[row + b] + im_[row + b] * im_[row + b];
                z += (amp & mbit) ? -p : p;
            }
            const double residual = out_offset + out_scale * z - targets[start + b];
            loss += residual * residual * inv_n;
            weights_[b] = 2.0 * inv_n * out_scale * residual;
        }
        chunk_grad(params, grad_out);
    }
    return loss;
}

double forward(const QnnModel& model, std::array<double, 2> input) {
    for (double x : input) {
        if (!(x >= 0.0 && x < 1.0)) {
            throw std::domain_error("model input outside the unit box [0,1)^2");
        }
    }
    return forward_angles(model, {model.input_scale[0] * input[0],
                                  model.input_scale[1] * input[1]});
}

double forward_angles(const QnnModel& model, std::array<double, 2> encoded_angles) {
    BatchEvaluator eval(model.ansatz);
    double z = 0.0;
    std::array<std::array<double, 2>, 1> in{encoded_angles};
    eval.forward(model.params, std::span<const std::array<double, 2>>(in.data(), 1),
                 std::span<double>(&z, 1));
    return model.output_offset + model.output_scale * z;
}

double mse_loss(const QnnModel& model, const Dataset& data) {
    data.validate();
    BatchEvaluator eval(model.ansatz);
    std::vector<std::array<double, 2>> angles(data.points.size());
    for (std::size_t i = 0; i < data.points.size(); ++i) {
        angles[i] = {model.input_scale[0] * data.points[i][0],
                     model.input_scale[1] * data.points[i][1]};
    }
    std::vector<double> z(angles.size());
    eval.forward(model.params, angles, z);
    double loss = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double r = model.output_offset + model.output_scale * z[i] - data.targets[i];
        loss += r * r;
    }
    return loss / static_cast<double>(z.size());
}

std::vector<double> parameter_shift_gradient(const QnnModel& model, const Dataset& data) {
    data.validate();
    const int n_params = model.ansatz.total_params();
    BatchEvaluator eval(model.ansatz);

    std::vector<std::array<double, 2>> angles(data.points.size());
    for (std::size_t i = 0; i < data.points.size(); ++i) {
        angles[i] = {model.input_scale[0] * data.points[i][0],
                     model.input_scale[1] * data.points[i][1]};
    }
    const std::size_t n = angles.size();
    std::vector<double> z_base(n), z_plus(n), z_minus(n);
    eval.forward(model.params, angles, z_base);

    std::vector<double> grad(static_cast<std::size_t>(n_params), 0.0);
    ParamSet shifted = model.params;
    const double half_pi = 0.5 * std::numbers::pi;
    for (int p = 0; p < n_params; ++p) {
        const double original = shifted.angles[static_cast<std::size_t>(p)];
        shifted.angles[static_cast<std::size_t>(p)] = original + half_pi;
        eval.forward(shifted, angles, z_plus);
        shifted.angles[static_cast<std::size_t>(p)] = original - half_pi;
        eval.forward(shifted, angles, z_minus);
        shifted.angles[static_cast<std::size_t>(p)] = original;

        double g = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double residual =
                model.output_offset + model.output_scale * z_base[i] - data.targets[i];
            const double dz = 0.5 * (z_plus[i] - z_minus[i]);
            g += 2.0 * residual * model.output_scale * dz;
        }
        grad[static_cast<std::size_t>(p)] = g / static_cast<double>(n);
    }
    return grad;
}

std::vector<double> adjoint_gradient(const QnnModel& model, const Dataset& data,
                                     double* loss_out) {
    data.validate();
    BatchEvaluator eval(model.ansatz);
    std::vector<std::array<double, 2>> angles(data.points.size());
    for (std::size_t i = 0; i < data.points.size(); ++i) {
        angles[i] = {model.input_scale[0] * data.points[i][0],
                     model.input_scale[1] * data.points[i][1]};
    }
    std::vector<double> grad(static_cast<std::size_t>(model.ansatz.total_params()), 0.0);
    const double loss = eval.loss_and_gradient(model.params, angles, data.targets,
                                               model.output_scale, model.output_offset, grad);
    if (loss_out != nullptr) *loss_out = loss;
    return grad;
}

void prepare_output_scaling(QnnModel& model, const Dataset& data, double margin) {
    data.validate();
    if (!(margin > 0.0 && margin <= 1.0)) throw std::invalid_argument("margin must be in (0, 1]");
    const auto [lo_it, hi_it] = std::minmax_element(data.targets.begin(), data.targets.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi == lo) {
        // constant targets are exactly representable by the offset alone
        model.output_scale = 0.0;
        model.output_offset = lo;
        return;
    }
    model.output_scale = (hi - lo) / (2.0 * margin);
    model.output_offset = 0.5 * (hi + lo);
}

TrainResult train(const QnnModel& init, const Dataset& data, const TrainConfig& cfg) {
    data.validate();
    init.ansatz.validate();
    init.params.check_shape(init.ansatz);
    if (cfg.max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    if (!(cfg.step_size > 0.0)) throw std::invalid_argument("step_size must be > 0");
    if (cfg.restarts < 1) throw std::invalid_argument("restarts must be >= 1");

    BatchEvaluator eval(init.ansatz);
    std::vector<std::array<double, 2>> angles(data.points.size());
    for (std::size_t i = 0; i < data.points.size(); ++i) {
        angles[i] = {init.input_scale[0] * data.points[i][0],
                     init.input_scale[1] * data.points[i][1]};
    }

    const auto n_params = static_cast<std::size_t>(init.ansatz.total_params());
    TrainResult best;
    best.final_loss = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < cfg.restarts; ++restart) {
        ParamSet theta = restart == 0
                             ? init.params
                             : ParamSet::random(init.ansatz,
                                                rng::mix(cfg.seed, static_cast<std::uint64_t>(restart)));
        std::vector<double> m(n_params, 0.0), v(n_params, 0.0), grad(n_params, 0.0);
        std::vector<double> history;
        history.reserve(static_cast<std::size_t>(cfg.max_steps));

        ParamSet run_best = theta;
        double run_best_loss = std::numeric_limits<double>::infinity();

        for (long long step = 1; step <= cfg.max_steps; ++step) {
            const double loss = eval.loss_and_gradient(theta, angles, data.targets,
                                                       init.output_scale, init.output_offset, grad);
            if (!std::isfinite(loss)) {
                throw std::runtime_error("training loss became non-finite at step " +
                                         std::to_string(step) + " (restart " +
                                         std::to_string(restart) + ")");
            }
            history.push_back(loss);
            if (loss < run_best_loss) {
                run_best_loss = loss;
                run_best = theta;
            }
            const double b1t = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
            const double b2t = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
            for (std::size_t p = 0; p < n_params; ++p) {
                m[p] = cfg.beta1 * m[p] + (1.0 - cfg.beta1) * grad[p];
                v[p] = cfg.beta2 * v[p] + (1.0 - cfg.beta2) * grad[p] * grad[p];
                const double m_hat = m[p] / b1t;
                const double v_hat = v[p] / b2t;
                theta.angles[p] -= cfg.step_size * m_hat / (std::sqrt(v_hat) + cfg.epsilon_adam);
            }
        }

        if (run_best_loss < best.final_loss) {
            best.final_loss = run_best_loss;
            best.model = init;
            best.model.params = run_best;
            best.loss_history = std::move(history);
            best.best_restart = restart;
        }
    }
    return best;
}

}  // namespace qfiae::vqc
