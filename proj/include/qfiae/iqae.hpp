#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qfiae/fourier.hpp"
#include "qfiae/statevec.hpp"

namespace qfiae::iqae {

using fourier::Box2;

enum class Mode { ShotBased, ExactExpectation };

struct IqaeConfig {
    double epsilon = 0.01;  // target half-width on the amplitude
    double alpha = 0.05;    // total confidence-level complement
    int shots = 1000;       // per-round samples (shot mode)
    int max_rounds = 200;
    Mode mode = Mode::ShotBased;
    std::uint64_t seed = 0;
};

struct RoundLog {
    long long k = 0;
    double p_hat = 0.0;
    double theta_lo = 0.0, theta_hi = 0.0;
};

struct IqaeResult {
    double a_hat = 0.0;
    double a_lo = 0.0, a_hi = 0.0;
    long long oracle_queries = 0;
    int rounds = 0;
    bool converged = false;
    std::vector<RoundLog> round_log;
};

// State preparation A on grid qubits plus one ancilla whose one-probability is
// the amplitude being estimated.
struct AmplitudeProblem {
    statevec::Circuit prep;
    int ancilla = 0;
    std::array<int, 2> grid_bits{0, 0};
    Box2 domain{};
    std::optional<double> true_target;  // test fixtures only
};

// Single-qubit problem with amplitude a (RY loader); used for synthetic
// benchmarks of the estimator itself.
AmplitudeProblem make_bernoulli_problem(double a);

// Loader whose ancilla one-probability equals the midpoint average of
// (1 + cos(w . x + phase)) / 2 over the 2^(g1+g2) grid cells of the domain.
// Exact because the ancilla RY angle is linear in the grid bits. `amplitude`
// is applied classically downstream and only recorded for validation.
AmplitudeProblem build_sinusoid_loader(double amplitude, std::array<int, 2> omega,
                                       double phase, std::array<int, 2> grid_bits,
                                       const Box2& domain);

// Q = A S0 A^dag S_good, with S_good = Z on the ancilla and S0 the reflection
// about |0...0>. probability_one(Q^k A |0>) = sin^2((2k+1) theta), theta = asin(sqrt a).
statevec::Circuit grover_operator(const AmplitudeProblem& problem);

IqaeResult iqae_run(const AmplitudeProblem& problem, const IqaeConfig& cfg);

class SincIllConditioned : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TermEstimate {
    double estimate = 0.0;
    double half_width = 0.0;
    double sinc_factor = 1.0;
    IqaeResult iqae;
};

// Integral of amplitude * cos(w . x + phase) over the box: IQAE on the loader,
// midpoint sum via V (2a - 1), then the exact per-dimension sinc correction.
// Throws SincIllConditioned when |prod sinc| < 0.1 (increase grid_bits).
TermEstimate integrate_term(double amplitude, std::array<int, 2> omega, double phase,
                            const Box2& box, std::array<int, 2> grid_bits,
                            const IqaeConfig& cfg);

struct TermReport {
    int w1 = 0, w2 = 0;
    double amplitude = 0.0, phase = 0.0;
    double a_hat = 0.0, ci_lo = 0.0, ci_hi = 0.0;
    long long queries = 0;
    int rounds = 0;
    double sinc_factor = 1.0;
    bool skipped = false;
    bool ill_conditioned = false;
    double contribution = 0.0;
    double half_width = 0.0;
};

struct SeriesIntegral {
    double total = 0.0;
    double half_width = 0.0;  // root-sum-square of per-term half-widths
    long long total_queries = 0;
    bool all_converged = true;
    bool any_ill_conditioned = false;
    std::vector<TermReport> terms;
};

// Folds the series into real sinusoids and integrates each by IQAE; the
// constant term is integrated in closed form. Terms with amplitude below
// 1e-6 * max amplitude are skipped and reported. Per-term seeds are derived
// from cfg.seed and the term frequency, so results do not depend on
// evaluation order.
SeriesIntegral integrate_series(const fourier::FourierSeries2D& series, const Box2& box,
                                std::array<int, 2> grid_bits, const IqaeConfig& cfg);

}  // namespace qfiae::iqae
