#include "qfiae/iqae.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qfiae/rng.hpp"

namespace qfiae::iqae {

namespace {

constexpr double kPi = std::numbers::pi;

void check_config(const IqaeConfig& cfg) {
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 0.5)) {
        throw std::invalid_argument("epsilon must be in (0, 0.5)");
    }
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
        throw std::invalid_argument("alpha must be in (0, 1)");
    }
    if (cfg.mode == Mode::ShotBased && cfg.shots < 1) {
        throw std::invalid_argument("shot mode requires shots >= 1");
    }
    if (cfg.max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
}

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// Largest K = 4k + 2 such that the scaled interval [K th_lo, K th_hi] stays
// inside one half-circle [m pi, (m+1) pi], requiring at least a factor-2 jump
// over the current K. Returns the current k when no such K exists.
std::pair<long long, bool> find_next_k(long long k, double th_lo, double th_hi, bool up) {
    constexpr double growth = 2.0;
    const double width = th_hi - th_lo;
    if (width <= 0.0) return {k, up};
    const double k_max_f = std::min(kPi / width, 9.0e14);
    auto k_max = static_cast<long long>(k_max_f);
    if (k_max < 2) return {k, up};
    long long grover_k_scaled = k_max - ((k_max - 2) % 4);
    const long long current = 4 * k + 2;
    for (long long K = grover_k_scaled; K >= growth * current; K -= 4) {
        const double m = std::floor(static_cast<double>(K) * th_lo / kPi);
        if (static_cast<double>(K) * th_hi <= (m + 1.0) * kPi) {
            return {(K - 2) / 4, (static_cast<long long>(m) % 2) == 0};
        }
    }
    return {k, up};
}

double sinc(double z) { return z == 0.0 ? 1.0 : std::sin(z) / z; }

std::uint64_t term_seed_key(int w1, int w2) {
    return (static_cast<std::uint64_t>(w1 + 128) << 16) | static_cast<std::uint64_t>(w2 + 128);
}

}  // namespace

AmplitudeProblem make_bernoulli_problem(double a) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("amplitude must be in [0, 1]");
    AmplitudeProblem p;
    p.prep = statevec::Circuit(1);
    p.prep.add(statevec::ry(0, 2.0 * std::asin(std::sqrt(a))));
    p.ancilla = 0;
    p.grid_bits = {0, 0};
    p.true_target = a;
    return p;
}

AmplitudeProblem build_sinusoid_loader(double amplitude, std::array<int, 2> omega,
                                       double phase, std::array<int, 2> grid_bits,
                                       const Box2& domain) {
    if (!std::isfinite(amplitude) || amplitude < 0.0) {
        throw std::invalid_argument("term amplitude must be finite and >= 0");
    }
    for (int d = 0; d < 2; ++d) {
        if (grid_bits[d] < 0) throw std::invalid_argument("grid_bits must be >= 0");
        if (grid_bits[d] == 0 && omega[d] != 0) {
            throw std::invalid_argument("zero grid bits on a dimension with nonzero frequency");
        }
    }
    const int n = grid_bits[0] + grid_bits[1] + 1;
    if (n > statevec::kMaxQubits) throw std::invalid_argument("grid_bits exceed the qubit cap");

    AmplitudeProblem p;
    p.grid_bits = grid_bits;
    p.domain = domain;
    p.ancilla = grid_bits[0] + grid_bits[1];
    p.prep = statevec::Circuit(n);

    for (int q = 0; q < p.ancilla; ++q) p.prep.add(statevec::h(q));

    // All ancilla rotations commute; the total angle for cell (i1, i2) is
    // w . x_midpoint + phase + pi, linear in the grid bits.
    const std::array<double, 2> lo{domain.a1, domain.a2};
    const std::array<double, 2> hi{domain.b1, domain.b2};
    double base = phase + kPi;
    int qubit = 0;
    for (int d = 0; d < 2; ++d) {
        const double cells = static_cast<double>(1 << grid_bits[d]);
        const double delta = (hi[d] - lo[d]) / cells;
        base += omega[d] * (lo[d] + 0.5 * delta);
        for (int j = 0; j < grid_bits[d]; ++j) {
            const double angle = omega[d] * delta * static_cast<double>(1 << j);
            if (angle != 0.0) p.prep.add(statevec::cry(qubit + j, p.ancilla, angle));
        }
        qubit += grid_bits[d];
    }
    p.prep.add(statevec::ry(p.ancilla, base));
    return p;
}

statevec::Circuit grover_operator(const AmplitudeProblem& problem) {
    const int n = problem.prep.n_qubits;
    std::vector<int> all(n);
    for (int q = 0; q < n; ++q) all[q] = q;

    statevec::Circuit grover(n);
    grover.add(statevec::z(problem.ancilla));  // S_good
    grover.append(statevec::inverse(problem.prep));
    for (int q = 0; q < n; ++q) grover.add(statevec::x(q));
    grover.add(statevec::mcz(all));  // with the X conjugation: reflection about |0...0>
    for (int q = 0; q < n; ++q) grover.add(statevec::x(q));
    grover.append(problem.prep);
    return grover;
}

IqaeResult iqae_run(const AmplitudeProblem& problem, const IqaeConfig& cfg) {
    check_config(cfg);

    // Distinct-K budget: K at least doubles each time it changes, ending near
    // pi / (4 eps), so T rounds of confidence alpha / T keep the union bound.
    const int t_budget = std::max(1, static_cast<int>(std::ceil(std::log2(kPi / (8.0 * cfg.epsilon)))));
    const double alpha_round = cfg.alpha / t_budget;

    const statevec::Circuit grover = grover_operator(problem);
    statevec::StateVector state = statevec::run(problem.prep, statevec::StateVector(problem.prep.n_qubits));
    long long k_applied = 0;

    double th_lo = 0.0, th_hi = 0.5 * kPi;
    long long k = 0;
    bool up = true;
    long long ones_at_k = 0, shots_at_k = 0;

    IqaeResult res;
    while (res.rounds < cfg.max_rounds) {
        const double a_lo = std::sin(th_lo) * std::sin(th_lo);
        const double a_hi = std::sin(th_hi) * std::sin(th_hi);
        if (0.5 * (a_hi - a_lo) <= cfg.epsilon) {
            res.converged = true;
            break;
        }
        ++res.rounds;

        const auto [k_new, up_new] = find_next_k(k, th_lo, th_hi, up);
        up = up_new;
        if (k_new != k) {
            k = k_new;
            ones_at_k = 0;
            shots_at_k = 0;
        }
        while (k_applied < k) {
            state = statevec::run(grover, state);
            ++k_applied;
        }

        const double p_exact = statevec::probability_one(state, problem.ancilla);
        double p_hat, p_lo, p_hi;
        if (cfg.mode == Mode::ExactExpectation) {
            p_hat = p_lo = p_hi = p_exact;
            res.oracle_queries += 2 * k + 1;
        } else {
            // No-overshoot guard: once the Grover power over-resolves the
            // target, the Chernoff bound needs far fewer samples than the full
            // per-round budget. Undershooting is safe: the next round stays at
            // the same k and aggregates more shots.
            long long round_shots = cfg.shots;
            {
                const double scale_k = static_cast<double>(4 * k + 2);
                const double th_mid = 0.5 * (th_lo + th_hi);
                const double slope_a = std::abs(std::sin(2.0 * th_mid));
                const double slope_p = std::abs(std::sin(scale_k * th_mid));
                if (slope_a > 1e-12 && slope_p > 1e-12) {
                    const double eps_p_needed =
                        cfg.epsilon * scale_k * slope_p / (2.0 * slope_a);
                    const double n_needed =
                        std::log(2.0 / alpha_round) / (2.0 * eps_p_needed * eps_p_needed);
                    round_shots = std::min<long long>(
                        cfg.shots,
                        std::max<long long>(32, static_cast<long long>(std::llround(1.3 * n_needed))));
                }
            }
            const std::uint64_t round_seed = rng::mix(cfg.seed, static_cast<std::uint64_t>(res.rounds));
            ones_at_k += statevec::sample(state, problem.ancilla, round_shots, round_seed);
            shots_at_k += round_shots;
            p_hat = static_cast<double>(ones_at_k) / static_cast<double>(shots_at_k);
            const double eps_p =
                std::sqrt(std::log(2.0 / alpha_round) / (2.0 * static_cast<double>(shots_at_k)));
            p_lo = std::max(0.0, p_hat - eps_p);
            p_hi = std::min(1.0, p_hat + eps_p);
            res.oracle_queries += round_shots * (2 * k + 1);
        }

        // Invert p = (1 - cos(K theta)) / 2 inside the known half-circle.
        const double scale = static_cast<double>(4 * k + 2);
        const auto sector = static_cast<long long>(std::floor(scale * 0.5 * (th_lo + th_hi) / kPi));
        double x_lo, x_hi;
        if (sector % 2 == 0) {
            x_lo = sector * kPi + std::acos(clamp_unit(1.0 - 2.0 * p_lo));
            x_hi = sector * kPi + std::acos(clamp_unit(1.0 - 2.0 * p_hi));
        } else {
            x_lo = (sector + 1) * kPi - std::acos(clamp_unit(1.0 - 2.0 * p_hi));
            x_hi = (sector + 1) * kPi - std::acos(clamp_unit(1.0 - 2.0 * p_lo));
        }
        th_lo = std::max(th_lo, x_lo / scale);
        th_hi = std::min(th_hi, x_hi / scale);
        if (th_hi < th_lo) {
            const double mid = 0.5 * (th_lo + th_hi);
            th_lo = th_hi = mid;
        }
        res.round_log.push_back({k, p_hat, th_lo, th_hi});
    }

    res.a_lo = std::sin(th_lo) * std::sin(th_lo);
    res.a_hi = std::sin(th_hi) * std::sin(th_hi);
    res.a_hat = 0.5 * (res.a_lo + res.a_hi);
    if (!res.converged) {
        res.converged = 0.5 * (res.a_hi - res.a_lo) <= cfg.epsilon;
    }
    return res;
}

TermEstimate integrate_term(double amplitude, std::array<int, 2> omega, double phase,
                            const Box2& box, std::array<int, 2> grid_bits,
                            const IqaeConfig& cfg) {
    const std::array<double, 2> len{box.b1 - box.a1, box.b2 - box.a2};
    double sinc_total = 1.0;
    for (int d = 0; d < 2; ++d) {
        const double delta = len[d] / static_cast<double>(1 << grid_bits[d]);
        sinc_total *= sinc(0.5 * omega[d] * delta);
    }
    if (std::abs(sinc_total) < 0.1) {
        throw SincIllConditioned("sinc correction factor " + std::to_string(sinc_total) +
                                 " below 0.1 for frequency (" + std::to_string(omega[0]) + ", " +
                                 std::to_string(omega[1]) + "); increase grid_bits");
    }

    const AmplitudeProblem problem = build_sinusoid_loader(amplitude, omega, phase, grid_bits, box);

    TermEstimate out;
    out.sinc_factor = sinc_total;
    out.iqae = iqae_run(problem, cfg);

    // midpoint sum of cos over the box is V (2a - 1); the sinc factor converts
    // it to the exact integral of the sinusoid
    const double factor = amplitude * box.volume() * sinc_total;
    out.estimate = factor * (2.0 * out.iqae.a_hat - 1.0);
    out.half_width = std::abs(factor) * (out.iqae.a_hi - out.iqae.a_lo);
    return out;
}

SeriesIntegral integrate_series(const fourier::FourierSeries2D& series, const Box2& box,
                                std::array<int, 2> grid_bits, const IqaeConfig& cfg) {
    const fourier::TermList list = fourier::real_term_list(series);

    SeriesIntegral out;
    out.total = list.constant * box.volume();
    {
        TermReport row;
        row.amplitude = std::abs(list.constant);
        row.phase = list.constant >= 0.0 ? 0.0 : kPi;
        row.a_hat = 0.5 * (1.0 + std::cos(row.phase));
        row.ci_lo = row.ci_hi = row.a_hat;
        row.contribution = list.constant * box.volume();
        out.terms.push_back(row);
    }

    double max_amp = 0.0;
    for (const auto& t : list.terms) max_amp = std::max(max_amp, t.amplitude);

    double sum_sq = 0.0;
    for (const auto& t : list.terms) {
        TermReport row;
        row.w1 = t.w1;
        row.w2 = t.w2;
        row.amplitude = t.amplitude;
        row.phase = t.phase;
        if (t.amplitude == 0.0 || t.amplitude < 1e-6 * max_amp) {
            row.skipped = true;
            out.terms.push_back(row);
            continue;
        }
        IqaeConfig term_cfg = cfg;
        term_cfg.seed = rng::mix(cfg.seed, term_seed_key(t.w1, t.w2));
        try {
            const TermEstimate est =
                integrate_term(t.amplitude, {t.w1, t.w2}, t.phase, box, grid_bits, term_cfg);
            row.a_hat = est.iqae.a_hat;
            row.ci_lo = est.iqae.a_lo;
            row.ci_hi = est.iqae.a_hi;
            row.queries = est.iqae.oracle_queries;
            row.rounds = est.iqae.rounds;
            row.sinc_factor = est.sinc_factor;
            row.contribution = est.estimate;
            row.half_width = est.half_width;
            out.total += est.estimate;
            out.total_queries += est.iqae.oracle_queries;
            sum_sq += est.half_width * est.half_width;
            out.all_converged = out.all_converged && est.iqae.converged;
        } catch (const SincIllConditioned&) {
            row.ill_conditioned = true;
            row.skipped = true;
            out.any_ill_conditioned = true;
            out.all_converged = false;
        }
        out.terms.push_back(row);
    }
    out.half_width = std::sqrt(sum_sq);
    return out;
}

}  // namespace qfiae::iqae
