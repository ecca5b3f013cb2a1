#include "qfiae/ltd.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace qfiae::ltd {

namespace {

constexpr double kPi = std::numbers::pi;

struct ProcessEntry {
    ResidueFn residue_456_fn;
    ResidueFn residue_1356_fn;
};

std::map<std::string, ProcessEntry>& registry() {
    static std::map<std::string, ProcessEntry> entries{
        {"phi", ProcessEntry{&residue_456, &residue_1356}},
    };
    return entries;
}

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

const ProcessEntry& lookup(const std::string& name) {
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto it = registry().find(name);
    if (it == registry().end()) {
        throw std::invalid_argument("unknown process '" + name + "'");
    }
    return it->second;
}

// Guarded inverse of a causal denominator.
class LambdaGuard {
public:
    explicit LambdaGuard(double sqrt_s) : band_(1e-12 * sqrt_s) {}
    double inv(double value, const char* index_set) const {
        if (std::abs(value) <= band_) {
            throw ThresholdError(index_set, value);
        }
        return 1.0 / value;
    }

private:
    double band_;
};

double energy(double momentum, double mass) {
    return std::sqrt(momentum * momentum + mass * mass);
}

// The cubic vertices of the scalar model are mass-proportional (as the Yukawa
// couplings of the sibling quark processes are), so the squared amplitude
// carries (2m / sqrt_s)^2 on top of the configurable g^(1) factor. This makes
// the rate vanish exactly in the massless limit and rise over the mass scan.
double phi_vertex_factor(const ProcessSpec& spec) {
    return spec.coupling * spec.mass_ratio * spec.mass_ratio;
}

// Partner of an index-set relabeling (5<->2, 4<->3): evaluating the relabeled
// residues and deltas equals evaluating the originals with the masses of
// slots 2..5 reversed, after the l1 <-> l2 change of variables.
ProcessSpec partner_spec(const ProcessSpec& spec) {
    ProcessSpec p = spec;
    std::swap(p.masses[1], p.masses[4]);
    std::swap(p.masses[2], p.masses[3]);
    return p;
}

// One delta-resolved half of the integrand at fixed (l1, v): the two-body
// term plus, when open, the three-body term, each with its l2^2 weight,
// Jacobian and the 2 pi of the delta.
double resolved_terms(double l1, double v, const ProcessSpec& spec, const ProcessEntry& entry,
                      bool two_body_only, bool three_body_only) {
    double sum = 0.0;

    if (!three_body_only) {
        const DeltaRoot two = resolve_two_body(spec);
        const Kinematics kin{l1, two.l2_star, v, spec.sqrt_s, spec.masses};
        const OnShellEnergies e = on_shell_energies(kin);
        sum += l1 * l1 * two.l2_star * two.l2_star * (2.0 * kPi) * two.jacobian *
               entry.residue_456_fn(e, spec);
    }
    if (!two_body_only) {
        if (const auto three = resolve_three_body(l1, v, spec)) {
            const Kinematics kin{l1, three->l2_star, v, spec.sqrt_s, spec.masses};
            const OnShellEnergies e = on_shell_energies(kin);
            sum += l1 * l1 * three->l2_star * three->l2_star * (2.0 * kPi) * three->jacobian *
                   entry.residue_1356_fn(e, spec);
        }
    }
    return sum;
}

IntegrandParts integrand_parts_impl(double u1, double u2, const ProcessSpec& spec) {
    if (!(u1 >= 0.0 && u1 < 1.0) || !(u2 >= 0.0 && u2 <= 1.0)) {
        throw std::domain_error("integrand point outside the unit box");
    }
    const ProcessEntry& entry = lookup(spec.process);
    const ProcessSpec swapped = partner_spec(spec);

    const double l1 = spec.sqrt_s * u1 / (1.0 - u1);
    const double map_jacobian = spec.sqrt_s / ((1.0 - u1) * (1.0 - u1));
    const double v = u2;
    const double prefactor =
        map_jacobian / (2.0 * spec.sqrt_s) / (4.0 * kPi * kPi * kPi * kPi);

    IntegrandParts parts;
    parts.two_body = prefactor * (resolved_terms(l1, v, spec, entry, true, false) +
                                  resolved_terms(l1, v, swapped, entry, true, false));
    parts.three_body = prefactor * (resolved_terms(l1, v, spec, entry, false, true) +
                                    resolved_terms(l1, v, swapped, entry, false, true));
    return parts;
}

}  // namespace

ThresholdError::ThresholdError(const std::string& index_set, double value)
    : std::runtime_error("causal denominator lambda_{" + index_set +
                         "} = " + std::to_string(value) + " is inside the threshold guard band"),
      set_(index_set) {}

void register_process(const std::string& name, ResidueFn residue_456_fn, ResidueFn residue_1356_fn) {
    if (!residue_456_fn || !residue_1356_fn) {
        throw std::invalid_argument("both residue functions must be callable");
    }
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto [it, inserted] = registry().emplace(name, ProcessEntry{std::move(residue_456_fn),
                                                                std::move(residue_1356_fn)});
    (void)it;
    if (!inserted) {
        throw std::invalid_argument("process '" + name + "' is already registered");
    }
}

std::vector<std::string> registered_processes() {
    std::lock_guard<std::mutex> lock(registry_mutex());
    std::vector<std::string> names;
    for (const auto& [name, entry] : registry()) names.push_back(name);
    return names;
}

ProcessSpec make_process(const std::string& name, double mass_ratio, double sqrt_s,
                         double coupling) {
    lookup(name);  // unregistered -> error
    if (!(sqrt_s > 0.0)) throw std::invalid_argument("sqrt_s must be > 0");
    if (!(mass_ratio >= 0.0 && mass_ratio < 1.0)) {
        throw std::invalid_argument("mass_ratio must be in [0, 1)");
    }
    ProcessSpec spec;
    spec.process = name;
    spec.sqrt_s = sqrt_s;
    spec.mass_ratio = mass_ratio;
    spec.coupling = coupling;
    const double m = 0.5 * mass_ratio * sqrt_s;
    spec.masses = {0.0, m, m, m, m, sqrt_s};
    return spec;
}

OnShellEnergies on_shell_energies(const Kinematics& kin) {
    if (kin.l1 < 0.0 || kin.l2 < 0.0) throw std::domain_error("loop moduli must be >= 0");
    if (!(kin.v >= 0.0 && kin.v <= 1.0)) throw std::domain_error("v must be in [0, 1]");

    // l3 = 0 in the rest frame: |q2| = |q3| = l1, |q4| = |q5| = l2, |q6| = 0.
    const double cos_theta = 1.0 - 2.0 * kin.v;
    const double q1_sq = std::max(
        0.0, kin.l1 * kin.l1 + kin.l2 * kin.l2 + 2.0 * cos_theta * kin.l1 * kin.l2);

    OnShellEnergies e;
    e[1] = std::sqrt(q1_sq + kin.masses[0] * kin.masses[0]);
    e[2] = energy(kin.l1, kin.masses[1]);
    e[3] = energy(kin.l1, kin.masses[2]);
    e[4] = energy(kin.l2, kin.masses[3]);
    e[5] = energy(kin.l2, kin.masses[4]);
    e[6] = kin.masses[5];
    return e;
}

double causal_lambda(const OnShellEnergies& e, std::span<const int> unbarred,
                     std::span<const int> barred) {
    unsigned seen = 0;
    auto mark = [&seen](int i) {
        if (i < 1 || i > 6) throw std::out_of_range("propagator index must be in 1..6");
        const unsigned bit = 1u << i;
        if (seen & bit) throw std::invalid_argument("overlapping index sets in lambda");
        seen |= bit;
    };
    double sum = 0.0;
    for (int i : unbarred) {
        mark(i);
        sum += e[i];
    }
    for (int i : barred) {
        mark(i);
        sum -= e[i];
    }
    return sum;
}

double residue_456(const OnShellEnergies& e, const ProcessSpec& spec) {
    const LambdaGuard guard(spec.sqrt_s);
    const double x12345 = 32.0 * e[1] * e[2] * e[3] * e[4] * e[5];

    const double inv_l_134b = guard.inv(e[1] + e[3] - e[4], "13~4");
    const double inv_l_23b4b5 = guard.inv(e[2] + e[3] - e[4] - e[5], "23~4~5");
    const double inv_l_125 = guard.inv(e[1] + e[2] + e[5], "125");
    const double inv_l_12b5 = guard.inv(e[1] + e[2] - e[5], "12~5");
    const double inv_l_134 = guard.inv(e[1] + e[3] + e[4], "134");
    const double inv_l_2345 = guard.inv(e[2] + e[3] + e[4] + e[5], "2345");

    // L^i_{j,k} = lambda_i^-1 (lambda_j^-1 + lambda_k^-1). The second term
    // carries lambda_{~2~345} = -lambda_{23~4~5}: the two opposite-sign poles
    // cancel locally at the loop threshold q2+q3 = q4+q5, keeping the
    // delta-resolved integrand finite across that surface.
    const double sum = inv_l_134b * (inv_l_23b4b5 + inv_l_125) +
                       inv_l_12b5 * (-inv_l_23b4b5 + inv_l_134) +
                       inv_l_2345 * (inv_l_134 + inv_l_125);
    return phi_vertex_factor(spec) / x12345 * sum;
}

double residue_1356(const OnShellEnergies& e, const ProcessSpec& spec) {
    const LambdaGuard guard(spec.sqrt_s);
    const double x135 = 8.0 * e[1] * e[3] * e[5];
    const double inv = guard.inv(e[1] + e[3] - e[4], "13~4") *
                       guard.inv(e[1] + e[3] + e[4], "134") *
                       guard.inv(e[1] - e[2] + e[5], "1~25") *
                       guard.inv(e[1] + e[2] + e[5], "125");
    return phi_vertex_factor(spec) / x135 * inv;
}

DeltaRoot resolve_two_body(const ProcessSpec& spec) {
    const double s = spec.sqrt_s * spec.sqrt_s;
    const double m4 = spec.masses[3];
    const double m5 = spec.masses[4];
    if (m4 + m5 >= spec.sqrt_s) {
        throw std::domain_error("two-body channel closed: m4 + m5 >= sqrt_s");
    }
    // q4+ = (s + m4^2 - m5^2) / (2 sqrt_s) at the root of q4+ + q5+ = sqrt_s
    const double e4 = (s + m4 * m4 - m5 * m5) / (2.0 * spec.sqrt_s);
    const double l2 = std::sqrt(std::max(0.0, e4 * e4 - m4 * m4));
    const double e5 = spec.sqrt_s - e4;

    DeltaRoot root;
    root.l2_star = l2;
    root.jacobian = 1.0 / (l2 / e4 + l2 / e5);
    return root;
}

std::optional<DeltaRoot> resolve_three_body(double l1, double v, const ProcessSpec& spec) {
    if (l1 < 0.0) throw std::domain_error("l1 must be >= 0");
    if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("v must be in [0, 1]");
    const double m1 = spec.masses[0];
    const double m3 = spec.masses[2];
    const double m5 = spec.masses[4];
    const double c = 1.0 - 2.0 * v;

    auto lambda_1356 = [&](double l2) {
        const double q1 = std::sqrt(std::max(0.0, l1 * l1 + l2 * l2 + 2.0 * c * l1 * l2 + m1 * m1));
        return q1 + energy(l1, m3) + energy(l2, m5) - spec.sqrt_s;
    };

    // Open iff there is an energy deficit at l2 = 0; lambda is convex in l2,
    // so the up-crossing root is then unique.
    if (lambda_1356(0.0) >= 0.0) return std::nullopt;

    // Isolate the radicals and square twice: quadratic in l2.
    const double e_rem = spec.sqrt_s - energy(l1, m3);
    const double beta = e_rem * e_rem + m5 * m5 - m1 * m1 - l1 * l1;
    const double gamma = 2.0 * c * l1;
    const double qa = gamma * gamma - 4.0 * e_rem * e_rem;
    const double qb = -2.0 * beta * gamma;
    const double qc = beta * beta - 4.0 * e_rem * e_rem * m5 * m5;

    double candidates[2];
    int n_candidates = 0;
    if (qa == 0.0) {
        if (qb != 0.0) candidates[n_candidates++] = -qc / qb;
    } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            // stable quadratic roots
            const double q = -0.5 * (qb + std::copysign(sq, qb));
            candidates[n_candidates++] = q / qa;
            if (q != 0.0) candidates[n_candidates++] = qc / q;
        }
    }

    const double tol = 1e-10 * spec.sqrt_s;
    double best = -1.0, best_residual = tol;
    for (int i = 0; i < n_candidates; ++i) {
        const double l2 = candidates[i];
        if (!(l2 >= 0.0) || !std::isfinite(l2)) continue;
        const double residual = std::abs(lambda_1356(l2));
        if (residual < best_residual) {
            best = l2;
            best_residual = residual;
        }
    }
    if (best < 0.0) return std::nullopt;  // squaring artifacts only; no physical root

    const double q1 = std::sqrt(std::max(0.0, l1 * l1 + best * best + 2.0 * c * l1 * best + m1 * m1));
    const double dlambda = (best + c * l1) / q1 + best / energy(best, m5);

    DeltaRoot root;
    root.l2_star = best;
    root.jacobian = 1.0 / std::abs(dlambda);
    return root;
}

IntegrandParts integrand_parts(double u1, double u2, const ProcessSpec& spec) {
    return integrand_parts_impl(u1, u2, spec);
}

double integrand_2d(double u1, double u2, const ProcessSpec& spec) {
    return integrand_parts_impl(u1, u2, spec).total();
}

}  // namespace qfiae::ltd
