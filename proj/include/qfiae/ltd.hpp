#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfiae::ltd {

struct ProcessSpec;

// On-shell energies q_i^(+) = sqrt(q_i^2 + m_i^2) of the six internal lines,
// indexed 1..6 as in the vacuum-diagram labeling; 6 is the decaying particle.
struct OnShellEnergies {
    std::array<double, 6> q_plus{};
    double operator[](int i) const { return q_plus[static_cast<std::size_t>(i - 1)]; }
    double& operator[](int i) { return q_plus[static_cast<std::size_t>(i - 1)]; }
};

using ResidueFn = std::function<double(const OnShellEnergies&, const ProcessSpec&)>;

struct ProcessSpec {
    std::string process = "phi";
    double sqrt_s = 1.0;
    double mass_ratio = 0.0;        // 2m / sqrt(s)
    double coupling = 1.0;          // overall g^(1) m^2 factor, normalized
    std::array<double, 6> masses{}; // m1..m6; m6 = sqrt_s always
};

// Registry of residue pairs addressable by name; "phi" is built in.
void register_process(const std::string& name, ResidueFn residue_456_fn, ResidueFn residue_1356_fn);
std::vector<std::string> registered_processes();

// Builds a ProcessSpec with the default mass assignment m1 = 0,
// m2 = m3 = m4 = m5 = mass_ratio * sqrt_s / 2, m6 = sqrt_s. Throws for an
// unregistered name.
ProcessSpec make_process(const std::string& name, double mass_ratio, double sqrt_s = 1.0,
                         double coupling = 1.0);

struct Kinematics {
    double l1 = 0.0;  // |l_1|
    double l2 = 0.0;  // |l_2|
    double v = 0.0;   // cos(theta) = 1 - 2v, v in [0, 1]
    double sqrt_s = 1.0;
    std::array<double, 6> masses{};
};

OnShellEnergies on_shell_energies(const Kinematics& kin);

// Signed on-shell-energy sum: sum over `unbarred` minus sum over `barred`.
// The sets must be disjoint subsets of {1..6}.
double causal_lambda(const OnShellEnergies& e, std::span<const int> unbarred,
                     std::span<const int> barred = {});

// A causal denominator hit the guard band |lambda| <= 1e-12 sqrt(s); the
// evaluation point sits on an unregulated threshold.
class ThresholdError : public std::runtime_error {
public:
    ThresholdError(const std::string& index_set, double value);
    const std::string& index_set() const { return set_; }

private:
    std::string set_;
};

// One-loop, two-body phase-space residue of the heavy-scalar vacuum amplitude.
double residue_456(const OnShellEnergies& e, const ProcessSpec& spec);
// Tree-level, three-body phase-space residue.
double residue_1356(const OnShellEnergies& e, const ProcessSpec& spec);

struct DeltaRoot {
    double l2_star = 0.0;
    double jacobian = 0.0;  // 1 / |d lambda / d l2| at the root
};

// Root of lambda_{45 bar6}(l2) = 0; throws std::domain_error when the two-body
// channel is closed (m4 + m5 >= sqrt_s).
DeltaRoot resolve_two_body(const ProcessSpec& spec);

// Closed-form root of lambda_{135 bar6}(l2) = 0 at fixed (l1, v); empty when
// the three-body phase space is closed there.
std::optional<DeltaRoot> resolve_three_body(double l1, double v, const ProcessSpec& spec);

struct IntegrandParts {
    double two_body = 0.0;
    double three_body = 0.0;
    double total() const { return two_body + three_body; }
};

// Full mapped integrand on the unit square: u1 -> l1 = sqrt_s u1/(1-u1),
// u2 = v, including measure constants, delta Jacobians, l^2 factors and the
// (5<->2, 4<->3) partner terms.
IntegrandParts integrand_parts(double u1, double u2, const ProcessSpec& spec);
double integrand_2d(double u1, double u2, const ProcessSpec& spec);

}  // namespace qfiae::ltd
