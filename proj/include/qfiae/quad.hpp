#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace qfiae::quad {

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long long evaluations = 0;
};

using Fn2D = std::function<double(double, double)>;

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

// Tensor Gauss-Legendre over panels x panels sub-boxes of [0,1]^2.
// error_estimate = |value(panels) - value(panels/2)| (order/2 when panels == 1).
// Throws std::runtime_error with coordinates if f returns a non-finite value.
QuadResult gauss_2d(const Fn2D& f, int order, int panels);

// Seeded Monte Carlo over [0,1]^2: mean with standard-error estimate.
QuadResult monte_carlo_2d(const Fn2D& f, long long samples, std::uint64_t seed);

}  // namespace qfiae::quad
