#include "qfiae/quad.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qfiae/rng.hpp"

namespace qfiae::quad {

namespace {

// Neumaier-compensated accumulation; keeps fixed-order reductions accurate.
struct Accumulator {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    double total() const { return sum + comp; }
};

double evaluate_checked(const Fn2D& f, double x1, double x2, long long& evals) {
    const double v = f(x1, x2);
    ++evals;
    if (!std::isfinite(v)) {
        throw std::runtime_error("non-finite integrand value at (" + std::to_string(x1) +
                                 ", " + std::to_string(x2) + ")");
    }
    return v;
}

double gauss_pass(const Fn2D& f, const std::vector<double>& nodes,
                  const std::vector<double>& weights, int panels, long long& evals) {
    const double h = 1.0 / panels;
    Accumulator acc;
    for (int p1 = 0; p1 < panels; ++p1) {
        for (int p2 = 0; p2 < panels; ++p2) {
            const double a1 = p1 * h;
            const double a2 = p2 * h;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                const double x1 = a1 + 0.5 * h * (nodes[i] + 1.0);
                for (std::size_t j = 0; j < nodes.size(); ++j) {
                    const double x2 = a2 + 0.5 * h * (nodes[j] + 1.0);
                    acc.add(weights[i] * weights[j] * evaluate_checked(f, x1, x2, evals));
                }
            }
        }
    }
    // each panel maps [-1,1]^2 onto an h x h box
    return acc.total() * 0.25 * h * h;
}

}  // namespace

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    if (order < 1) throw std::invalid_argument("order must be >= 1");
    nodes.assign(order, 0.0);
    weights.assign(order, 0.0);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton iteration from the Chebyshev estimate of the i-th root.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
}

QuadResult gauss_2d(const Fn2D& f, int order, int panels) {
    if (order < 2) throw std::invalid_argument("gauss_2d requires order >= 2");
    if (panels < 1) throw std::invalid_argument("gauss_2d requires panels >= 1");

    std::vector<double> nodes, weights;
    gauss_legendre(order, nodes, weights);

    QuadResult result;
    result.value = gauss_pass(f, nodes, weights, panels, result.evaluations);

    double coarse;
    if (panels > 1) {
        coarse = gauss_pass(f, nodes, weights, panels / 2, result.evaluations);
    } else {
        std::vector<double> cn, cw;
        gauss_legendre(std::max(2, order / 2), cn, cw);
        coarse = gauss_pass(f, cn, cw, 1, result.evaluations);
    }
    result.error_estimate = std::abs(result.value - coarse);
    return result;
}

QuadResult monte_carlo_2d(const Fn2D& f, long long samples, std::uint64_t seed) {
    if (samples < 2) throw std::invalid_argument("monte_carlo_2d requires samples >= 2");
    rng::Stream stream(seed);
    Accumulator sum, sum_sq;
    QuadResult result;
    for (long long i = 0; i < samples; ++i) {
        const double x1 = stream.next_double();
        const double x2 = stream.next_double();
        const double v = evaluate_checked(f, x1, x2, result.evaluations);
        sum.add(v);
        sum_sq.add(v * v);
    }
    const double n = static_cast<double>(samples);
    const double mean = sum.total() / n;
    const double var = std::max(0.0, sum_sq.total() / n - mean * mean);
    result.value = mean;
    result.error_estimate = std::sqrt(var / (n - 1.0));
    return result;
}

}  // namespace qfiae::quad
