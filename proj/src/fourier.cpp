#include "qfiae/fourier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qfiae::fourier {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_band(const FourierSeries2D& s, int w1, int w2) {
    if (!s.in_band(w1, w2)) throw std::out_of_range("frequency outside series band");
}

// int_a^b exp(i w x) dx
std::complex<double> segment_integral(int w, double a, double b) {
    if (w == 0) return {b - a, 0.0};
    const std::complex<double> iw{0.0, static_cast<double>(w)};
    return (std::exp(iw * b) - std::exp(iw * a)) / iw;
}

}  // namespace

FourierSeries2D FourierSeries2D::zero(int n_max) {
    if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
    FourierSeries2D s;
    s.n_max = n_max;
    s.coeff.assign(static_cast<std::size_t>(s.side()) * s.side(), {0.0, 0.0});
    return s;
}

std::complex<double> FourierSeries2D::at(int w1, int w2) const {
    check_band(*this, w1, w2);
    return coeff[static_cast<std::size_t>(w1 + n_max) * side() + (w2 + n_max)];
}

std::complex<double>& FourierSeries2D::at(int w1, int w2) {
    check_band(*this, w1, w2);
    return coeff[static_cast<std::size_t>(w1 + n_max) * side() + (w2 + n_max)];
}

bool FourierSeries2D::in_band(int w1, int w2) const {
    return std::abs(w1) <= n_max && std::abs(w2) <= n_max;
}

FourierSeries2D extract(const Fn2D& f, int n_max) {
    FourierSeries2D s = FourierSeries2D::zero(n_max);
    const int g = s.side();

    std::vector<double> samples(static_cast<std::size_t>(g) * g);
    for (int j1 = 0; j1 < g; ++j1) {
        const double x1 = kTwoPi * j1 / g;
        for (int j2 = 0; j2 < g; ++j2) {
            samples[static_cast<std::size_t>(j1) * g + j2] = f(x1, kTwoPi * j2 / g);
        }
    }

    // roots[m] = exp(-2 pi i m / g); the DFT phase for (w, j) is roots[w*j mod g]
    std::vector<std::complex<double>> roots(g);
    for (int m = 0; m < g; ++m) {
        roots[m] = std::polar(1.0, -kTwoPi * m / g);
    }
    auto phase = [&](int w, int j) {
        const long long m = ((static_cast<long long>(w) * j) % g + g) % g;
        return roots[static_cast<std::size_t>(m)];
    };

    // separable transform: rows over j2 first, then columns over j1
    std::vector<std::complex<double>> partial(static_cast<std::size_t>(g) * g);
    for (int j1 = 0; j1 < g; ++j1) {
        for (int w2 = -n_max; w2 <= n_max; ++w2) {
            std::complex<double> acc{0.0, 0.0};
            for (int j2 = 0; j2 < g; ++j2) {
                acc += samples[static_cast<std::size_t>(j1) * g + j2] * phase(w2, j2);
            }
            partial[static_cast<std::size_t>(j1) * g + (w2 + n_max)] = acc;
        }
    }
    const double norm = 1.0 / (static_cast<double>(g) * g);
    for (int w1 = -n_max; w1 <= n_max; ++w1) {
        for (int w2 = -n_max; w2 <= n_max; ++w2) {
            std::complex<double> acc{0.0, 0.0};
            for (int j1 = 0; j1 < g; ++j1) {
                acc += partial[static_cast<std::size_t>(j1) * g + (w2 + n_max)] * phase(w1, j1);
            }
            s.at(w1, w2) = acc * norm;
        }
    }
    return s;
}

double hermitian_asymmetry(const FourierSeries2D& s) {
    double worst = 0.0;
    for (int w1 = -s.n_max; w1 <= s.n_max; ++w1) {
        for (int w2 = -s.n_max; w2 <= s.n_max; ++w2) {
            worst = std::max(worst, std::abs(s.at(w1, w2) - std::conj(s.at(-w1, -w2))));
        }
    }
    return worst;
}

double evaluate(const FourierSeries2D& s, double x1, double x2) {
    std::complex<double> acc{0.0, 0.0};
    for (int w1 = -s.n_max; w1 <= s.n_max; ++w1) {
        // exp(i w1 x1) * sum over w2
        std::complex<double> row{0.0, 0.0};
        const std::complex<double> e2 = std::polar(1.0, x2);
        std::complex<double> p2 = std::polar(1.0, -s.n_max * x2);
        for (int w2 = -s.n_max; w2 <= s.n_max; ++w2) {
            row += s.at(w1, w2) * p2;
            p2 *= e2;
        }
        acc += row * std::polar(1.0, w1 * x1);
    }
    const double scale = std::max(1.0, std::abs(acc.real()));
    if (std::abs(acc.imag()) > 1e-8 * scale) {
        throw std::runtime_error("series evaluation has imaginary residual " +
                                 std::to_string(acc.imag()) +
                                 "; Hermitian symmetry is violated");
    }
    return acc.real();
}

double analytic_integral(const FourierSeries2D& s, const Box2& box) {
    std::complex<double> acc{0.0, 0.0};
    std::vector<std::complex<double>> seg1(s.side()), seg2(s.side());
    for (int w = -s.n_max; w <= s.n_max; ++w) {
        seg1[w + s.n_max] = segment_integral(w, box.a1, box.b1);
        seg2[w + s.n_max] = segment_integral(w, box.a2, box.b2);
    }
    for (int w1 = -s.n_max; w1 <= s.n_max; ++w1) {
        for (int w2 = -s.n_max; w2 <= s.n_max; ++w2) {
            acc += s.at(w1, w2) * seg1[w1 + s.n_max] * seg2[w2 + s.n_max];
        }
    }
    return acc.real();
}

TermList real_term_list(const FourierSeries2D& s) {
    const double asym = hermitian_asymmetry(s);
    if (asym > 1e-8) {
        throw std::runtime_error("Hermitian symmetry violated by " + std::to_string(asym));
    }
    TermList list;
    list.constant = s.at(0, 0).real();
    for (int w1 = -s.n_max; w1 <= s.n_max; ++w1) {
        for (int w2 = -s.n_max; w2 <= s.n_max; ++w2) {
            const bool canonical = w1 > 0 || (w1 == 0 && w2 > 0);
            if (!canonical) continue;
            const std::complex<double> c = s.at(w1, w2);
            SinusoidTerm t;
            t.w1 = w1;
            t.w2 = w2;
            t.amplitude = 2.0 * std::abs(c);
            t.phase = std::atan2(c.imag(), c.real());
            list.terms.push_back(t);
        }
    }
    return list;
}

FourierSeries2D truncate(const FourierSeries2D& s, int n_max_new) {
    if (n_max_new >= s.n_max) return s;
    FourierSeries2D out = FourierSeries2D::zero(n_max_new);
    for (int w1 = -n_max_new; w1 <= n_max_new; ++w1) {
        for (int w2 = -n_max_new; w2 <= n_max_new; ++w2) {
            out.at(w1, w2) = s.at(w1, w2);
        }
    }
    return out;
}

double band_power_outside(const FourierSeries2D& s, int band) {
    double power = 0.0;
    for (int w1 = -s.n_max; w1 <= s.n_max; ++w1) {
        for (int w2 = -s.n_max; w2 <= s.n_max; ++w2) {
            if (std::max(std::abs(w1), std::abs(w2)) > band) {
                power += std::norm(s.at(w1, w2));
            }
        }
    }
    return power;
}

}  // namespace qfiae::fourier
