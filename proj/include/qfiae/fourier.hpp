#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace qfiae::fourier {

struct Box2 {
    double a1 = 0.0, b1 = 1.0;
    double a2 = 0.0, b2 = 1.0;
    double volume() const { return (b1 - a1) * (b2 - a2); }
};

// Truncated 2-D Fourier series with integer frequencies |w_d| <= n_max,
// stored densely as a (2 n_max + 1)^2 coefficient grid.
struct FourierSeries2D {
    int n_max = 0;
    std::vector<std::complex<double>> coeff;

    static FourierSeries2D zero(int n_max);

    int side() const { return 2 * n_max + 1; }
    std::complex<double> at(int w1, int w2) const;
    std::complex<double>& at(int w1, int w2);
    bool in_band(int w1, int w2) const;
};

struct SinusoidTerm {
    double amplitude = 0.0;  // A >= 0
    int w1 = 0, w2 = 0;      // canonical sign: w1 > 0, or w1 == 0 and w2 > 0
    double phase = 0.0;      // A * cos(w . x + phase)
};

struct TermList {
    double constant = 0.0;
    std::vector<SinusoidTerm> terms;
};

using Fn2D = std::function<double(double, double)>;

// 2-D DFT of f on the uniform (2 n_max + 1)^2 grid over [0, 2pi)^2; exact for
// functions band-limited to n_max.
FourierSeries2D extract(const Fn2D& f, int n_max);

// max |c_w - conj(c_-w)|; zero for a series extracted from a real function.
double hermitian_asymmetry(const FourierSeries2D& s);

// Sum of c_w exp(i w . x). Throws if the imaginary residual exceeds 1e-8,
// which signals a corrupted (non-Hermitian) series.
double evaluate(const FourierSeries2D& s, double x1, double x2);

// Exact closed-form integral of the truncated series over the box.
double analytic_integral(const FourierSeries2D& s, const Box2& box);

// Folds conjugate coefficient pairs into real sinusoids A cos(w.x + phi); the
// constant term is reported separately. Throws on symmetry violation > 1e-8.
TermList real_term_list(const FourierSeries2D& s);

// Hard truncation to a smaller band.
FourierSeries2D truncate(const FourierSeries2D& s, int n_max_new);

// Total |c|^2 of coefficients with max(|w1|, |w2|) > band.
double band_power_outside(const FourierSeries2D& s, int band);

}  // namespace qfiae::fourier
