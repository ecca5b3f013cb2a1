#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qfiae/fourier.hpp"
#include "qfiae/quad.hpp"
#include "qfiae/rng.hpp"

using namespace qfiae;
using namespace qfiae::fourier;

namespace {

constexpr double kPi = std::numbers::pi;

// random Hermitian series with |c| <= scale
FourierSeries2D random_series(rng::Stream& stream, int n_max, double scale) {
    auto s = FourierSeries2D::zero(n_max);
    for (int w1 = -n_max; w1 <= n_max; ++w1) {
        for (int w2 = -n_max; w2 <= n_max; ++w2) {
            if (w1 < 0 || (w1 == 0 && w2 < 0)) continue;
            if (w1 == 0 && w2 == 0) {
                s.at(0, 0) = {stream.next_symmetric(scale), 0.0};
                continue;
            }
            const std::complex<double> c{stream.next_symmetric(scale),
                                         stream.next_symmetric(scale)};
            s.at(w1, w2) = c;
            s.at(-w1, -w2) = std::conj(c);
        }
    }
    return s;
}

}  // namespace

TEST_CASE("extract fixture: 0.5 + 0.25 cos(3 x1)") {
    const auto s = extract([](double x1, double) { return 0.5 + 0.25 * std::cos(3.0 * x1); }, 5);
    CHECK(std::abs(s.at(0, 0) - std::complex<double>{0.5, 0.0}) < 1e-12);
    CHECK(std::abs(s.at(3, 0) - std::complex<double>{0.125, 0.0}) < 1e-12);
    CHECK(std::abs(s.at(-3, 0) - std::complex<double>{0.125, 0.0}) < 1e-12);
    for (int w1 = -5; w1 <= 5; ++w1) {
        for (int w2 = -5; w2 <= 5; ++w2) {
            if ((std::abs(w1) == 3 || w1 == 0) && w2 == 0) continue;
            CHECK(std::abs(s.at(w1, w2)) < 1e-12);
        }
    }
}

TEST_CASE("extract fixture: sin(x2)") {
    const auto s = extract([](double, double x2) { return std::sin(x2); }, 3);
    CHECK(std::abs(s.at(0, 1) - std::complex<double>{0.0, -0.5}) < 1e-12);
    CHECK(std::abs(s.at(0, -1) - std::complex<double>{0.0, 0.5}) < 1e-12);
}

TEST_CASE("extract is exact on band-limited content (coefficient-wise)") {
    rng::Stream stream(31);
    const auto original = random_series(stream, 4, 0.5);
    const auto recovered = extract(
        [&](double x1, double x2) { return evaluate(original, x1, x2); }, 4);
    for (int w1 = -4; w1 <= 4; ++w1) {
        for (int w2 = -4; w2 <= 4; ++w2) {
            CHECK(std::abs(recovered.at(w1, w2) - original.at(w1, w2)) < 1e-12);
        }
    }
}

TEST_CASE("evaluate fixtures") {
    auto constant = FourierSeries2D::zero(2);
    constant.at(0, 0) = 1.0;
    CHECK(evaluate(constant, 0.3, 1.7) == doctest::Approx(1.0));

    auto cosine = FourierSeries2D::zero(2);
    cosine.at(1, 0) = 0.5;
    cosine.at(-1, 0) = 0.5;
    CHECK(evaluate(cosine, 0.0, 0.9) == doctest::Approx(1.0));
}

TEST_CASE("round-trip evaluation error stays below 1e-10") {
    rng::Stream stream(12);
    const auto original = random_series(stream, 5, 0.3);
    const auto recovered = extract(
        [&](double x1, double x2) { return evaluate(original, x1, x2); }, 5);
    for (int i = 0; i < 50; ++i) {
        const double x1 = stream.next_double() * 2.0 * kPi;
        const double x2 = stream.next_double() * 2.0 * kPi;
        CHECK(std::abs(evaluate(recovered, x1, x2) - evaluate(original, x1, x2)) < 1e-10);
    }
}

TEST_CASE("analytic integral fixtures") {
    auto constant = FourierSeries2D::zero(1);
    constant.at(0, 0) = 1.0;
    CHECK(analytic_integral(constant, {0.0, 1.0, 0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(analytic_integral(constant, {0.3, 0.3, 0.0, 1.0}) == doctest::Approx(0.0));

    auto cosine = FourierSeries2D::zero(1);
    cosine.at(1, 0) = 0.5;
    cosine.at(-1, 0) = 0.5;
    CHECK(analytic_integral(cosine, {0.0, 1.0, 0.0, 1.0}) ==
          doctest::Approx(std::sin(1.0)).epsilon(1e-12));
}

TEST_CASE("analytic integral agrees with quadrature on random series") {
    rng::Stream stream(99);
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = random_series(stream, 5, 0.2);
        const Box2 box{0.0, 1.0, 0.0, 1.0};
        const double exact = analytic_integral(s, box);
        const auto numeric = quad::gauss_2d(
            [&](double x1, double x2) { return evaluate(s, x1, x2); }, 24, 4);
        CHECK(std::abs(exact - numeric.value) < 1e-8);
    }
}

TEST_CASE("real_term_list fixtures") {
    auto s = FourierSeries2D::zero(2);
    s.at(2, 0) = 0.125;
    s.at(-2, 0) = 0.125;
    s.at(0, 1) = {0.0, -0.1};
    s.at(0, -1) = {0.0, 0.1};
    const auto list = real_term_list(s);
    CHECK(list.constant == doctest::Approx(0.0));

    bool found_cos = false, found_sin = false;
    for (const auto& t : list.terms) {
        if (t.w1 == 2 && t.w2 == 0 && t.amplitude > 1e-12) {
            found_cos = true;
            CHECK(t.amplitude == doctest::Approx(0.25));
            CHECK(t.phase == doctest::Approx(0.0));
        }
        if (t.w1 == 0 && t.w2 == 1 && t.amplitude > 1e-12) {
            found_sin = true;
            CHECK(t.amplitude == doctest::Approx(0.2));
            CHECK(t.phase == doctest::Approx(-kPi / 2.0));
        }
    }
    CHECK(found_cos);
    CHECK(found_sin);
}

TEST_CASE("folded terms reconstruct the series pointwise") {
    rng::Stream stream(55);
    const auto s = random_series(stream, 4, 0.3);
    const auto list = real_term_list(s);
    for (int i = 0; i < 20; ++i) {
        const double x1 = stream.next_double() * 2.0 * kPi;
        const double x2 = stream.next_double() * 2.0 * kPi;
        double sum = list.constant;
        for (const auto& t : list.terms) {
            sum += t.amplitude * std::cos(t.w1 * x1 + t.w2 * x2 + t.phase);
        }
        CHECK(std::abs(sum - evaluate(s, x1, x2)) < 1e-10);
    }
}

TEST_CASE("folding preserves the integral") {
    rng::Stream stream(56);
    const auto s = random_series(stream, 3, 0.4);
    const Box2 box{0.0, 1.3, 0.2, 1.0};
    const auto list = real_term_list(s);
    double sum = list.constant * box.volume();
    for (const auto& t : list.terms) {
        // closed-form integral of A cos(w . x + phi) over the box
        auto seg = [](int w, double a, double b) -> std::complex<double> {
            if (w == 0) return {b - a, 0.0};
            const std::complex<double> iw{0.0, static_cast<double>(w)};
            return (std::exp(iw * b) - std::exp(iw * a)) / iw;
        };
        const auto phase = std::polar(t.amplitude, t.phase);
        sum += (phase * seg(t.w1, box.a1, box.b1) * seg(t.w2, box.a2, box.b2)).real();
    }
    CHECK(std::abs(sum - analytic_integral(s, box)) < 1e-10);
}

TEST_CASE("symmetry violation is detected") {
    auto s = FourierSeries2D::zero(2);
    s.at(1, 0) = {0.4, 0.2};
    s.at(-1, 0) = {0.4, 0.2};  // should be the conjugate
    CHECK_THROWS_AS(real_term_list(s), std::runtime_error);
    CHECK_THROWS_AS(evaluate(s, 0.7, 0.0), std::runtime_error);
    CHECK(hermitian_asymmetry(s) > 1e-8);
}

TEST_CASE("truncate and out-of-band power") {
    rng::Stream stream(77);
    const auto s = random_series(stream, 4, 0.2);
    const auto cut = truncate(s, 2);
    CHECK(cut.n_max == 2);
    CHECK(std::abs(cut.at(2, -1) - s.at(2, -1)) == doctest::Approx(0.0));
    double manual = 0.0;
    for (int w1 = -4; w1 <= 4; ++w1) {
        for (int w2 = -4; w2 <= 4; ++w2) {
            if (std::max(std::abs(w1), std::abs(w2)) > 2) manual += std::norm(s.at(w1, w2));
        }
    }
    CHECK(band_power_outside(s, 2) == doctest::Approx(manual));
    CHECK(band_power_outside(s, 4) == doctest::Approx(0.0));
}

TEST_CASE("n_max = 0 extraction of a non-constant function is lossy but permitted") {
    const auto s = extract([](double x1, double) { return 0.3 + std::cos(x1); }, 0);
    CHECK(s.n_max == 0);
    // the single-node DFT aliases everything onto the sample at the origin
    CHECK(s.at(0, 0).real() == doctest::Approx(1.3));
}
