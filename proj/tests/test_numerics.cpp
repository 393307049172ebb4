#include "doctest.h"

#include <cmath>
#include <numbers>

#include "fbshom/numerics.hpp"

using namespace fbshom::numerics;

TEST_CASE("fft round trip and Parseval") {
    std::vector<cplx> a(256);
    for (std::size_t k = 0; k < a.size(); ++k)
        a[k] = cplx(std::sin(0.37 * k), std::cos(1.1 * k));
    auto b = a;
    fft(b, false);
    double pa = 0, pb = 0;
    for (auto& v : a) pa += std::norm(v);
    for (auto& v : b) pb += std::norm(v);
    CHECK(pb / a.size() == doctest::Approx(pa).epsilon(1e-12));
    fft(b, true);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(b[k] - a[k]) < 1e-12);
}

TEST_CASE("fractional shift reproduces an analytic Gaussian shift") {
    const std::size_t n = 1024;
    const double h = 0.05;
    std::vector<cplx> f(n);
    auto g = [](double x) { return std::exp(-x * x / 2.0); };
    for (std::size_t k = 0; k < n; ++k) {
        const double x = (static_cast<double>(k) - 511.5) * h;
        f[k] = g(x);
    }
    const double s = 0.3137; // non-integer multiple of h
    auto out = fractional_shift(f, s, h);
    for (std::size_t k = 50; k < n - 50; ++k) {
        const double x = (static_cast<double>(k) - 511.5) * h;
        CHECK(std::abs(out[k] - cplx(g(x - s))) < 1e-10);
    }
}

TEST_CASE("sine and cosine integrals match reference values") {
    // reference values from standard tables
    auto [si1, ci1] = sine_cosine_integrals(1.0);
    CHECK(si1 == doctest::Approx(0.9460830703671830).epsilon(1e-12));
    CHECK(ci1 == doctest::Approx(0.3374039229009681).epsilon(1e-12));
    auto [si5, ci5] = sine_cosine_integrals(5.0);
    CHECK(si5 == doctest::Approx(1.5499312449446742).epsilon(1e-12));
    CHECK(ci5 == doctest::Approx(-0.1900297496566439).epsilon(1e-10));
    auto [si20, ci20] = sine_cosine_integrals(20.0);
    CHECK(si20 == doctest::Approx(1.5482417010434398).epsilon(1e-12));
    CHECK(ci20 == doctest::Approx(0.04441982084535331).epsilon(1e-9));
}

TEST_CASE("truncated tail integrals agree with brute-force quadrature") {
    const double w = 7.0;
    const double upper = 8000.0;
    for (double t : {0.4, 1.7, -0.9}) {
        // the oscillatory tail beyond any finite cutoff is ~1/(|t| W^2), far
        // above the tolerance, so compare the [w, upper] slice of the
        // semi-infinite integrals against brute-force quadrature instead
        auto [i2, i3] = truncated_tail_integrals(w, t);
        auto [j2, j3] = truncated_tail_integrals(upper, t);
        cplx r2(0.0), r3(0.0);
        const std::size_t steps = 4'000'000;
        const double dn = (upper - w) / steps;
        for (std::size_t k = 0; k < steps; ++k) {
            const double nu = w + (k + 0.5) * dn;
            const cplx e = std::polar(1.0, -nu * t);
            r2 += e / (nu * nu);
            r3 += e / (nu * nu * nu);
        }
        r2 *= dn;
        r3 *= dn;
        CHECK(std::abs((i2 - j2) - r2) < 2e-8);
        CHECK(std::abs((i3 - j3) - r3) < 2e-8);
    }
}

TEST_CASE("gaussian convolution preserves mass of an interior bump") {
    std::vector<double> v(801, 0.0);
    for (int k = 350; k < 450; ++k) v[k] = std::exp(-0.001 * (k - 400) * (k - 400));
    const double dt = 1.0;
    auto out = gaussian_convolve(v, dt, 8.0);
    double before = 0, after = 0;
    for (double x : v) before += x;
    for (double x : out) after += x;
    CHECK(after == doctest::Approx(before).epsilon(1e-9));
}

TEST_CASE("linear solve and inverse") {
    std::vector<double> a{4, 1, 0, 1, 3, 1, 0, 1, 2};
    std::vector<double> b{1, 2, 3};
    std::vector<double> x;
    REQUIRE(solve_linear(a, b, 3, x));
    CHECK(4 * x[0] + 1 * x[1] + 0 * x[2] == doctest::Approx(1.0));
    CHECK(1 * x[0] + 3 * x[1] + 1 * x[2] == doctest::Approx(2.0));
    CHECK(0 * x[0] + 1 * x[1] + 2 * x[2] == doctest::Approx(3.0));
    std::vector<double> inv;
    REQUIRE(invert_matrix(a, 3, inv));
    // A * A^-1 = I
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0;
            for (int k = 0; k < 3; ++k) acc += a[i * 3 + k] * inv[k * 3 + j];
            CHECK(acc == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
        }
}
