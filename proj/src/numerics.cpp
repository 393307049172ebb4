#include "fbshom/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fbshom::numerics {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("fft: size must be a power of two");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

std::vector<cplx> fractional_shift(const std::vector<cplx>& samples, double shift,
                                   double spacing) {
    const std::size_t n = samples.size();
    std::vector<cplx> a = samples;
    fft(a, false);
    const double period = static_cast<double>(n) * spacing;
    for (std::size_t k = 0; k < n; ++k) {
        // signed FFT frequency index
        const double m = (k <= n / 2) ? static_cast<double>(k)
                                      : static_cast<double>(k) - static_cast<double>(n);
        const double phase = -2.0 * std::numbers::pi * m * shift / period;
        a[k] *= cplx(std::cos(phase), std::sin(phase));
    }
    fft(a, true);
    return a;
}

std::pair<cplx, cplx> fit_power_law_tail(std::span<const double> x,
                                         std::span<const cplx> y) {
    // normal equations for the 2-parameter basis {x^-2, x^-3}
    double s22 = 0, s23 = 0, s33 = 0;
    cplx b2 = 0, b3 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u2 = 1.0 / (x[i] * x[i]);
        const double u3 = u2 / x[i];
        s22 += u2 * u2;
        s23 += u2 * u3;
        s33 += u3 * u3;
        b2 += y[i] * u2;
        b3 += y[i] * u3;
    }
    const double det = s22 * s33 - s23 * s23;
    if (det == 0.0) return {cplx(0.0), cplx(0.0)};
    const cplx c2 = (b2 * s33 - b3 * s23) / det;
    const cplx c3 = (b3 * s22 - b2 * s23) / det;
    return {c2, c3};
}

std::pair<double, double> sine_cosine_integrals(double x) {
    // series for small x, Lentz continued fraction for the complex exponential
    // integral otherwise
    constexpr double euler = 0.5772156649015328606;
    constexpr int max_iter = 200;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double fpmin = std::numeric_limits<double>::min() / eps;
    const double ax = std::abs(x);
    if (ax == 0.0) return {0.0, -std::numeric_limits<double>::infinity()};
    double si = 0.0, ci = 0.0;
    if (ax > 2.0) {
        cplx b(1.0, ax), c(1.0 / fpmin, 0.0), d = 1.0 / b, h = d;
        int i;
        for (i = 1; i < max_iter; ++i) {
            const double a = -static_cast<double>(i) * i;
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            const cplx del = c * d;
            h *= del;
            if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps) break;
        }
        if (i >= max_iter) throw std::runtime_error("sine_cosine_integrals: cf failed");
        h *= cplx(std::cos(ax), -std::sin(ax));
        ci = -h.real();
        si = std::numbers::pi / 2.0 + h.imag();
    } else {
        // power series
        double sum_s = 0.0, sum_c = 0.0;
        if (ax < std::sqrt(fpmin)) {
            sum_c = 0.0;
            sum_s = ax;
        } else {
            double sum = 0.0, sums = 0.0, sumc = 0.0, sign = 1.0, fact = 1.0, term;
            bool odd = true;
            for (int k = 1; k <= max_iter; ++k) {
                fact *= ax / k;
                term = fact / k;
                sum += sign * term;
                const double err = term / std::abs(sum);
                if (odd) {
                    sign = -sign;
                    sums = sum;
                    sum = sumc;
                } else {
                    sumc = sum;
                    sum = sums;
                }
                if (err < eps) break;
                odd = !odd;
            }
            sum_s = sums;
            sum_c = sumc;
        }
        si = sum_s;
        ci = sum_c + std::log(ax) + euler;
    }
    if (x < 0.0) si = -si;
    return {si, ci};
}

std::pair<cplx, cplx> truncated_tail_integrals(double cutoff, double t) {
    const double at = std::abs(t);
    const double x = cutoff * at;
    const auto [si, ci] = sine_cosine_integrals(x);
    // I1 = int_W^inf e^{-i nu |t|}/nu dnu = -Ci(x) + i(Si(x) - pi/2)
    const cplx i1 = (x == 0.0) ? cplx(0.0, 0.0) // unused below when t == 0
                               : cplx(-ci, si - std::numbers::pi / 2.0);
    const cplx e(std::cos(x), -std::sin(x));
    cplx i2, i3;
    if (t == 0.0) {
        i2 = cplx(1.0 / cutoff, 0.0);
        i3 = cplx(1.0 / (2.0 * cutoff * cutoff), 0.0);
    } else {
        i2 = e / cutoff - cplx(0.0, at) * i1;
        i3 = e / (2.0 * cutoff * cutoff) - cplx(0.0, at / 2.0) * i2;
        if (t < 0.0) {
            i2 = std::conj(i2);
            i3 = std::conj(i3);
        }
    }
    return {i2, i3};
}

std::vector<double> gaussian_convolve(const std::vector<double>& values, double dt,
                                      double sigma) {
    if (sigma <= 0.0) return values;
    const int half = static_cast<int>(std::ceil(6.0 * sigma / dt));
    std::vector<double> kernel(2 * half + 1);
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) {
        const double u = static_cast<double>(k) * dt / sigma;
        kernel[k + half] = std::exp(-0.5 * u * u);
        sum += kernel[k + half];
    }
    for (auto& w : kernel) w /= sum;
    const int n = static_cast<int>(values.size());
    std::vector<double> out(values.size(), 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = -half; k <= half; ++k) {
            const int j = i + k;
            if (j >= 0 && j < n) acc += values[j] * kernel[k + half];
        }
        out[i] = acc;
    }
    return out;
}

bool solve_linear(std::vector<double> a, std::vector<double> b, std::size_t n,
                  std::vector<double>& x) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (std::abs(a[piv * n + col]) < 1e-300) return false;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        const double d = a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / d;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) acc -= a[ri * n + c] * x[c];
        x[ri] = acc / a[ri * n + ri];
    }
    return true;
}

bool invert_matrix(std::vector<double> a, std::size_t n, std::vector<double>& inv) {
    inv.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (std::abs(a[piv * n + col]) < 1e-300) return false;
        if (piv != col)
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a[col * n + c], a[piv * n + c]);
                std::swap(inv[col * n + c], inv[piv * n + c]);
            }
        const double d = a[col * n + col];
        for (std::size_t c = 0; c < n; ++c) {
            a[col * n + c] /= d;
            inv[col * n + c] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r * n + col];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a[r * n + c] -= f * a[col * n + c];
                inv[r * n + c] -= f * inv[col * n + c];
            }
        }
    }
    return true;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace fbshom::numerics
