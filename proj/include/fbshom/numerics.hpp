#ifndef FBSHOM_NUMERICS_HPP
#define FBSHOM_NUMERICS_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace fbshom::numerics {

using cplx = std::complex<double>;

/// In-place radix-2 FFT; size must be a power of two.
void fft(std::vector<cplx>& a, bool inverse);

bool is_power_of_two(std::size_t n);

/// Resample f(x_k) -> f(x_k - shift) for samples on a uniform grid with the
/// given spacing, using the FFT shift theorem (band-limited, circular).
/// Callers are responsible for fixing the wrapped edge region.
std::vector<cplx> fractional_shift(const std::vector<cplx>& samples, double shift,
                                   double spacing);

/// Least-squares fit of y ~ c2/x^2 + c3/x^3 over the given samples.
std::pair<cplx, cplx> fit_power_law_tail(std::span<const double> x,
                                         std::span<const cplx> y);

/// Sine and cosine integrals Si(x), Ci(x) for x >= 0.
std::pair<double, double> sine_cosine_integrals(double x);

/// I_k(t) = \int_W^inf e^{-i nu t} / nu^k dnu for k = 2, 3.
/// The matching negative-side integrals are conj(I2) and -conj(I3).
std::pair<cplx, cplx> truncated_tail_integrals(double cutoff, double t);

/// Discrete Gaussian convolution on a uniform axis, kernel truncated at 6 sigma
/// and renormalized to unit mass.
std::vector<double> gaussian_convolve(const std::vector<double>& values, double dt,
                                      double sigma);

/// Gaussian elimination with partial pivoting; A is n x n row-major.
/// Returns false if the system is singular to working precision.
bool solve_linear(std::vector<double> a, std::vector<double> b, std::size_t n,
                  std::vector<double>& x);

/// Matrix inverse via Gauss-Jordan; returns false if singular.
bool invert_matrix(std::vector<double> a, std::size_t n, std::vector<double>& inv);

/// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a64(std::string_view data);

} // namespace fbshom::numerics

#endif
