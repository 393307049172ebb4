#include "fbshom/fbs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "fbshom/numerics.hpp"

namespace fbshom::fbs {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

std::vector<cplx> reflect(const std::vector<cplx>& a) {
    return {a.rbegin(), a.rend()};
}

// Replaces the wrapped edge zones of an FFT-shifted array with a power-law
// extrapolation fitted just inside each edge.
void fix_shift_edges(std::vector<cplx>& a, const FrequencyGrid& grid, double shift) {
    const std::size_t n = a.size();
    const std::size_t k_wrap =
        static_cast<std::size_t>(std::ceil(std::abs(shift) / grid.spacing())) + 8;
    const std::size_t m_fit = 24;
    if (2 * (k_wrap + m_fit) >= n)
        throw resolution_error("grid too small to absorb the envelope-offset shift");
    std::vector<double> xs(m_fit);
    // upper edge
    for (std::size_t i = 0; i < m_fit; ++i) xs[i] = grid.point(n - k_wrap - m_fit + i);
    auto [c2u, c3u] = numerics::fit_power_law_tail(
        xs, std::span<const cplx>(a.data() + n - k_wrap - m_fit, m_fit));
    for (std::size_t i = n - k_wrap; i < n; ++i) {
        const double x = grid.point(i);
        a[i] = c2u / (x * x) + c3u / (x * x * x);
    }
    // lower edge
    for (std::size_t i = 0; i < m_fit; ++i) xs[i] = grid.point(k_wrap + i);
    auto [c2l, c3l] = numerics::fit_power_law_tail(
        xs, std::span<const cplx>(a.data() + k_wrap, m_fit));
    for (std::size_t i = 0; i < k_wrap; ++i) {
        const double x = grid.point(i);
        a[i] = c2l / (x * x) + c3l / (x * x * x);
    }
}

// Samples of f(nu - shift) from samples of f, exact for shift = 0.
std::vector<cplx> shifted(const std::vector<cplx>& a, const FrequencyGrid& grid,
                          double shift) {
    if (shift == 0.0) return a;
    if (std::abs(shift) >= grid.span / 4.0)
        throw resolution_error("grid cannot represent the requested detuning shift");
    if (!numerics::is_power_of_two(a.size()))
        throw resolution_error("fractional shift requires a power-of-two grid");
    auto out = numerics::fractional_shift(a, shift, grid.spacing());
    fix_shift_edges(out, grid, shift);
    return out;
}

double l2(const std::vector<cplx>& a, double h) {
    double acc = 0.0;
    for (const auto& v : a) acc += std::norm(v);
    return acc * h;
}

} // namespace

void FbsParams::validate() const {
    if (strength < 0.0) throw invalid_parameter("FbsParams: strength must be >= 0");
    if (length <= 0.0) throw invalid_parameter("FbsParams: length must be > 0");
}

SplitterAmplitudes splitter_amplitudes(const FbsParams& params) {
    params.validate();
    const cplx phase(std::cos(params.pump_phase), std::sin(params.pump_phase));
    const double x = 2.0 * params.strength; // kappa L = 2 gamma P L
    if (params.mismatch == 0.0)
        return {cplx(std::cos(x), 0.0), phase * std::sin(x)};
    const double y = params.mismatch * params.length / 2.0;
    const double gl = std::hypot(x, y);
    if (gl == 0.0) return {cplx(1.0, 0.0), cplx(0.0, 0.0)};
    const double sc = std::sin(gl) / gl;
    const cplx upsilon(std::cos(gl), -y * sc);
    const cplx mu = phase * (x * sc);
    return {upsilon, mu};
}

double conversion_efficiency(double gamma_p, double delta_beta, double length) {
    if (gamma_p < 0.0 || length <= 0.0)
        throw invalid_parameter("conversion_efficiency: gamma_p >= 0 and length > 0 required");
    const double x = 2.0 * gamma_p * length;
    const double y = delta_beta * length / 2.0;
    const double gl = std::hypot(x, y);
    if (gl == 0.0) return 0.0;
    const double sc = std::sin(gl) / gl;
    return x * x * sc * sc;
}

double SingleArmPair::norm() const {
    return l2(red, grid.spacing()) + l2(blue, grid.spacing());
}

SingleArmPair apply_fbs_single(const JointSpectralAmplitude& jsa, Arm arm,
                               const FbsParams& params) {
    const auto [u, m] = splitter_amplitudes(params);
    const double d_omega = jsa.envelope_offset;
    SingleArmPair out;
    out.grid = jsa.grid;
    const std::size_t n = jsa.amplitude.size();
    out.red.assign(n, cplx(0.0));
    out.blue.assign(n, cplx(0.0));
    if (arm == Arm::red) {
        for (std::size_t k = 0; k < n; ++k) out.red[k] = u * jsa.amplitude[k];
        if (std::abs(m) > 0.0) {
            auto conv = shifted(jsa.amplitude, jsa.grid, d_omega);
            for (std::size_t k = 0; k < n; ++k) out.blue[k] = -m * conv[k];
        }
    } else {
        for (std::size_t k = 0; k < n; ++k) out.blue[k] = std::conj(u) * jsa.amplitude[k];
        if (std::abs(m) > 0.0) {
            auto conv = shifted(jsa.amplitude, jsa.grid, -d_omega);
            for (std::size_t k = 0; k < n; ++k) out.red[k] = std::conj(m) * conv[k];
        }
    }
    return out;
}

double TwoPhotonState::sector_weight_rb() const { return l2(jsa_rb, grid.spacing()); }
double TwoPhotonState::sector_weight_rr() const { return l2(jsa_rr, grid.spacing()); }
double TwoPhotonState::sector_weight_bb() const { return l2(jsa_bb, grid.spacing()); }
double TwoPhotonState::total_norm() const {
    return sector_weight_rb() + sector_weight_rr() + sector_weight_bb();
}

TwoPhotonState make_two_photon_state(const JointSpectralAmplitude& jsa) {
    TwoPhotonState s;
    s.grid = jsa.grid;
    s.jsa_rb = jsa.amplitude;
    s.jsa_rr.assign(jsa.amplitude.size(), cplx(0.0));
    s.jsa_bb.assign(jsa.amplitude.size(), cplx(0.0));
    s.input = jsa.amplitude;
    s.envelope_offset = jsa.envelope_offset;
    return s;
}

TwoPhotonState apply_fbs_two_photon(const TwoPhotonState& state, const FbsParams& params) {
    const double h = state.grid.spacing();
    if (state.sector_weight_rr() > 1e-14 || state.sector_weight_bb() > 1e-14)
        throw unsupported_input("apply_fbs_two_photon models a single FBS pass; "
                                "input must live in the (R,B) sector");
    if (std::abs(state.grid.center) > 1e-9 * state.grid.span)
        throw invalid_parameter("two-photon FBS requires a grid centered on zero detuning");
    const auto [u, m] = splitter_amplitudes(params);
    const double d_omega = state.envelope_offset;
    const std::size_t n = state.jsa_rb.size();

    // phi(-nu - dOmega): exact index reflection, then a fractional shift
    auto swap = reflect(state.jsa_rb);
    swap = shifted(swap, state.grid, -d_omega);

    TwoPhotonState out;
    out.grid = state.grid;
    out.envelope_offset = d_omega;
    out.input = state.input;
    out.jsa_rb.resize(n);
    out.jsa_rr.resize(n);
    out.jsa_bb.resize(n);

    const double uu = std::norm(u);
    const double mm = std::norm(m);
    const cplx c_rr = std::conj(u) * m * kSqrtHalf;
    const cplx c_bb = -std::conj(m) * u * kSqrtHalf;
    std::vector<cplx> sum(n);
    for (std::size_t k = 0; k < n; ++k) {
        sum[k] = state.jsa_rb[k] + swap[k];
        out.jsa_rb[k] = uu * state.jsa_rb[k] - mm * swap[k];
        out.jsa_rr[k] = c_rr * sum[k];
    }
    // bb amplitude is the reflection of the symmetrized sum
    for (std::size_t k = 0; k < n; ++k) out.jsa_bb[k] = c_bb * sum[n - 1 - k];
    (void)h;
    return out;
}

namespace {
void export_block(std::ostream& os, const char* name, const FrequencyGrid& grid,
                  const std::vector<cplx>& a) {
    char buf[96];
    os << "# sector " << name << "\n";
    std::snprintf(buf, sizeof buf, "# center_rad_s %.17g\n", grid.center);
    os << buf;
    std::snprintf(buf, sizeof buf, "# span_rad_s %.17g\n", grid.span);
    os << buf;
    std::snprintf(buf, sizeof buf, "# n_points %zu\n", grid.n_points);
    os << buf;
    for (std::size_t k = 0; k < a.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", grid.point(k), a[k].real(),
                      a[k].imag());
        os << buf;
    }
}
} // namespace

void export_state(const TwoPhotonState& state, std::ostream& os) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "# envelope_offset_rad_s %.17g\n", state.envelope_offset);
    os << buf;
    export_block(os, "rb", state.grid, state.jsa_rb);
    export_block(os, "rr", state.grid, state.jsa_rr);
    export_block(os, "bb", state.grid, state.jsa_bb);
}

void export_state_file(const TwoPhotonState& state, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path);
    export_state(state, os);
}

} // namespace fbshom::fbs
