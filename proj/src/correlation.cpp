#include "fbshom/correlation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>

#include "fbshom/numerics.hpp"

namespace fbshom::correlation {

using numerics::cplx;

const char* to_string(CurveKind k) {
    switch (k) {
        case CurveKind::cross_rb: return "cross_RB";
        case CurveKind::auto_rr: return "auto_RR";
        case CurveKind::auto_bb: return "auto_BB";
    }
    return "?";
}

const char* to_string(CurveSource s) {
    switch (s) {
        case CurveSource::analytic: return "analytic";
        case CurveSource::numeric: return "numeric";
        case CurveSource::montecarlo: return "montecarlo";
    }
    return "?";
}

double G2Curve::spacing() const {
    if (tau.size() < 2) throw invalid_parameter("G2Curve: need at least two tau samples");
    return tau[1] - tau[0];
}

double G2Curve::integral() const {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc * spacing();
}

double BeatModel::evaluate(double tau) const {
    const double u = tau - time_offset;
    return amplitude * std::exp(-linewidth * std::abs(u)) *
               (0.5 - 0.5 * visibility * std::cos(detuning * u)) +
           background;
}

std::vector<double> default_tau_axis() {
    constexpr double half_span = 8e-9;
    constexpr double step = 20e-12;
    const int half = static_cast<int>(std::llround(half_span / step));
    std::vector<double> tau(2 * half + 1);
    for (int k = -half; k <= half; ++k) tau[k + half] = static_cast<double>(k) * step;
    return tau;
}

G2Curve g2_cross_analytic(double linewidth, double detuning, double alpha,
                          const std::vector<double>& tau_axis, double amplitude) {
    if (linewidth <= 0.0) throw invalid_parameter("g2_cross_analytic: linewidth must be > 0");
    if (alpha < 0.0 || alpha > 1.0)
        throw invalid_parameter("g2_cross_analytic: alpha must lie in [0,1]");
    G2Curve c;
    c.tau = tau_axis;
    c.values.reserve(tau_axis.size());
    BeatModel m{linewidth, detuning, alpha, amplitude, 0.0, 0.0};
    for (double t : tau_axis) c.values.push_back(m.evaluate(t));
    c.kind = CurveKind::cross_rb;
    c.source = CurveSource::analytic;
    char buf[128];
    std::snprintf(buf, sizeof buf, "linewidth=%.6g detuning=%.6g alpha=%.6g", linewidth,
                  detuning, alpha);
    c.parameters = buf;
    return c;
}

G2Curve g2_pumps_off_analytic(double linewidth, const std::vector<double>& tau_axis,
                              double amplitude) {
    if (linewidth <= 0.0) throw invalid_parameter("g2_pumps_off_analytic: linewidth must be > 0");
    G2Curve c;
    c.tau = tau_axis;
    c.values.reserve(tau_axis.size());
    for (double t : tau_axis) c.values.push_back(amplitude * std::exp(-linewidth * std::abs(t)));
    c.kind = CurveKind::cross_rb;
    c.source = CurveSource::analytic;
    char buf[64];
    std::snprintf(buf, sizeof buf, "linewidth=%.6g pumps_off", linewidth);
    c.parameters = buf;
    return c;
}

namespace {

// F(tau) = int phi(nu) e^{-i nu tau} dnu by Riemann sum plus two-term
// algebraic corrections for the truncated |nu| > W tails.
std::vector<cplx> ft_with_tail(const std::vector<cplx>& amp,
                               const fbs::FrequencyGrid& grid,
                               const std::vector<double>& tau_axis) {
    const std::size_t n = amp.size();
    const double h = grid.spacing();
    const double nu0 = grid.point(0);
    const std::size_t m_fit = std::min<std::size_t>(24, n / 4);
    std::vector<double> xs(m_fit);
    for (std::size_t i = 0; i < m_fit; ++i) xs[i] = grid.point(n - m_fit + i);
    auto [c2u, c3u] = numerics::fit_power_law_tail(
        xs, std::span<const cplx>(amp.data() + n - m_fit, m_fit));
    for (std::size_t i = 0; i < m_fit; ++i) xs[i] = grid.point(i);
    auto [c2l, c3l] =
        numerics::fit_power_law_tail(xs, std::span<const cplx>(amp.data(), m_fit));
    const double w_up = std::abs(grid.upper_edge());
    const double w_lo = std::abs(grid.lower_edge());

    std::vector<cplx> out(tau_axis.size());
    for (std::size_t j = 0; j < tau_axis.size(); ++j) {
        const double t = tau_axis[j];
        // e^{-i nu_k t} by recurrence over the uniform grid
        cplx rot = std::polar(1.0, -nu0 * t);
        const cplx step = std::polar(1.0, -h * t);
        cplx acc(0.0);
        for (std::size_t k = 0; k < n; ++k) {
            acc += amp[k] * rot;
            rot *= step;
        }
        acc *= h;
        const auto [i2u, i3u] = numerics::truncated_tail_integrals(w_up, t);
        const auto [i2l, i3l] = numerics::truncated_tail_integrals(w_lo, t);
        // negative-side integrals are conj(I2) and -conj(I3)
        acc += c2u * i2u + c3u * i3u + c2l * std::conj(i2l) - c3l * std::conj(i3l);
        out[j] = acc;
    }
    return out;
}

double reference_peak(const fbs::TwoPhotonState& state) {
    const std::vector<double> zero{0.0};
    const auto f0 = ft_with_tail(state.input, state.grid, zero);
    const double peak = std::norm(f0[0]);
    if (peak <= 0.0)
        throw normalization_error("g2_numeric: input amplitude has zero spectral peak");
    return peak;
}

const std::vector<cplx>& select_sector(const fbs::TwoPhotonState& state, CurveKind kind) {
    switch (kind) {
        case CurveKind::cross_rb: return state.jsa_rb;
        case CurveKind::auto_rr: return state.jsa_rr;
        case CurveKind::auto_bb: return state.jsa_bb;
    }
    return state.jsa_rb;
}

void check_nyquist(const fbs::FrequencyGrid& grid, const std::vector<double>& tau_axis) {
    const double limit = std::numbers::pi / grid.spacing();
    for (double t : tau_axis)
        if (std::abs(t) > limit)
            throw aliasing_error("tau axis exceeds the grid's Nyquist range");
}

} // namespace

G2Curve g2_numeric(const fbs::TwoPhotonState& state, CurveKind kind,
                   const std::vector<double>& tau_axis) {
    check_nyquist(state.grid, tau_axis);
    const auto& amp = select_sector(state, kind);
    const double ref = reference_peak(state);
    const auto f = ft_with_tail(amp, state.grid, tau_axis);
    G2Curve c;
    c.tau = tau_axis;
    c.values.reserve(tau_axis.size());
    for (const auto& v : f) c.values.push_back(std::norm(v) / ref);
    c.kind = kind;
    c.source = CurveSource::numeric;
    c.parameters = "numeric DFT, pumps-off peak normalized to 1";
    return c;
}

G2Curve g2_auto_bunched(const fbs::TwoPhotonState& state, CurveKind kind,
                        const std::vector<double>& tau_axis) {
    if (kind == CurveKind::cross_rb)
        throw invalid_parameter("g2_auto_bunched: pick a bunched sector (auto_RR or auto_BB)");
    const auto& amp = select_sector(state, kind);
    double weight = 0.0;
    for (const auto& v : amp) weight += std::norm(v);
    weight *= state.grid.spacing();
    if (weight < 1e-14) {
        G2Curve c;
        c.tau = tau_axis;
        c.values.assign(tau_axis.size(), 0.0);
        c.kind = kind;
        c.source = CurveSource::numeric;
        c.warning_empty_sector = true;
        c.parameters = "empty bunched sector";
        return c;
    }
    return g2_numeric(state, kind, tau_axis);
}

G2Curve convolve_jitter(const G2Curve& curve, double sigma) {
    if (sigma < 0.0) throw invalid_parameter("convolve_jitter: sigma must be >= 0");
    if (sigma == 0.0) return curve;
    const double dt = curve.spacing();
    const double total = curve.integral();
    const std::size_t edge = static_cast<std::size_t>(std::ceil(6.0 * sigma / dt));
    if (2 * edge >= curve.values.size())
        throw boundary_error("convolve_jitter: axis shorter than the kernel support");
    double leak = 0.0;
    for (std::size_t i = 0; i < edge; ++i)
        leak += curve.values[i] + curve.values[curve.values.size() - 1 - i];
    leak *= dt;
    if (total > 0.0 && leak > 1e-3 * total)
        throw boundary_error("convolve_jitter: curve mass near the axis edges would leak; "
                             "pad the tau axis first");
    G2Curve out = curve;
    out.values = numerics::gaussian_convolve(curve.values, dt, sigma);
    char buf[64];
    std::snprintf(buf, sizeof buf, " jitter_sigma=%.6g", sigma);
    out.parameters += buf;
    return out;
}

void export_curve_csv(const G2Curve& curve, std::ostream& os) {
    os << "tau_s,value,kind,source\n";
    char buf[128];
    for (std::size_t i = 0; i < curve.tau.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%s\n", curve.tau[i], curve.values[i],
                      to_string(curve.kind), to_string(curve.source));
        os << buf;
    }
}

void export_curve_csv_file(const G2Curve& curve, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path);
    export_curve_csv(curve, os);
}

} // namespace fbshom::correlation
