#include "fbshom/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fbshom/numerics.hpp"

namespace fbshom::spectral {

void ResonatorSpec::validate() const {
    if (linewidth <= 0.0) throw invalid_parameter("ResonatorSpec: linewidth must be > 0");
    if (fsr <= 0.0) throw invalid_parameter("ResonatorSpec: fsr must be > 0");
    if (signal_index != idler_index)
        throw invalid_parameter("ResonatorSpec: signal_index must equal idler_index "
                                "(energy conservation pairs symmetric resonances)");
    if (signal_index < 1) throw invalid_parameter("ResonatorSpec: resonance index must be >= 1");
}

void FrequencyGrid::validate() const {
    if (n_points < 2) throw invalid_parameter("FrequencyGrid: n_points must be >= 2");
    if (span <= 0.0) throw invalid_parameter("FrequencyGrid: span must be > 0");
}

void FrequencyGrid::validate_for_linewidth(double linewidth) const {
    validate();
    if (linewidth <= 0.0) throw invalid_parameter("FrequencyGrid: linewidth must be > 0");
    if (spacing() > linewidth / 16.0)
        throw resolution_error("grid too coarse: spacing exceeds linewidth/16");
    if (span < 80.0 * linewidth)
        throw resolution_error("grid too narrow: span below 80 linewidths");
}

FrequencyGrid default_grid(double linewidth) {
    if (linewidth <= 0.0) throw invalid_parameter("default_grid: linewidth must be > 0");
    return FrequencyGrid{0.0, 128.0 * linewidth, 4096};
}

double JointSpectralAmplitude::norm() const {
    double acc = 0.0;
    for (const auto& a : amplitude) acc += std::norm(a);
    return acc * grid.spacing();
}

void JointSpectralAmplitude::normalize() {
    const double n = norm();
    if (n <= 0.0) throw normalization_error("JSA has zero norm");
    const double s = 1.0 / std::sqrt(n);
    for (auto& a : amplitude) a *= s;
}

cplx lorentzian_lineshape(double nu, double linewidth) {
    if (linewidth <= 0.0) throw invalid_parameter("lorentzian_lineshape: linewidth must be > 0");
    const double hw = linewidth / 2.0;
    return std::sqrt(hw) / cplx(hw, -nu);
}

JointSpectralAmplitude build_ring_jsa(const ResonatorSpec& spec, const FrequencyGrid& grid) {
    spec.validate();
    grid.validate_for_linewidth(spec.linewidth);
    JointSpectralAmplitude jsa;
    jsa.grid = grid;
    jsa.pump_frequency = spec.pump_frequency;
    jsa.amplitude.resize(grid.n_points);
    for (std::size_t k = 0; k < grid.n_points; ++k) {
        const double nu = grid.point(k);
        // blue-resonance factor evaluated on the line omega_B = 2 omega_P - omega_R
        jsa.amplitude[k] = lorentzian_lineshape(nu, spec.linewidth) *
                           lorentzian_lineshape(-nu, spec.linewidth);
    }
    jsa.normalize();
    return jsa;
}

JointSpectralAmplitude apply_envelope_offset(const JointSpectralAmplitude& jsa, double offset) {
    if (std::abs(offset) >= jsa.grid.span / 4.0)
        throw resolution_error("envelope offset exceeds a quarter of the grid span");
    JointSpectralAmplitude out = jsa;
    out.envelope_offset = offset;
    return out;
}

void export_jsa(const JointSpectralAmplitude& jsa, std::ostream& os) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "# center_rad_s %.17g\n", jsa.grid.center);
    os << buf;
    std::snprintf(buf, sizeof buf, "# span_rad_s %.17g\n", jsa.grid.span);
    os << buf;
    std::snprintf(buf, sizeof buf, "# n_points %zu\n", jsa.grid.n_points);
    os << buf;
    std::snprintf(buf, sizeof buf, "# pump_frequency_rad_s %.17g\n", jsa.pump_frequency);
    os << buf;
    std::snprintf(buf, sizeof buf, "# envelope_offset_rad_s %.17g\n", jsa.envelope_offset);
    os << buf;
    for (std::size_t k = 0; k < jsa.grid.n_points; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", jsa.grid.point(k),
                      jsa.amplitude[k].real(), jsa.amplitude[k].imag());
        os << buf;
    }
}

void export_jsa_file(const JointSpectralAmplitude& jsa, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path);
    export_jsa(jsa, os);
}

JointSpectralAmplitude import_jsa(std::istream& is) {
    JointSpectralAmplitude jsa;
    std::string line;
    bool have_center = false, have_span = false, have_n = false;
    while (is.peek() == '#') {
        std::getline(is, line);
        std::istringstream ss(line);
        std::string hash, key;
        ss >> hash >> key;
        if (key == "center_rad_s") { ss >> jsa.grid.center; have_center = true; }
        else if (key == "span_rad_s") { ss >> jsa.grid.span; have_span = true; }
        else if (key == "n_points") { ss >> jsa.grid.n_points; have_n = true; }
        else if (key == "pump_frequency_rad_s") ss >> jsa.pump_frequency;
        else if (key == "envelope_offset_rad_s") ss >> jsa.envelope_offset;
        else throw io_error("unknown JSA header key: " + key);
        if (!ss) throw io_error("malformed JSA header line: " + line);
    }
    if (!have_center || !have_span || !have_n)
        throw io_error("JSA import: missing header fields");
    jsa.grid.validate();
    jsa.amplitude.reserve(jsa.grid.n_points);
    double nu, re, im;
    while (is >> nu >> re >> im) jsa.amplitude.emplace_back(re, im);
    if (jsa.amplitude.size() != jsa.grid.n_points)
        throw io_error("JSA import: row count does not match n_points");
    return jsa;
}

JointSpectralAmplitude import_jsa_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open for reading: " + path);
    return import_jsa(is);
}

} // namespace fbshom::spectral
