#ifndef FBSHOM_SPECTRAL_HPP
#define FBSHOM_SPECTRAL_HPP

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "fbshom/errors.hpp"

namespace fbshom::spectral {

using cplx = std::complex<double>;

inline constexpr double two_pi = 6.283185307179586476925286766559;

/// CW-pumped microring photon-pair source. The red photon sits at
/// omega_p - m * 2*pi*fsr and the blue photon at omega_p + m * 2*pi*fsr.
struct ResonatorSpec {
    double pump_frequency = 0.0;          // rad/s
    double fsr = 201.275e9;               // Hz
    double linewidth = two_pi * 270e6;    // FWHM, rad/s
    int signal_index = 2;
    int idler_index = 2;

    void validate() const;
    double red_center() const { return pump_frequency - signal_index * two_pi * fsr; }
    double blue_center() const { return pump_frequency + signal_index * two_pi * fsr; }
    double envelope_separation() const { return blue_center() - red_center(); }
};

/// Uniform grid over the detuning nu = omega_R - omega_R0.
struct FrequencyGrid {
    double center = 0.0;   // rad/s
    double span = 0.0;     // rad/s
    std::size_t n_points = 0;

    double spacing() const { return span / static_cast<double>(n_points - 1); }
    double point(std::size_t k) const {
        return center - span / 2.0 + spacing() * static_cast<double>(k);
    }
    double lower_edge() const { return center - span / 2.0; }
    double upper_edge() const { return center + span / 2.0; }

    void validate() const;
    /// Checks the resolution invariants against a resonance linewidth:
    /// spacing <= linewidth/16 and span >= 80 linewidths.
    void validate_for_linewidth(double linewidth) const;

    bool operator==(const FrequencyGrid&) const = default;
};

/// Grid satisfying the default resolution margins: span = 128 linewidths,
/// 4096 points.
FrequencyGrid default_grid(double linewidth);

/// Discretized 1-D biphoton amplitude phi(nu). The CW energy-conservation
/// delta is collapsed: the blue frequency is pinned to 2*omega_p - omega_R,
/// recorded through `pump_frequency`.
struct JointSpectralAmplitude {
    FrequencyGrid grid;
    std::vector<cplx> amplitude;
    double pump_frequency = 0.0;   // omega_P anchor of the collapsed constraint
    double envelope_offset = 0.0;  // rad/s, the delta-Omega seen by a downstream FBS

    double norm() const;           // integral of |phi|^2 dnu
    void normalize();              // rescale to unit norm
};

/// l(nu) = sqrt(dw/2) / (-i nu + dw/2); |l|^2 is a Lorentzian of FWHM dw.
cplx lorentzian_lineshape(double nu, double linewidth);

/// Ring-source JSA on the energy-conservation line:
/// phi(nu) = l(nu) l(-nu), normalized.
JointSpectralAmplitude build_ring_jsa(const ResonatorSpec& spec, const FrequencyGrid& grid);

/// Relabels the envelope centers so the downstream FBS sees a pump-separation
/// mismatch delta-Omega = offset. Amplitudes are untouched.
JointSpectralAmplitude apply_envelope_offset(const JointSpectralAmplitude& jsa, double offset);

/// Columnar text export: header lines `# center_rad_s`, `# span_rad_s`,
/// `# n_points`, then rows `nu_rad_s re im` at 17 significant digits.
void export_jsa(const JointSpectralAmplitude& jsa, std::ostream& os);
void export_jsa_file(const JointSpectralAmplitude& jsa, const std::string& path);
JointSpectralAmplitude import_jsa(std::istream& is);
JointSpectralAmplitude import_jsa_file(const std::string& path);

} // namespace fbshom::spectral

#endif
