#ifndef FBSHOM_PHASEMATCH_HPP
#define FBSHOM_PHASEMATCH_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "fbshom/errors.hpp"

namespace fbshom::phasematch {

/// Truncated Taylor expansion of the propagation constant about a reference
/// frequency. beta0 and beta1 are omitted: they cancel identically in any
/// energy-conserving four-wave delta-beta.
struct DispersionProfile {
    double reference_frequency = 0.0; // rad/s
    double beta2 = 0.0;               // s^2/m
    double beta3 = 0.0;               // s^3/m
    double beta4 = 0.0;               // s^4/m

    void validate() const;
    /// beta evaluated at a detuning from the reference frequency.
    double beta_at(double detuning) const;
};

/// Band placement of the BS-FWM process, frequencies relative to the
/// dispersion reference. The quantum band holds (R, B) split by the
/// separation Omega, the pump band holds (P2, P1) with P1 the upper pump, so
/// energy conservation w_R + w_P1 = w_B + w_P2 holds by construction.
struct ProcessPlacement {
    double quantum_center = 0.0; // rad/s, midpoint of R and B
    double pump_center = 0.0;    // rad/s, midpoint of P2 and P1
    double separation = 0.0;     // rad/s, Omega > 0
    double length = 0.0;         // m
    double gamma_power = 0.0;    // 1/m, gamma * P per pump

    void validate() const;
    double omega_r() const { return quantum_center - separation / 2.0; }
    double omega_b() const { return quantum_center + separation / 2.0; }
    double omega_p2() const { return pump_center - separation / 2.0; }
    double omega_p1() const { return pump_center + separation / 2.0; }
};

/// delta-beta = beta(w_r) + beta(w_p1) - beta(w_b) - beta(w_p2) for an
/// arbitrary energy-conserving quartet (w_r + w_p1 = w_b + w_p2 required).
double delta_beta_frequencies(const DispersionProfile& profile, double w_r, double w_p1,
                              double w_b, double w_p2);

/// Mismatch of the target process.
double delta_beta(const DispersionProfile& profile, const ProcessPlacement& placement);

struct ProcessReport {
    std::string name;       // "target", "red_down", "blue_up"
    double omega_in = 0.0;  // rad/s, converted photon input
    double omega_out = 0.0; // rad/s, converted photon output
    double mismatch = 0.0;  // rad/m
    double efficiency = 0.0;
    bool matched = false;   // true for the designed process
};

/// Target process plus the first-order spurious Bragg sidebands (red photon
/// shifted down by Omega, blue photon shifted up by Omega, each using the
/// pumps in the exchanged role). Efficiencies use the mismatched two-mode
/// conversion formula.
std::vector<ProcessReport> sideband_suppression(const DispersionProfile& profile,
                                                const ProcessPlacement& placement);

/// Pump separation that matches a pair of ring resonances m FSRs either side
/// of the pump: Omega = 2 pi * 2 m * fsr.
double pump_separation_from_fsr(double fsr, int m);

/// Representative dispersion-shifted-fiber numbers, zero GVD at the
/// reference. Illustrative defaults, not measured values.
DispersionProfile default_dsf_profile(double reference_frequency);

/// CSV rows `process,omega_in_rad_s,omega_out_rad_s,delta_beta_rad_m,efficiency,matched`.
void export_design_csv(const std::vector<ProcessReport>& rows, std::ostream& os);
void export_design_csv_file(const std::vector<ProcessReport>& rows, const std::string& path);

} // namespace fbshom::phasematch

#endif
