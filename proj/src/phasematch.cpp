#include "fbshom/phasematch.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "fbshom/fbs.hpp"
#include "fbshom/spectral.hpp"

namespace fbshom::phasematch {

void DispersionProfile::validate() const {
    if (!std::isfinite(reference_frequency) || !std::isfinite(beta2) || !std::isfinite(beta3) ||
        !std::isfinite(beta4))
        throw invalid_parameter("dispersion profile coefficients must be finite");
}

double DispersionProfile::beta_at(double detuning) const {
    const double d2 = detuning * detuning;
    return beta2 / 2.0 * d2 + beta3 / 6.0 * d2 * detuning + beta4 / 24.0 * d2 * d2;
}

void ProcessPlacement::validate() const {
    if (separation <= 0.0) throw invalid_parameter("pump separation must be positive");
    if (length <= 0.0) throw invalid_parameter("fiber length must be positive");
    if (gamma_power < 0.0) throw invalid_parameter("gamma*P must be non-negative");
    const double w[4] = {omega_r(), omega_b(), omega_p2(), omega_p1()};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (w[i] == w[j])
                throw invalid_parameter("the four process frequencies must be distinct");
}

double delta_beta_frequencies(const DispersionProfile& profile, double w_r, double w_p1,
                              double w_b, double w_p2) {
    const double scale = std::max({std::abs(w_r), std::abs(w_p1), std::abs(w_b), std::abs(w_p2),
                                   1.0});
    if (std::abs((w_r + w_p1) - (w_b + w_p2)) > 1e-9 * scale)
        throw invalid_parameter("frequency quartet violates energy conservation");
    return profile.beta_at(w_r) + profile.beta_at(w_p1) - profile.beta_at(w_b) -
           profile.beta_at(w_p2);
}

double delta_beta(const DispersionProfile& profile, const ProcessPlacement& placement) {
    profile.validate();
    placement.validate();
    return delta_beta_frequencies(profile, placement.omega_r(), placement.omega_p1(),
                                  placement.omega_b(), placement.omega_p2());
}

std::vector<ProcessReport> sideband_suppression(const DispersionProfile& profile,
                                                const ProcessPlacement& placement) {
    profile.validate();
    placement.validate();
    const double wr = placement.omega_r(), wb = placement.omega_b();
    const double wp1 = placement.omega_p1(), wp2 = placement.omega_p2();
    const double om = placement.separation;
    const double gp = placement.gamma_power, l = placement.length;

    std::vector<ProcessReport> rows;
    {
        ProcessReport t;
        t.name = "target";
        t.omega_in = wr;
        t.omega_out = wb;
        t.mismatch = delta_beta_frequencies(profile, wr, wp1, wb, wp2);
        t.efficiency = fbs::conversion_efficiency(gp, t.mismatch, l);
        t.matched = true;
        rows.push_back(t);
    }
    {
        // red photon scattered down: R + P2 -> (R - Omega) + P1
        ProcessReport s;
        s.name = "red_down";
        s.omega_in = wr;
        s.omega_out = wr - om;
        s.mismatch = delta_beta_frequencies(profile, wr, wp2, wr - om, wp1);
        s.efficiency = fbs::conversion_efficiency(gp, s.mismatch, l);
        rows.push_back(s);
    }
    {
        // blue photon scattered up: B + P1 -> (B + Omega) + P2
        ProcessReport s;
        s.name = "blue_up";
        s.omega_in = wb;
        s.omega_out = wb + om;
        s.mismatch = delta_beta_frequencies(profile, wb, wp1, wb + om, wp2);
        s.efficiency = fbs::conversion_efficiency(gp, s.mismatch, l);
        rows.push_back(s);
    }
    return rows;
}

double pump_separation_from_fsr(double fsr, int m) {
    if (fsr <= 0.0) throw invalid_parameter("FSR must be positive");
    if (m < 1) throw invalid_parameter("resonance offset m must be >= 1");
    return spectral::two_pi * (2.0 * m * fsr);
}

DispersionProfile default_dsf_profile(double reference_frequency) {
    DispersionProfile p;
    p.reference_frequency = reference_frequency;
    p.beta2 = 0.0;       // pumps placed at the zero-GVD point
    p.beta3 = 1.2e-40; // ~0.12 ps^3/km, typical dispersion-shifted fiber
    return p;
}

void export_design_csv(const std::vector<ProcessReport>& rows, std::ostream& os) {
    os << "process,omega_in_rad_s,omega_out_rad_s,delta_beta_rad_m,efficiency,matched\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%d\n", r.name.c_str(),
                      r.omega_in, r.omega_out, r.mismatch, r.efficiency, r.matched ? 1 : 0);
        os << buf;
    }
}

void export_design_csv_file(const std::vector<ProcessReport>& rows, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open " + path);
    export_design_csv(rows, os);
}

} // namespace fbshom::phasematch
