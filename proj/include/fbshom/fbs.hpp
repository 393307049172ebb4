#ifndef FBSHOM_FBS_HPP
#define FBSHOM_FBS_HPP

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "fbshom/spectral.hpp"

namespace fbshom::fbs {

using cplx = std::complex<double>;
using spectral::FrequencyGrid;
using spectral::JointSpectralAmplitude;

/// BS-FWM frequency beam splitter settings. `strength` is the dimensionless
/// gamma*P*L product; the 50:50 point is strength = pi/8 and full conversion
/// pi/4. A nonzero phase mismatch needs the interaction length to form the
/// dimensionless delta-beta * L.
struct FbsParams {
    double strength = 0.0;        // gamma P L
    double pump_phase = 0.0;      // rad
    double pump_separation = 0.0; // rad/s, Omega
    double mismatch = 0.0;        // rad/m, delta-beta
    double length = 1.0;          // m, used only when mismatch != 0

    void validate() const;
};

struct SplitterAmplitudes {
    cplx transmitted; // upsilon
    cplx converted;   // mu
};

/// Delta-beta = 0: upsilon = cos(2s), mu = e^{i phi} sin(2s).
/// Otherwise the damped two-mode solution with gL = sqrt((2s)^2 + (dbL/2)^2).
SplitterAmplitudes splitter_amplitudes(const FbsParams& params);

/// Peak conversion efficiency |mu|^2 of a (possibly mismatched) process,
/// parameterized by gamma*P (1/m), delta-beta (rad/m) and length (m).
double conversion_efficiency(double gamma_p, double delta_beta, double length);

/// Single-photon amplitudes on the two frequency arms, sharing one grid.
struct SingleArmPair {
    FrequencyGrid grid;
    std::vector<cplx> red;
    std::vector<cplx> blue;
    double norm() const;
};

enum class Arm { red, blue };

/// Applies the SU(2) rotation to a single photon entering on one arm. The
/// +/-Omega carrier shift is bookkeeping; what remains on the grid is the
/// envelope-offset detuning of the converted amplitude.
SingleArmPair apply_fbs_single(const JointSpectralAmplitude& jsa, Arm arm,
                               const FbsParams& params);

/// Two-photon state over the three output sectors. Bunched-sector amplitudes
/// are stored exchange-symmetrized so each sector weight is a plain L2 norm.
struct TwoPhotonState {
    FrequencyGrid grid;
    std::vector<cplx> jsa_rb;
    std::vector<cplx> jsa_rr;
    std::vector<cplx> jsa_bb;
    std::vector<cplx> input; // pre-FBS cross amplitude, kept for normalization
    double envelope_offset = 0.0;

    double sector_weight_rb() const;
    double sector_weight_rr() const;
    double sector_weight_bb() const;
    double total_norm() const;
};

/// Lifts a (normalized) JSA into the (R,B) sector.
TwoPhotonState make_two_photon_state(const JointSpectralAmplitude& jsa);

/// One pass through the FBS. Input must be populated only in the (R,B)
/// sector. Output:
///   rb(nu) = |u|^2 phi(nu) - |m|^2 phi(-nu - dOmega)
///   rr(nu) = (u* m / sqrt2) [phi(nu) + phi(-nu - dOmega)]
///   bb(nu) = (-m* u / sqrt2) [phi(-nu) + phi(nu - dOmega)]
TwoPhotonState apply_fbs_two_photon(const TwoPhotonState& state, const FbsParams& params);

/// Columnar text export, one block per sector with the spectral-module header
/// convention.
void export_state(const TwoPhotonState& state, std::ostream& os);
void export_state_file(const TwoPhotonState& state, const std::string& path);

} // namespace fbshom::fbs

#endif
