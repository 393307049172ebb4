#ifndef FBSHOM_CORRELATION_HPP
#define FBSHOM_CORRELATION_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "fbshom/fbs.hpp"

namespace fbshom::correlation {

enum class CurveKind { cross_rb, auto_rr, auto_bb };
enum class CurveSource { analytic, numeric, montecarlo };

const char* to_string(CurveKind k);
const char* to_string(CurveSource s);

/// Binned second-order correlation curve in normalized units (the pumps-off
/// peak defines 1).
struct G2Curve {
    std::vector<double> tau;    // s, uniform
    std::vector<double> values; // >= 0
    std::vector<double> errors; // empty unless derived from counts
    CurveKind kind = CurveKind::cross_rb;
    CurveSource source = CurveSource::analytic;
    std::string parameters;     // human-readable provenance
    bool warning_empty_sector = false;

    double spacing() const;
    double integral() const;
};

/// Beating model: A exp(-dw |tau - t0|) (1/2 - (alpha/2) cos(dOmega (tau - t0))) + B.
struct BeatModel {
    double linewidth = 0.0;  // dw, rad/s
    double detuning = 0.0;   // dOmega, rad/s
    double visibility = 1.0; // alpha in [0,1]
    double amplitude = 1.0;  // A
    double time_offset = 0.0;
    double background = 0.0;

    double evaluate(double tau) const;
};

std::vector<double> default_tau_axis(); // +-8 ns, 20 ps spacing

G2Curve g2_cross_analytic(double linewidth, double detuning, double alpha,
                          const std::vector<double>& tau_axis, double amplitude = 1.0);

G2Curve g2_pumps_off_analytic(double linewidth, const std::vector<double>& tau_axis,
                              double amplitude = 1.0);

/// DFT of the selected sector amplitude with algebraic tail corrections,
/// normalized so the pumps-off (input) peak equals 1.
G2Curve g2_numeric(const fbs::TwoPhotonState& state, CurveKind kind,
                   const std::vector<double>& tau_axis);

/// Correlation curve of a bunched sector plus its integrated weight; ideal
/// enhancement over the incoherent |u m|^2 baseline is a factor 2.
G2Curve g2_auto_bunched(const fbs::TwoPhotonState& state, CurveKind kind,
                        const std::vector<double>& tau_axis);

G2Curve convolve_jitter(const G2Curve& curve, double sigma);

/// CSV rows `tau_s,value,kind,source` with a header line.
void export_curve_csv(const G2Curve& curve, std::ostream& os);
void export_curve_csv_file(const G2Curve& curve, const std::string& path);

} // namespace fbshom::correlation

#endif
