#ifndef FBSHOM_ESTIMATION_HPP
#define FBSHOM_ESTIMATION_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "fbshom/correlation.hpp"
#include "fbshom/montecarlo.hpp"

namespace fbshom::estimation {

using correlation::BeatModel;
using correlation::G2Curve;
using montecarlo::CorrelationHistogram;

struct ValueWithError {
    double value = 0.0;
    double error = 0.0;
};

/// In-sync counts scaled by the off-sync peak level (the average of the two
/// central off-sync bins), so a pumps-off run normalizes to a unit-peak
/// double exponential with its envelope intact. Errors use Poisson variance
/// max(count, 1) propagated in quadrature with the peak-level uncertainty.
G2Curve normalize_histogram(const CorrelationHistogram& hist);

/// alpha_r = 1 - 2 C_on(0)/C_off(0), both averaged over the bins within one
/// bin of tau = 0, on a curve produced by normalize_histogram.
ValueWithError raw_visibility(const G2Curve& curve);

struct FitResult {
    BeatModel model;
    BeatModel uncertainty; // 1-sigma errors, field by field
    double chi2 = 0.0;
    int dof = 0;
    int iterations = 0;
    double final_damping = 0.0;
    double gradient_norm = 0.0;
    bool converged = false;
    bool alpha_clamped = false;
    bool detuning_fixed = false;
    std::string notes;
};

/// Damped weighted least squares of the beating model over
/// (A, dw, dOmega, alpha, t0, B) with analytic derivatives. Initialization is
/// automatic unless `initial` is given: dw from the weighted mean |tau|,
/// dOmega from the dominant peak of the curve's discrete spectrum, alpha from
/// the raw visibility, t0 from the centroid. When the detuning resolves fewer
/// than two fringe periods across the axis it is held fixed (and A pinned to
/// the normalized peak of 1), flagged in the result. If jitter_sigma > 0 the
/// model and its derivatives are convolved with the detector response before
/// comparison. Non-convergence throws fit_error carrying the best iterate.
FitResult fit_beating(const G2Curve& curve, const std::optional<BeatModel>& initial = {},
                      double jitter_sigma = 0.0);

/// Normalized autocorrelation peak of a tap run: the in-sync B1 x B2 level at
/// tau = 0 over the off-sync R x B level, corrected for the bunched-sector
/// branching |u m|^2, the tap factor 1/2, and the detector-efficiency ratio.
/// The ideal value is 1 + alpha, i.e. 2 at full visibility.
ValueWithError autocorrelation_peak(const CorrelationHistogram& hist,
                                    const montecarlo::ExperimentConfig& config);

/// Key = value text block, one parameter or diagnostic per line.
void export_fit_result(const FitResult& fit, std::ostream& os);
/// One-line CSV aggregation row (with a matching header helper).
std::string fit_result_csv_header();
std::string fit_result_csv_row(const FitResult& fit);

} // namespace fbshom::estimation

#endif
