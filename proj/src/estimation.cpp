#include "fbshom/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "fbshom/numerics.hpp"

namespace fbshom::estimation {

namespace {

// bins whose center lies within one bin of tau = 0
std::vector<std::size_t> central_bins(const std::vector<double>& tau, double spacing) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < tau.size(); ++i)
        if (std::abs(tau[i]) < spacing) idx.push_back(i);
    return idx;
}

struct PeakLevel {
    double value = 0.0;
    double error = 0.0;
};

PeakLevel off_sync_peak(const CorrelationHistogram& hist) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < hist.n_bins(); ++i)
        if (std::abs(hist.tau_center(i)) < hist.tau_bin) {
            sum += static_cast<double>(hist.off_sync[i]);
            ++n;
        }
    if (n == 0 || sum <= 0.0)
        throw normalization_error("off-sync histogram has no counts at tau = 0");
    return {sum / static_cast<double>(n), std::sqrt(sum) / static_cast<double>(n)};
}

} // namespace

G2Curve normalize_histogram(const CorrelationHistogram& hist) {
    if (hist.total_off_sync() <= 0)
        throw normalization_error("off-sync partition is empty; nothing to normalize against");
    const PeakLevel peak = off_sync_peak(hist);
    G2Curve curve;
    curve.kind = correlation::CurveKind::cross_rb;
    curve.source = correlation::CurveSource::montecarlo;
    curve.parameters = hist.parameters;
    curve.tau.resize(hist.n_bins());
    curve.values.resize(hist.n_bins());
    curve.errors.resize(hist.n_bins());
    const double rel_peak = peak.error / peak.value;
    for (std::size_t i = 0; i < hist.n_bins(); ++i) {
        const double c = static_cast<double>(hist.in_sync[i]);
        curve.tau[i] = hist.tau_center(i);
        curve.values[i] = c / peak.value;
        const double var_c = std::max(c, 1.0); // Poisson variance, zero-count floor
        curve.errors[i] = std::sqrt(var_c + c * c * rel_peak * rel_peak) / peak.value;
    }
    return curve;
}

ValueWithError raw_visibility(const G2Curve& curve) {
    if (curve.tau.size() < 3 || curve.errors.size() != curve.tau.size())
        throw invalid_parameter("raw visibility needs a normalized curve with errors");
    const auto idx = central_bins(curve.tau, curve.spacing());
    if (idx.empty()) throw invalid_parameter("no bins near tau = 0");
    double v = 0.0, var = 0.0;
    for (auto i : idx) {
        v += curve.values[i];
        var += curve.errors[i] * curve.errors[i];
    }
    const double n = static_cast<double>(idx.size());
    return {1.0 - 2.0 * v / n, 2.0 * std::sqrt(var) / n};
}

namespace {

constexpr int kNumParams = 6; // A, dw, dOmega, alpha, t0, B

std::array<double, kNumParams> pack(const BeatModel& m) {
    return {m.amplitude, m.linewidth, m.detuning, m.visibility, m.time_offset, m.background};
}

BeatModel unpack(const std::array<double, kNumParams>& p) {
    BeatModel m;
    m.amplitude = p[0];
    m.linewidth = p[1];
    m.detuning = p[2];
    m.visibility = p[3];
    m.time_offset = p[4];
    m.background = p[5];
    return m;
}

void eval_model_at(const std::array<double, kNumParams>& p, const std::vector<double>& tau,
                   std::vector<double>& model,
                   std::array<std::vector<double>, kNumParams>* jac) {
    const double a = p[0], dw = p[1], dom = p[2], al = p[3], t0 = p[4], b = p[5];
    const std::size_t n = tau.size();
    model.resize(n);
    if (jac)
        for (auto& col : *jac) col.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = tau[i] - t0;
        const double env = std::exp(-dw * std::abs(u));
        const double cosw = std::cos(dom * u), sinw = std::sin(dom * u);
        const double shape = 0.5 - 0.5 * al * cosw;
        model[i] = a * env * shape + b;
        if (!jac) continue;
        (*jac)[0][i] = env * shape;
        (*jac)[1][i] = -a * std::abs(u) * env * shape;
        (*jac)[2][i] = a * env * 0.5 * al * u * sinw;
        (*jac)[3][i] = -a * env * 0.5 * cosw;
        const double du = -dw * (u >= 0 ? 1.0 : -1.0) * env * shape +
                          env * 0.5 * al * dom * sinw;
        (*jac)[4][i] = -a * du;
        (*jac)[5][i] = 1.0;
    }
}

// Model values and the analytic Jacobian on the tau axis. With a detector
// response the curve came from binned, smeared counts, so the model is
// evaluated on an oversampled axis, convolved there (the bin spacing is too
// coarse to sample a 40 ps kernel), and averaged back over each bin.
void eval_model(const std::array<double, kNumParams>& p, const std::vector<double>& tau,
                double spacing, double jitter_sigma, std::vector<double>& model,
                std::array<std::vector<double>, kNumParams>* jac) {
    if (jitter_sigma <= 0.0) {
        eval_model_at(p, tau, model, jac);
        return;
    }
    constexpr int q = 5;
    const std::size_t n = tau.size();
    std::vector<double> fine_tau(n * q);
    const double h = spacing / q;
    for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < q; ++j)
            fine_tau[i * q + j] = tau[i] - spacing / 2.0 + (j + 0.5) * h;
    std::vector<double> fine_model;
    std::array<std::vector<double>, kNumParams> fine_jac;
    eval_model_at(p, fine_tau, fine_model, jac ? &fine_jac : nullptr);
    fine_model = numerics::gaussian_convolve(fine_model, h, jitter_sigma);
    if (jac)
        for (int j = 0; j < kNumParams - 1; ++j) // background column is flat
            fine_jac[j] = numerics::gaussian_convolve(fine_jac[j], h, jitter_sigma);
    auto average_down = [&](const std::vector<double>& fine, std::vector<double>& out) {
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < q; ++j) s += fine[i * q + j];
            out[i] = s / q;
        }
    };
    average_down(fine_model, model);
    if (jac) {
        for (int j = 0; j < kNumParams - 1; ++j) average_down(fine_jac[j], (*jac)[j]);
        (*jac)[kNumParams - 1].assign(n, 1.0);
    }
}

double chi_square(const std::vector<double>& values, const std::vector<double>& model,
                  const std::vector<double>& weights) {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double r = values[i] - model[i];
        s += weights[i] * r * r;
    }
    return s;
}

BeatModel auto_initialize(const G2Curve& curve) {
    const std::size_t n = curve.tau.size();
    BeatModel m;
    // background from the outer tenth of the axis
    double b = 0.0;
    std::size_t nb = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (i < n / 20 || i >= n - n / 20) {
            b += curve.values[i];
            ++nb;
        }
    m.background = nb ? std::max(0.0, b / static_cast<double>(nb)) : 0.0;
    // centroid and width of the excess over background
    double w_sum = 0.0, t_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::max(curve.values[i] - m.background, 0.0);
        w_sum += w;
        t_sum += w * curve.tau[i];
    }
    m.time_offset = w_sum > 0.0 ? t_sum / w_sum : 0.0;
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::max(curve.values[i] - m.background, 0.0);
        abs_sum += w * std::abs(curve.tau[i] - m.time_offset);
    }
    const double mean_abs = w_sum > 0.0 ? abs_sum / w_sum : curve.spacing();
    m.linewidth = mean_abs > 0.0 ? 1.0 / mean_abs : 1.0 / curve.spacing();
    // dominant oscillation after removing the smooth envelope, whose own
    // spectral lobe would otherwise mask a slow beat
    const double span = curve.tau.back() - curve.tau.front();
    std::vector<double> resid(n);
    {
        double ee = 0.0, ev = 0.0;
        std::vector<double> env(n);
        for (std::size_t i = 0; i < n; ++i) {
            env[i] = std::exp(-m.linewidth * std::abs(curve.tau[i] - m.time_offset));
            ee += env[i] * env[i];
            ev += env[i] * (curve.values[i] - m.background);
        }
        const double c = ee > 0.0 ? ev / ee : 0.0;
        for (std::size_t i = 0; i < n; ++i)
            resid[i] = curve.values[i] - m.background - c * env[i];
    }
    double best_power = 0.0, best_omega = 0.0;
    const double omega_lo = 2.0 * spectral::two_pi / span;
    const double omega_hi = spectral::two_pi / (2.0 * curve.spacing());
    const int scan = 2048;
    for (int k = 0; k < scan; ++k) {
        const double omega = omega_lo + (omega_hi - omega_lo) * k / (scan - 1);
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            re += resid[i] * std::cos(omega * curve.tau[i]);
            im += resid[i] * std::sin(omega * curve.tau[i]);
        }
        const double power = re * re + im * im;
        if (power > best_power) {
            best_power = power;
            best_omega = omega;
        }
    }
    m.detuning = best_omega;
    m.amplitude = 1.0;
    double center = 0.0;
    std::size_t nc = 0;
    for (auto i : central_bins(curve.tau, curve.spacing())) {
        center += curve.values[i];
        ++nc;
    }
    if (nc) center /= static_cast<double>(nc);
    m.visibility = std::clamp(1.0 - 2.0 * (center - m.background), 0.0, 1.0);
    return m;
}

std::string format_model(const BeatModel& m) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "A=%.6g dw=%.6g dOmega=%.6g alpha=%.6g t0=%.6g B=%.6g", m.amplitude,
                  m.linewidth, m.detuning, m.visibility, m.time_offset, m.background);
    return buf;
}

} // namespace

FitResult fit_beating(const G2Curve& curve, const std::optional<BeatModel>& initial,
                      double jitter_sigma) {
    const std::size_t n = curve.tau.size();
    if (n < 50) throw fit_error("need at least 50 bins to fit the beating model");
    const bool have_errors = curve.errors.size() == n;
    if (have_errors) {
        std::size_t informative = 0;
        for (double e : curve.errors)
            if (e > 0.0) ++informative;
        if (informative < 50) throw fit_error("need at least 50 bins with error estimates");
    }
    const double spacing = curve.spacing();
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(curve.tau[i] - curve.tau[i - 1] - spacing) > 1e-6 * spacing)
            throw fit_error("fit requires a uniform tau axis");

    std::vector<double> weights(n, 1.0);
    if (have_errors)
        for (std::size_t i = 0; i < n; ++i)
            weights[i] = 1.0 / std::max(curve.errors[i] * curve.errors[i], 1e-300);

    BeatModel start = initial ? *initial : auto_initialize(curve);
    const double span = curve.tau.back() - curve.tau.front();
    // fewer than two fringe periods across the axis: the detuning (and with
    // it the amplitude/visibility split) is not identifiable
    const bool degenerate = start.detuning * span < 2.0 * spectral::two_pi;
    FitResult result;
    result.detuning_fixed = degenerate;
    if (degenerate) {
        start.detuning = 0.0;
        start.amplitude = 1.0; // pinned to the normalization convention
        result.notes = "detuning held fixed (unresolved); amplitude pinned to 1; "
                       "alpha/detuning strongly correlated in this regime; ";
    }

    std::array<bool, kNumParams> free{};
    free = {!degenerate, true, !degenerate, true, true, true};
    std::vector<int> map;
    for (int j = 0; j < kNumParams; ++j)
        if (free[j]) map.push_back(j);
    const std::size_t k = map.size();

    // count scale of the normalized curve, recovered from the supplied error
    // bars (err^2 ~ counts/scale^2, value ~ counts/scale); used to rebuild
    // weights from the model, since weighting by the observed counts biases
    // the decay steep wherever the tail bins fluctuate low
    double count_scale = 0.0;
    if (have_errors) {
        std::vector<double> ratios;
        for (std::size_t i = 0; i < n; ++i)
            if (curve.values[i] > 0.0 && curve.errors[i] > 0.0)
                ratios.push_back(curve.values[i] / (curve.errors[i] * curve.errors[i]));
        if (ratios.size() > n / 4) {
            std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
            count_scale = ratios[ratios.size() / 2];
        }
    }

    auto p = pack(start);
    std::vector<double> model;
    std::array<std::vector<double>, kNumParams> jac;
    eval_model(p, curve.tau, spacing, jitter_sigma, model, &jac);
    double chi2 = chi_square(curve.values, model, weights);

    double lambda = 1e-3;
    bool converged = false;
    int iter = 0;
    std::vector<double> hess(k * k), grad(k), step;
    const int rounds = count_scale > 0.0 ? 3 : 1;
    for (int round = 0; round < rounds; ++round) {
    if (round > 0) {
        // model-based Poisson variance with the same one-count floor as the
        // input errors
        for (std::size_t i = 0; i < n; ++i) {
            const double var = std::max(model[i] * count_scale, 1.0) /
                               (count_scale * count_scale);
            weights[i] = 1.0 / var;
        }
        chi2 = chi_square(curve.values, model, weights);
        converged = false;
        lambda = 1e-3;
    }
    for (; iter < 200 * rounds && !converged; ++iter) {
        std::fill(hess.begin(), hess.end(), 0.0);
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = curve.values[i] - model[i];
            for (std::size_t a = 0; a < k; ++a) {
                const double ja = jac[static_cast<std::size_t>(map[a])][i];
                grad[a] += weights[i] * ja * r;
                for (std::size_t b = a; b < k; ++b)
                    hess[a * k + b] += weights[i] * ja * jac[static_cast<std::size_t>(map[b])][i];
            }
        }
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < a; ++b) hess[a * k + b] = hess[b * k + a];
        result.gradient_norm = 0.0;
        for (double g : grad) result.gradient_norm = std::max(result.gradient_norm, std::abs(g));

        bool accepted = false;
        for (int tries = 0; tries < 50 && !accepted; ++tries) {
            std::vector<double> damped = hess;
            for (std::size_t a = 0; a < k; ++a)
                damped[a * k + a] += lambda * std::max(hess[a * k + a], 1e-300);
            if (!numerics::solve_linear(damped, grad, k, step)) {
                lambda *= 10.0;
                continue;
            }
            auto trial = p;
            for (std::size_t a = 0; a < k; ++a) trial[static_cast<std::size_t>(map[a])] += step[a];
            if (trial[1] <= 0.0 || trial[0] < 0.0) { // dw and A must stay physical
                lambda *= 10.0;
                continue;
            }
            std::vector<double> trial_model;
            eval_model(trial, curve.tau, spacing, jitter_sigma, trial_model, &jac);
            const double trial_chi2 = chi_square(curve.values, trial_model, weights);
            if (trial_chi2 <= chi2) {
                // converged when the accepted step no longer moves any parameter
                static constexpr std::array<double, kNumParams> floors{1e-3, 1e3, 1e3,
                                                                       1e-3, 1e-12, 1e-6};
                double rel = 0.0;
                for (std::size_t a = 0; a < k; ++a) {
                    const auto j = static_cast<std::size_t>(map[a]);
                    rel = std::max(rel, std::abs(step[a]) / std::max(std::abs(p[j]), floors[j]));
                }
                p = trial;
                model = std::move(trial_model);
                chi2 = trial_chi2;
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (rel < 1e-8) converged = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted) {
            converged = true; // stuck at a chi2 plateau: treat as converged
            break;
        }
    }
    }
    result.iterations = iter;
    result.final_damping = lambda;
    result.converged = converged;
    if (!converged)
        throw fit_error("beating fit did not converge; best iterate: " +
                        format_model(unpack(p)));

    // curvature-based uncertainties; rescale by chi2/dof only when no error
    // bars were supplied
    eval_model(p, curve.tau, spacing, jitter_sigma, model, &jac);
    std::fill(hess.begin(), hess.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b)
                hess[a * k + b] += weights[i] * jac[static_cast<std::size_t>(map[a])][i] *
                                   jac[static_cast<std::size_t>(map[b])][i];
    std::vector<double> cov;
    if (!numerics::invert_matrix(hess, k, cov))
        throw fit_error("singular curvature matrix at the fit optimum");
    if (count_scale > 0.0) {
        // the one-count floor in the weights is not the true Poisson variance
        // (it deliberately down-weights near-empty bins), so (J'WJ)^-1 alone
        // overstates the parameter scatter; propagate the model variance
        // through the sandwich form A^-1 (J'W V W J) A^-1 instead
        std::vector<double> b(k * k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double var = std::max(model[i], 0.0) / count_scale;
            const double w2v = weights[i] * weights[i] * var;
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t c2 = 0; c2 < k; ++c2)
                    b[a * k + c2] += w2v * jac[static_cast<std::size_t>(map[a])][i] *
                                     jac[static_cast<std::size_t>(map[c2])][i];
        }
        std::vector<double> ab(k * k, 0.0), sandwich(k * k, 0.0);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t c2 = 0; c2 < k; ++c2)
                for (std::size_t m2 = 0; m2 < k; ++m2)
                    ab[a * k + c2] += cov[a * k + m2] * b[m2 * k + c2];
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t c2 = 0; c2 < k; ++c2)
                for (std::size_t m2 = 0; m2 < k; ++m2)
                    sandwich[a * k + c2] += ab[a * k + m2] * cov[m2 * k + c2];
        cov = std::move(sandwich);
    }
    result.chi2 = chi_square(curve.values, model, weights);
    result.dof = static_cast<int>(n) - static_cast<int>(k);
    double scale = 1.0;
    if (!have_errors && result.dof > 0) {
        scale = result.chi2 / result.dof;
        result.notes += "uncertainties scaled by chi2/dof (no input error bars); ";
    }
    std::array<double, kNumParams> sigma{};
    for (std::size_t a = 0; a < k; ++a)
        sigma[static_cast<std::size_t>(map[a])] = std::sqrt(std::max(cov[a * k + a] * scale, 0.0));

    result.model = unpack(p);
    result.uncertainty = unpack(sigma);
    if (result.model.visibility < 0.0 || result.model.visibility > 1.0) {
        result.model.visibility = std::clamp(result.model.visibility, 0.0, 1.0);
        result.alpha_clamped = true;
        result.notes += "alpha clamped into [0, 1]; ";
    }
    return result;
}

ValueWithError autocorrelation_peak(const CorrelationHistogram& hist,
                                    const montecarlo::ExperimentConfig& config) {
    const PeakLevel off = off_sync_peak(hist);
    double in = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < hist.n_bins(); ++i)
        if (std::abs(hist.tau_center(i)) < hist.tau_bin) {
            in += static_cast<double>(hist.in_sync[i]);
            ++n;
        }
    if (n == 0) throw invalid_parameter("no bins near tau = 0");
    const auto [t, c] = fbs::splitter_amplitudes(config.fbs);
    const double branching = std::norm(t) * std::norm(c);
    if (branching <= 0.0)
        throw invalid_parameter("autocorrelation peak undefined at zero conversion");
    const double eff_ratio = config.detection_efficiency_b /
                             std::max(config.detection_efficiency_r, 1e-300);
    const double baseline = off.value * branching * 0.5 * eff_ratio;
    const double in_avg = in / static_cast<double>(n);
    const double in_err = std::sqrt(std::max(in, 1.0)) / static_cast<double>(n);
    const double value = in_avg / baseline;
    const double rel =
        std::sqrt(std::pow(in_err / std::max(in_avg, 1e-300), 2) +
                  std::pow(off.error / off.value, 2));
    return {value, value * rel};
}

void export_fit_result(const FitResult& fit, std::ostream& os) {
    char buf[128];
    auto line = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, v);
        os << buf;
    };
    line("amplitude", fit.model.amplitude);
    line("amplitude_sigma", fit.uncertainty.amplitude);
    line("linewidth_rad_s", fit.model.linewidth);
    line("linewidth_sigma", fit.uncertainty.linewidth);
    line("detuning_rad_s", fit.model.detuning);
    line("detuning_sigma", fit.uncertainty.detuning);
    line("visibility", fit.model.visibility);
    line("visibility_sigma", fit.uncertainty.visibility);
    line("time_offset_s", fit.model.time_offset);
    line("time_offset_sigma", fit.uncertainty.time_offset);
    line("background", fit.model.background);
    line("background_sigma", fit.uncertainty.background);
    line("chi2", fit.chi2);
    os << "dof = " << fit.dof << "\n";
    os << "iterations = " << fit.iterations << "\n";
    line("final_damping", fit.final_damping);
    line("gradient_norm", fit.gradient_norm);
    os << "converged = " << (fit.converged ? 1 : 0) << "\n";
    os << "alpha_clamped = " << (fit.alpha_clamped ? 1 : 0) << "\n";
    os << "detuning_fixed = " << (fit.detuning_fixed ? 1 : 0) << "\n";
    os << "notes = " << fit.notes << "\n";
}

std::string fit_result_csv_header() {
    return "amplitude,amplitude_sigma,linewidth_rad_s,linewidth_sigma,detuning_rad_s,"
           "detuning_sigma,visibility,visibility_sigma,time_offset_s,time_offset_sigma,"
           "background,background_sigma,chi2,dof,iterations,converged,alpha_clamped,"
           "detuning_fixed";
}

std::string fit_result_csv_row(const FitResult& fit) {
    char buf[640];
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%d,%d,%d,%d,%d",
                  fit.model.amplitude, fit.uncertainty.amplitude, fit.model.linewidth,
                  fit.uncertainty.linewidth, fit.model.detuning, fit.uncertainty.detuning,
                  fit.model.visibility, fit.uncertainty.visibility, fit.model.time_offset,
                  fit.uncertainty.time_offset, fit.model.background, fit.uncertainty.background,
                  fit.chi2, fit.dof, fit.iterations, fit.converged ? 1 : 0,
                  fit.alpha_clamped ? 1 : 0, fit.detuning_fixed ? 1 : 0);
    return buf;
}

} // namespace fbshom::estimation
