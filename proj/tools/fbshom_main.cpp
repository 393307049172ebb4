#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fbshom/config.hpp"
#include "fbshom/correlation.hpp"
#include "fbshom/estimation.hpp"
#include "fbshom/montecarlo.hpp"
#include "fbshom/phasematch.hpp"
#include "fbshom/spectral.hpp"

namespace fs = std::filesystem;
using namespace fbshom;
using spectral::two_pi;

namespace {

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create directory " + dir);
}

void emit_manifest(const std::string& dir, const std::string& subcommand,
                   const config::KeyValues& cfg, const std::vector<std::string>& outputs) {
    config::Manifest m;
    m.subcommand = subcommand;
    m.config = cfg;
    m.outputs = outputs;
    config::write_manifest(m, join(dir, "manifest.json"));
}

struct DesignArgs {
    double fsr = 201.275e9;
    int m = 2;
    double reference_hz = 192e12;
    double band_distance_hz = 2e12;
    double band_offset_hz = 0.0;
    double length = 100.0;
    double gamma_power = 0.007853981633974483; // pi/4 / 100 m: full conversion
    std::optional<double> beta2, beta3, beta4;
    std::string out_dir = ".";
};

int cmd_design(const DesignArgs& a) {
    ensure_dir(a.out_dir);
    auto profile = phasematch::default_dsf_profile(two_pi * a.reference_hz);
    if (a.beta2) profile.beta2 = *a.beta2;
    if (a.beta3) profile.beta3 = *a.beta3;
    if (a.beta4) profile.beta4 = *a.beta4;
    const double omega = phasematch::pump_separation_from_fsr(a.fsr, a.m);
    phasematch::ProcessPlacement placement;
    placement.quantum_center = -two_pi * a.band_distance_hz + two_pi * a.band_offset_hz;
    placement.pump_center = two_pi * a.band_distance_hz;
    placement.separation = omega;
    placement.length = a.length;
    placement.gamma_power = a.gamma_power;
    const auto rows = phasematch::sideband_suppression(profile, placement);

    const std::string csv = join(a.out_dir, "design.csv");
    phasematch::export_design_csv_file(rows, csv);
    config::write_csv_json_mirror(csv, join(a.out_dir, "design.json"));

    config::KeyValues cfg;
    char buf[40];
    auto put = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        cfg[key] = buf;
    };
    put("fsr_hz", a.fsr);
    cfg["resonance_index"] = std::to_string(a.m);
    put("reference_hz", a.reference_hz);
    put("band_distance_hz", a.band_distance_hz);
    put("band_offset_hz", a.band_offset_hz);
    put("length_m", a.length);
    put("gamma_power_per_m", a.gamma_power);
    put("beta2_s2_m", profile.beta2);
    put("beta3_s3_m", profile.beta3);
    put("beta4_s4_m", profile.beta4);
    emit_manifest(a.out_dir, "design", cfg, {"design.csv", "design.json"});

    std::printf("pump separation: %.6f GHz\n", omega / two_pi / 1e9);
    std::printf("recommended pumps (Hz): P2 = %.17g, P1 = %.17g\n",
                a.reference_hz + placement.omega_p2() / two_pi,
                a.reference_hz + placement.omega_p1() / two_pi);
    std::printf("dispersion defaults are illustrative fiber values, not measurements\n");
    for (const auto& r : rows)
        std::printf("process %-9s delta_beta = %.6g rad/m efficiency = %.6g%s\n",
                    r.name.c_str(), r.mismatch, r.efficiency, r.matched ? " (target)" : "");
    return 0;
}

struct AnalyticArgs {
    double linewidth_hz = 270e6;
    std::vector<double> detunings_hz{0.0, 300e6, 600e6, 5e9};
    double alpha = 1.0;
    double jitter_s = 0.0;
    std::string out_dir = ".";
};

int cmd_analytic(const AnalyticArgs& a) {
    ensure_dir(a.out_dir);
    const double dw = two_pi * a.linewidth_hz;
    const auto tau = correlation::default_tau_axis();
    std::vector<std::string> outputs;
    auto write = [&](const correlation::G2Curve& curve, const std::string& stem) {
        auto out = a.jitter_s > 0.0 ? correlation::convolve_jitter(curve, a.jitter_s) : curve;
        const std::string csv = join(a.out_dir, stem + ".csv");
        correlation::export_curve_csv_file(out, csv);
        config::write_csv_json_mirror(csv, join(a.out_dir, stem + ".json"));
        outputs.push_back(stem + ".csv");
        outputs.push_back(stem + ".json");
    };
    write(correlation::g2_pumps_off_analytic(dw, tau), "analytic_pumps_off");
    for (double det : a.detunings_hz) {
        char stem[64];
        std::snprintf(stem, sizeof stem, "analytic_det_%.9gHz", det);
        write(correlation::g2_cross_analytic(dw, two_pi * det, a.alpha, tau), stem);
    }
    config::KeyValues cfg;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", a.linewidth_hz);
    cfg["linewidth_hz"] = buf;
    std::snprintf(buf, sizeof buf, "%.17g", a.alpha);
    cfg["alpha"] = buf;
    std::snprintf(buf, sizeof buf, "%.17g", a.jitter_s);
    cfg["jitter_sigma_s"] = buf;
    for (std::size_t i = 0; i < a.detunings_hz.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", a.detunings_hz[i]);
        cfg["detuning_hz_" + std::to_string(i)] = buf;
    }
    emit_manifest(a.out_dir, "analytic", cfg, outputs);
    return 0;
}

struct SimulateArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> duration_s, detuning_hz, strength, jitter_s, tau_bin_s, ideality,
        pair_rate, linewidth_hz;
    bool autocorrelation = false;
    int threads = 1;
    std::string out_dir = ".";
};

int cmd_simulate(const SimulateArgs& a) {
    ensure_dir(a.out_dir);
    config::KeyValues keys;
    if (!a.config_path.empty()) keys = config::parse_key_values_file(a.config_path);
    auto cfg = config::experiment_config(keys);
    bool autocorr = config::autocorrelation_flag(keys) || a.autocorrelation;
    if (a.seed) cfg.seed = *a.seed;
    if (a.duration_s) cfg.duration = *a.duration_s;
    if (a.detuning_hz) cfg.detuning = two_pi * *a.detuning_hz;
    if (a.strength) cfg.fbs.strength = *a.strength;
    if (a.jitter_s) cfg.jitter_sigma = *a.jitter_s;
    if (a.tau_bin_s) cfg.tau_bin = *a.tau_bin_s;
    if (a.ideality) cfg.ideality = *a.ideality;
    if (a.pair_rate) cfg.pair_rate = *a.pair_rate;
    if (a.linewidth_hz) cfg.source.linewidth = two_pi * *a.linewidth_hz;
    cfg.validate();

    const auto result = autocorr ? montecarlo::simulate_autocorrelation(cfg, a.threads)
                                 : montecarlo::simulate_run(cfg, a.threads);
    if (result.histogram.warning_empty)
        std::fprintf(stderr, "warning: empty histogram (no generated events)\n");

    const std::string hist_csv = join(a.out_dir, "histogram.csv");
    montecarlo::export_histogram_csv_file(result.histogram, hist_csv);
    config::write_csv_json_mirror(hist_csv, join(a.out_dir, "histogram.json"));
    montecarlo::export_event_log_file(result.log, join(a.out_dir, "events.txt"));
    const auto resolved = config::to_key_values(cfg, autocorr);
    {
        std::ofstream os(join(a.out_dir, "config.txt"));
        os << config::canonical_text(resolved);
    }
    emit_manifest(a.out_dir, "simulate", resolved,
                  {"histogram.csv", "histogram.json", "events.txt", "config.txt"});
    std::printf("in-sync coincidences: %lld, off-sync: %lld\n",
                static_cast<long long>(result.histogram.total_in_sync()),
                static_cast<long long>(result.histogram.total_off_sync()));
    return 0;
}

struct FitArgs {
    std::string histogram_path;
    double jitter_s = 0.0;
    std::optional<double> init_detuning_hz;
    std::string out_dir = ".";
};

int cmd_fit(const FitArgs& a) {
    ensure_dir(a.out_dir);
    const auto hist = montecarlo::import_histogram_csv_file(a.histogram_path);
    const auto curve = estimation::normalize_histogram(hist);
    const auto raw = estimation::raw_visibility(curve);
    std::optional<correlation::BeatModel> init;
    if (a.init_detuning_hz) {
        auto guess = estimation::fit_beating(curve).model; // auto-init pass
        guess.detuning = two_pi * *a.init_detuning_hz;
        init = guess;
    }
    const auto fit = estimation::fit_beating(curve, init, a.jitter_s);

    {
        std::ofstream os(join(a.out_dir, "fit.txt"));
        estimation::export_fit_result(fit, os);
        char buf[96];
        std::snprintf(buf, sizeof buf, "raw_visibility = %.17g\nraw_visibility_sigma = %.17g\n",
                      raw.value, raw.error);
        os << buf;
    }
    {
        std::ofstream os(join(a.out_dir, "fit.csv"));
        os << estimation::fit_result_csv_header() << ",raw_visibility,raw_visibility_sigma\n";
        char buf[96];
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", raw.value, raw.error);
        os << estimation::fit_result_csv_row(fit) << buf;
    }
    config::write_csv_json_mirror(join(a.out_dir, "fit.csv"), join(a.out_dir, "fit.json"));
    config::KeyValues cfg;
    cfg["histogram"] = a.histogram_path;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", a.jitter_s);
    cfg["jitter_sigma_s"] = buf;
    emit_manifest(a.out_dir, "fit", cfg, {"fit.txt", "fit.csv", "fit.json"});
    std::printf("alpha_raw = %.4f +- %.4f, alpha_fit = %.4f +- %.4f, "
                "linewidth = %.4f MHz +- %.4f MHz\n",
                raw.value, raw.error, fit.model.visibility, fit.uncertainty.visibility,
                fit.model.linewidth / two_pi / 1e6, fit.uncertainty.linewidth / two_pi / 1e6);
    return 0;
}

struct ReportArgs {
    std::vector<std::string> run_dirs;
    std::string out_dir = ".";
};

int cmd_report(const ReportArgs& a) {
    ensure_dir(a.out_dir);
    std::ofstream os(join(a.out_dir, "summary.csv"));
    os << "run_dir,config_hash,detuning_hz,alpha_raw,alpha_raw_sigma,alpha_fit,alpha_fit_sigma,"
          "linewidth_hz,linewidth_sigma_hz,autocorrelation_peak,autocorrelation_peak_sigma\n";
    for (const auto& dir : a.run_dirs) {
        const auto manifest = config::read_manifest(join(dir, "manifest.json"));
        const auto cfg = config::experiment_config(manifest.config);
        const bool autocorr = config::autocorrelation_flag(manifest.config);
        const auto log = montecarlo::import_event_log_file(join(dir, "events.txt"));
        const auto hist = montecarlo::accumulate_coincidences(log, cfg, autocorr);
        char buf[512];
        if (autocorr) {
            const auto peak = estimation::autocorrelation_peak(hist, cfg);
            std::snprintf(buf, sizeof buf, "%s,%s,%.17g,,,,,,,%.17g,%.17g\n", dir.c_str(),
                          manifest.hash.c_str(), cfg.detuning / two_pi, peak.value, peak.error);
        } else {
            const auto curve = estimation::normalize_histogram(hist);
            const auto raw = estimation::raw_visibility(curve);
            const auto fit = estimation::fit_beating(curve);
            std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,,\n",
                          dir.c_str(), manifest.hash.c_str(), cfg.detuning / two_pi, raw.value,
                          raw.error, fit.model.visibility, fit.uncertainty.visibility,
                          fit.model.linewidth / two_pi, fit.uncertainty.linewidth / two_pi);
        }
        os << buf;
    }
    os.close();
    config::write_csv_json_mirror(join(a.out_dir, "summary.csv"), join(a.out_dir, "summary.json"));
    config::KeyValues cfg;
    for (std::size_t i = 0; i < a.run_dirs.size(); ++i)
        cfg["run_dir_" + std::to_string(i)] = a.run_dirs[i];
    emit_manifest(a.out_dir, "report", cfg, {"summary.csv", "summary.json"});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-beam-splitter interference toolkit"};
    app.require_subcommand(1);

    DesignArgs design;
    auto* d = app.add_subcommand("design", "Phase-matching design report");
    d->add_option("--fsr", design.fsr, "Resonator FSR in Hz");
    d->add_option("--m", design.m, "Resonance offset (photons at +-m FSR)");
    d->add_option("--reference-hz", design.reference_hz, "Zero-GVD reference frequency, Hz");
    d->add_option("--band-distance-hz", design.band_distance_hz,
                  "Quantum/pump band distance from the reference, Hz");
    d->add_option("--band-offset-hz", design.band_offset_hz, "Quantum-band asymmetry offset, Hz");
    d->add_option("--length", design.length, "Fiber length, m");
    d->add_option("--gamma-power", design.gamma_power, "gamma*P per pump, 1/m");
    double b2, b3, b4;
    d->add_option("--beta2", b2, "s^2/m")->each([&](const std::string&) { design.beta2 = b2; });
    d->add_option("--beta3", b3, "s^3/m")->each([&](const std::string&) { design.beta3 = b3; });
    d->add_option("--beta4", b4, "s^4/m")->each([&](const std::string&) { design.beta4 = b4; });
    d->add_option("--out-dir", design.out_dir, "Output directory");

    AnalyticArgs analytic;
    auto* an = app.add_subcommand("analytic", "Closed-form correlation curves");
    an->add_option("--linewidth-hz", analytic.linewidth_hz, "Photon linewidth (FWHM), Hz");
    an->add_option("--detuning-hz", analytic.detunings_hz, "Beating detunings, Hz (repeatable)");
    an->add_option("--alpha", analytic.alpha, "Visibility parameter");
    an->add_option("--jitter-s", analytic.jitter_s, "Detector jitter sigma, s");
    an->add_option("--out-dir", analytic.out_dir, "Output directory");

    SimulateArgs sim;
    auto* si = app.add_subcommand("simulate", "Monte Carlo counting experiment");
    si->add_option("--config", sim.config_path, "key = value configuration file");
    std::uint64_t seed_v;
    si->add_option("--seed", seed_v, "RNG seed")->each([&](const std::string&) {
        sim.seed = seed_v;
    });
    double dv;
    auto opt = [&](CLI::App* cmd, const char* flag, std::optional<double>& slot,
                   const char* help) {
        auto* o = cmd->add_option(flag, dv, help);
        o->each([&slot, o](const std::string&) { slot = o->as<double>(); });
    };
    opt(si, "--duration-s", sim.duration_s, "Acquisition time, s");
    opt(si, "--detuning-hz", sim.detuning_hz, "Pump/photon separation mismatch, Hz");
    opt(si, "--strength", sim.strength, "FBS strength gamma*P*L (pi/8 = 50:50)");
    opt(si, "--jitter-s", sim.jitter_s, "Combined coincidence jitter sigma, s");
    opt(si, "--tau-bin-s", sim.tau_bin_s, "Histogram bin width, s");
    opt(si, "--ideality", sim.ideality, "Interference ideality alpha_model");
    opt(si, "--pair-rate", sim.pair_rate, "Pair rate at the FBS, 1/s");
    opt(si, "--linewidth-hz", sim.linewidth_hz, "Photon linewidth (FWHM), Hz");
    si->add_flag("--autocorrelation", sim.autocorrelation, "Tap the blue arm 50:50");
    si->add_option("--threads", sim.threads, "Worker threads (does not affect results)");
    si->add_option("--out-dir", sim.out_dir, "Output directory");

    FitArgs fit;
    auto* fi = app.add_subcommand("fit", "Normalize and fit a histogram");
    fi->add_option("--histogram", fit.histogram_path, "histogram.csv from simulate")->required();
    fi->add_option("--jitter-s", fit.jitter_s, "Convolve the model with this jitter sigma, s");
    double initdet;
    fi->add_option("--init-detuning-hz", initdet, "Detuning starting value, Hz")
        ->each([&](const std::string&) { fit.init_detuning_hz = initdet; });
    fi->add_option("--out-dir", fit.out_dir, "Output directory");

    ReportArgs report;
    auto* re = app.add_subcommand("report", "Aggregate stored runs into a summary table");
    re->add_option("--run-dir", report.run_dirs, "simulate output directory (repeatable)")
        ->required();
    re->add_option("--out-dir", report.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
        if (d->parsed()) return cmd_design(design);
        if (an->parsed()) return cmd_analytic(analytic);
        if (si->parsed()) return cmd_simulate(sim);
        if (fi->parsed()) return cmd_fit(fit);
        if (re->parsed()) return cmd_report(report);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const config_error& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const invalid_parameter& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
