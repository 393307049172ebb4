#ifndef FBSHOM_MONTECARLO_HPP
#define FBSHOM_MONTECARLO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fbshom/fbs.hpp"
#include "fbshom/spectral.hpp"

namespace fbshom::montecarlo {

/// Counting-experiment settings. Pairs are generated continuously (CW ring
/// source); the BS-FWM pumps are gated into 10-ns windows. Coincidences are
/// partitioned by the gate the pair falls into: the pump-synchronized gate at
/// the start of each period (FBS applied) and the normalization gate half a
/// period later (pumps off).
struct ExperimentConfig {
    double pair_rate = 132.0;          // pairs/s reaching the FBS
    double window_length = 10e-9;      // s
    double window_period = 100e-9;     // s
    double detection_efficiency_r = 0.3;
    double detection_efficiency_b = 0.3;
    double dark_rate_r = 0.0;          // counts/s
    double dark_rate_b = 0.0;          // counts/s
    double jitter_sigma = 40e-12;      // s, combined coincidence jitter (1 sigma)
    double multi_pair_parameter = 0.0; // mean noise pairs per coherence time
    double ideality = 1.0;             // alpha_model in [0,1]
    double detuning = 0.0;             // rad/s, dOmega = pump separation - photon separation
    fbs::FbsParams fbs;
    spectral::ResonatorSpec source;
    double duration = 3600.0;          // s
    std::uint64_t seed = 1;            // nonzero
    double tau_bin = 100e-12;          // s
    double tau_max = 8e-9;             // s, histogram spans [-tau_max, tau_max)

    void validate() const;
};

/// Per-pair outcome sector probabilities conditioned on the intra-pair delay.
/// They sum to 1 for any tau.
struct OutcomeProbabilities {
    double cross = 1.0; // photons leave on opposite frequency arms
    double rr = 0.0;
    double bb = 0.0;
};
OutcomeProbabilities outcome_probabilities(const fbs::FbsParams& params, double ideality,
                                           double detuning, double tau);

enum class Channel : std::uint8_t { R, B, B1, B2 };
const char* to_string(Channel c);

struct PhotonEvent {
    double time = 0.0; // s, absolute detection time
    std::int64_t window_id = 0;
    Channel channel = Channel::R;
};

using EventLog = std::vector<PhotonEvent>;

struct CorrelationHistogram {
    double tau_bin = 100e-12;
    double tau_max = 8e-9;
    std::vector<std::int64_t> in_sync;  // counts per bin
    std::vector<std::int64_t> off_sync; // counts per bin
    bool warning_empty = false;
    std::string parameters;

    std::size_t n_bins() const;
    double tau_center(std::size_t i) const;
    std::int64_t total_in_sync() const;
    std::int64_t total_off_sync() const;
};

struct RunResult {
    CorrelationHistogram histogram;
    EventLog log;
};

/// Full gated counting experiment on the two frequency arms: coincidences are
/// R x B pairs inside one gate. Deterministic for a fixed seed under any
/// worker count.
RunResult simulate_run(const ExperimentConfig& config, int threads = 1);

/// Same event stream, but the blue arm feeds a 50:50 spatial tap with two
/// detectors; coincidences are B1 x B2 pairs, resolving bunched-sector pairs.
RunResult simulate_autocorrelation(const ExperimentConfig& config, int threads = 1);

/// Rebuilds a histogram from a stored event log; the simulate_* results use
/// this same accumulator.
CorrelationHistogram accumulate_coincidences(const EventLog& log, const ExperimentConfig& config,
                                             bool autocorrelation);

/// CSV rows `tau_s,count,error,partition` (error = sqrt(count)).
void export_histogram_csv(const CorrelationHistogram& hist, std::ostream& os);
void export_histogram_csv_file(const CorrelationHistogram& hist, const std::string& path);
CorrelationHistogram import_histogram_csv(std::istream& is);
CorrelationHistogram import_histogram_csv_file(const std::string& path);

/// Columnar text `time_s channel window_id`, one photon per row.
void export_event_log(const EventLog& log, std::ostream& os);
void export_event_log_file(const EventLog& log, const std::string& path);
EventLog import_event_log(std::istream& is);
EventLog import_event_log_file(const std::string& path);

} // namespace fbshom::montecarlo

#endif
