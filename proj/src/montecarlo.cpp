#include "fbshom/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "fbshom/rng.hpp"

namespace fbshom::montecarlo {

namespace {
constexpr std::uint64_t kPairBase = 1ULL << 32;
constexpr std::uint64_t kDarkRBase = 2ULL << 32;
constexpr std::uint64_t kDarkBBase = 3ULL << 32;
constexpr std::uint64_t kNoiseBase = 4ULL << 32;
constexpr std::uint64_t kCountStreamPairs = 0;
constexpr std::uint64_t kCountStreamDarkR = 1;
constexpr std::uint64_t kCountStreamDarkB = 2;
constexpr std::uint64_t kCountStreamNoise = 3;

enum class Gate { none, in_sync, off_sync };

Gate gate_of_phase(const ExperimentConfig& c, double phase) {
    if (phase >= 0.0 && phase < c.window_length) return Gate::in_sync;
    const double off = phase - c.window_period / 2.0;
    if (off >= 0.0 && off < c.window_length) return Gate::off_sync;
    return Gate::none;
}
} // namespace

void ExperimentConfig::validate() const {
    if (pair_rate < 0.0 || dark_rate_r < 0.0 || dark_rate_b < 0.0 || multi_pair_parameter < 0.0)
        throw invalid_parameter("rates must be non-negative");
    if (detection_efficiency_r < 0.0 || detection_efficiency_r > 1.0 ||
        detection_efficiency_b < 0.0 || detection_efficiency_b > 1.0)
        throw invalid_parameter("detection efficiencies must lie in [0, 1]");
    if (window_length <= 0.0 || window_period <= 0.0 || window_length > window_period)
        throw invalid_parameter("require 0 < window_length <= window_period");
    if (jitter_sigma < 0.0) throw invalid_parameter("jitter sigma must be non-negative");
    if (ideality < 0.0 || ideality > 1.0) throw invalid_parameter("ideality must lie in [0, 1]");
    if (duration <= 0.0) throw invalid_parameter("duration must be positive");
    if (seed == 0) throw invalid_parameter("seed must be a nonzero 64-bit integer");
    if (tau_bin <= 0.0 || tau_max < tau_bin)
        throw invalid_parameter("require tau_bin > 0 and tau_max >= tau_bin");
    // the two gates must stay unambiguous after delays and jitter
    if (window_length + tau_max + 6.0 * jitter_sigma >= window_period / 2.0)
        throw invalid_parameter("gates too close: window_length + tau_max + jitter margin "
                                "must stay below half a period");
    source.validate();
    fbs.validate();
}

OutcomeProbabilities outcome_probabilities(const fbs::FbsParams& params, double ideality,
                                           double detuning, double tau) {
    const auto [t, c] = fbs::splitter_amplitudes(params);
    const double u2 = std::norm(t), m2 = std::norm(c);
    const double fringe = ideality * std::cos(detuning * tau);
    OutcomeProbabilities p;
    p.cross = (u2 - m2) * (u2 - m2) + 2.0 * u2 * m2 * (1.0 - fringe);
    p.rr = u2 * m2 * (1.0 + fringe);
    p.bb = p.rr;
    return p;
}

const char* to_string(Channel c) {
    switch (c) {
        case Channel::R: return "R";
        case Channel::B: return "B";
        case Channel::B1: return "B1";
        case Channel::B2: return "B2";
    }
    return "?";
}

std::size_t CorrelationHistogram::n_bins() const { return in_sync.size(); }

double CorrelationHistogram::tau_center(std::size_t i) const {
    return -tau_max + (static_cast<double>(i) + 0.5) * tau_bin;
}

std::int64_t CorrelationHistogram::total_in_sync() const {
    std::int64_t s = 0;
    for (auto c : in_sync) s += c;
    return s;
}

std::int64_t CorrelationHistogram::total_off_sync() const {
    std::int64_t s = 0;
    for (auto c : off_sync) s += c;
    return s;
}

namespace {

struct Generator {
    const ExperimentConfig& c;
    bool tap; // split the blue arm onto two detectors

    Channel blue_channel(rng::Stream& s) const {
        if (!tap) {
            s.u01(); // keep the draw sequence identical with and without the tap
            return Channel::B;
        }
        return s.u01() < 0.5 ? Channel::B1 : Channel::B2;
    }

    // detection + jitter for one photon; returns false if lost
    bool detect(rng::Stream& s, double efficiency, double& time) const {
        const bool kept = s.u01() < efficiency;
        const double j = s.normal() * c.jitter_sigma / std::sqrt(2.0);
        if (!kept) return false;
        time += j;
        return true;
    }

    void pair_event(std::uint64_t index, EventLog& out) const {
        rng::Stream s(c.seed, kPairBase + index);
        const double t = s.u01() * c.duration;
        const double tau = s.laplace(1.0 / c.source.linewidth);
        const std::int64_t window = static_cast<std::int64_t>(std::floor(t / c.window_period));
        const Gate gate = gate_of_phase(c, t - static_cast<double>(window) * c.window_period);
        if (gate == Gate::none) return;

        // off-sync gate: BS-FWM pumps are off, the pair always stays cross
        int outcome = 0; // 0 cross, 1 rr, 2 bb
        if (gate == Gate::in_sync) {
            const auto p = outcome_probabilities(c.fbs, c.ideality, c.detuning, tau);
            const double r = s.u01();
            outcome = r < p.cross ? 0 : (r < p.cross + p.rr ? 1 : 2);
        }

        double t_first = t, t_second = t + tau; // cross: first = B, second = R
        if (outcome == 0) {
            if (detect(s, c.detection_efficiency_b, t_first))
                out.push_back({t_first, window, blue_channel(s)});
            if (detect(s, c.detection_efficiency_r, t_second))
                out.push_back({t_second, window, Channel::R});
        } else if (outcome == 1) {
            if (detect(s, c.detection_efficiency_r, t_first))
                out.push_back({t_first, window, Channel::R});
            if (detect(s, c.detection_efficiency_r, t_second))
                out.push_back({t_second, window, Channel::R});
        } else {
            if (detect(s, c.detection_efficiency_b, t_first))
                out.push_back({t_first, window, blue_channel(s)});
            if (detect(s, c.detection_efficiency_b, t_second))
                out.push_back({t_second, window, blue_channel(s)});
        }
    }

    void dark_event(std::uint64_t index, bool red, EventLog& out) const {
        rng::Stream s(c.seed, (red ? kDarkRBase : kDarkBBase) + index);
        const double t = s.u01() * c.duration;
        const std::int64_t window = static_cast<std::int64_t>(std::floor(t / c.window_period));
        if (gate_of_phase(c, t - static_cast<double>(window) * c.window_period) == Gate::none)
            return;
        out.push_back({t, window, red ? Channel::R : blue_channel(s)});
    }

    // uncorrelated photon pair inside one gate (multi-pair noise)
    void noise_event(std::uint64_t index, EventLog& out) const {
        rng::Stream s(c.seed, kNoiseBase + index);
        const double t = s.u01() * c.duration;
        const std::int64_t window = static_cast<std::int64_t>(std::floor(t / c.window_period));
        const Gate gate = gate_of_phase(c, t - static_cast<double>(window) * c.window_period);
        if (gate == Gate::none) return;
        const double start = static_cast<double>(window) * c.window_period +
                             (gate == Gate::off_sync ? c.window_period / 2.0 : 0.0);
        double t_r = start + s.u01() * c.window_length;
        double t_b = start + s.u01() * c.window_length;
        if (detect(s, c.detection_efficiency_r, t_r)) out.push_back({t_r, window, Channel::R});
        if (detect(s, c.detection_efficiency_b, t_b))
            out.push_back({t_b, window, blue_channel(s)});
    }
};

EventLog generate_events(const ExperimentConfig& c, int threads, bool tap) {
    c.validate();
    const Generator gen{c, tap};
    const std::uint64_t n_pairs =
        rng::Stream(c.seed, kCountStreamPairs).poisson(c.pair_rate * c.duration);
    const std::uint64_t n_dark_r =
        rng::Stream(c.seed, kCountStreamDarkR).poisson(c.dark_rate_r * c.duration);
    const std::uint64_t n_dark_b =
        rng::Stream(c.seed, kCountStreamDarkB).poisson(c.dark_rate_b * c.duration);
    const double noise_rate =
        c.multi_pair_parameter * c.source.linewidth / spectral::two_pi;
    const std::uint64_t n_noise =
        rng::Stream(c.seed, kCountStreamNoise).poisson(noise_rate * c.duration);

    const int workers = std::max(1, threads);
    std::vector<EventLog> chunks(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        const std::uint64_t lo = n_pairs * static_cast<std::uint64_t>(w) / workers;
        const std::uint64_t hi = n_pairs * static_cast<std::uint64_t>(w + 1) / workers;
        pool.emplace_back([&, w, lo, hi] {
            auto& out = chunks[static_cast<std::size_t>(w)];
            out.reserve(static_cast<std::size_t>((hi - lo) / 4));
            for (std::uint64_t i = lo; i < hi; ++i) gen.pair_event(i, out);
        });
    }
    for (auto& t : pool) t.join();

    EventLog log;
    for (auto& chunk : chunks) log.insert(log.end(), chunk.begin(), chunk.end());
    for (std::uint64_t i = 0; i < n_dark_r; ++i) gen.dark_event(i, true, log);
    for (std::uint64_t i = 0; i < n_dark_b; ++i) gen.dark_event(i, false, log);
    for (std::uint64_t i = 0; i < n_noise; ++i) gen.noise_event(i, log);
    return log;
}

std::string describe(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "pair_rate=" << c.pair_rate << " strength=" << c.fbs.strength
       << " detuning_rad_s=" << c.detuning << " ideality=" << c.ideality
       << " jitter_s=" << c.jitter_sigma << " duration_s=" << c.duration << " seed=" << c.seed;
    return os.str();
}

} // namespace

CorrelationHistogram accumulate_coincidences(const EventLog& log, const ExperimentConfig& config,
                                             bool autocorrelation) {
    config.validate();
    CorrelationHistogram hist;
    hist.tau_bin = config.tau_bin;
    hist.tau_max = config.tau_max;
    const std::size_t n_bins =
        static_cast<std::size_t>(std::llround(2.0 * config.tau_max / config.tau_bin));
    hist.in_sync.assign(n_bins, 0);
    hist.off_sync.assign(n_bins, 0);
    hist.parameters = describe(config);
    if (log.empty()) {
        hist.warning_empty = true;
        return hist;
    }

    // the gate a photon belongs to, judged by its phase inside its window
    const double period = config.window_period;
    auto partition_of = [&](const PhotonEvent& p) {
        double phase = p.time - static_cast<double>(p.window_id) * period;
        phase -= period * std::floor(phase / period + 0.5); // wrap to (-period/2, period/2]
        const double d_in = std::abs(phase);
        double off = phase - period / 2.0;
        off -= period * std::floor(off / period + 0.5);
        return d_in < std::abs(off) ? 0 : 1;
    };

    struct Tagged {
        PhotonEvent photon;
        int partition;
        std::size_t order;
    };
    std::vector<Tagged> tagged;
    tagged.reserve(log.size());
    for (std::size_t i = 0; i < log.size(); ++i) tagged.push_back({log[i], partition_of(log[i]), i});
    std::sort(tagged.begin(), tagged.end(), [](const Tagged& a, const Tagged& b) {
        if (a.photon.window_id != b.photon.window_id)
            return a.photon.window_id < b.photon.window_id;
        if (a.partition != b.partition) return a.partition < b.partition;
        return a.order < b.order;
    });

    // The autocorrelation observable is the B1 x B2 tap coincidence, but its
    // off-sync normalization is still the plain R x B pair (with the pumps
    // off there is exactly one blue photon per pair, whichever tap port it
    // took).
    const auto is_blue = [](Channel c) {
        return c == Channel::B || c == Channel::B1 || c == Channel::B2;
    };
    auto bin_pairs = [&](std::size_t lo, std::size_t hi, bool tap_pair,
                         std::vector<std::int64_t>& counts) {
        const auto first_match = [&](Channel c) {
            return tap_pair ? c == Channel::B1 : c == Channel::R;
        };
        const auto second_match = [&](Channel c) { return tap_pair ? c == Channel::B2 : is_blue(c); };
        for (std::size_t i = lo; i < hi; ++i) {
            if (!first_match(tagged[i].photon.channel)) continue;
            for (std::size_t j = lo; j < hi; ++j) {
                if (!second_match(tagged[j].photon.channel)) continue;
                const double tau = tagged[i].photon.time - tagged[j].photon.time;
                if (tau < -config.tau_max || tau >= config.tau_max) continue;
                const auto idx =
                    static_cast<std::size_t>(std::floor((tau + config.tau_max) / config.tau_bin));
                if (idx < counts.size()) ++counts[idx];
            }
        }
    };

    std::size_t i = 0;
    while (i < tagged.size()) {
        std::size_t j = i;
        while (j < tagged.size() && tagged[j].photon.window_id == tagged[i].photon.window_id &&
               tagged[j].partition == tagged[i].partition)
            ++j;
        if (tagged[i].partition == 0)
            bin_pairs(i, j, autocorrelation, hist.in_sync);
        else
            bin_pairs(i, j, false, hist.off_sync);
        i = j;
    }
    return hist;
}

RunResult simulate_run(const ExperimentConfig& config, int threads) {
    RunResult r;
    r.log = generate_events(config, threads, false);
    r.histogram = accumulate_coincidences(r.log, config, false);
    return r;
}

RunResult simulate_autocorrelation(const ExperimentConfig& config, int threads) {
    RunResult r;
    r.log = generate_events(config, threads, true);
    r.histogram = accumulate_coincidences(r.log, config, true);
    return r;
}

void export_histogram_csv(const CorrelationHistogram& hist, std::ostream& os) {
    os << "tau_s,count,error,partition\n";
    char buf[160];
    for (int part = 0; part < 2; ++part) {
        const auto& counts = part == 0 ? hist.in_sync : hist.off_sync;
        const char* name = part == 0 ? "in_sync" : "off_sync";
        for (std::size_t i = 0; i < counts.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%lld,%.17g,%s\n", hist.tau_center(i),
                          static_cast<long long>(counts[i]),
                          std::sqrt(static_cast<double>(counts[i])), name);
            os << buf;
        }
    }
}

void export_histogram_csv_file(const CorrelationHistogram& hist, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open " + path);
    export_histogram_csv(hist, os);
}

CorrelationHistogram import_histogram_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "tau_s,count,error,partition")
        throw io_error("bad histogram CSV header");
    std::vector<double> tau_in, tau_off;
    std::vector<std::int64_t> c_in, c_off;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double tau = 0, err = 0;
        long long count = 0;
        std::string part;
        if (!(ss >> tau >> count >> err >> part)) throw io_error("bad histogram CSV row");
        if (part == "in_sync") {
            tau_in.push_back(tau);
            c_in.push_back(count);
        } else if (part == "off_sync") {
            tau_off.push_back(tau);
            c_off.push_back(count);
        } else {
            throw io_error("unknown histogram partition: " + part);
        }
    }
    if (tau_in.size() < 2 || tau_in.size() != tau_off.size())
        throw io_error("histogram CSV must carry matched partitions with >= 2 bins");
    CorrelationHistogram hist;
    hist.tau_bin = tau_in[1] - tau_in[0];
    hist.tau_max = -tau_in[0] + hist.tau_bin / 2.0;
    hist.in_sync = std::move(c_in);
    hist.off_sync = std::move(c_off);
    return hist;
}

CorrelationHistogram import_histogram_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open " + path);
    return import_histogram_csv(is);
}

void export_event_log(const EventLog& log, std::ostream& os) {
    os << "# time_s channel window_id\n";
    char buf[96];
    for (const auto& p : log) {
        std::snprintf(buf, sizeof buf, "%.17g %s %lld\n", p.time, to_string(p.channel),
                      static_cast<long long>(p.window_id));
        os << buf;
    }
}

void export_event_log_file(const EventLog& log, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open " + path);
    export_event_log(log, os);
}

EventLog import_event_log(std::istream& is) {
    EventLog log;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        double time = 0;
        std::string chan;
        long long window = 0;
        if (!(ss >> time >> chan >> window)) throw io_error("bad event log row");
        Channel c;
        if (chan == "R")
            c = Channel::R;
        else if (chan == "B")
            c = Channel::B;
        else if (chan == "B1")
            c = Channel::B1;
        else if (chan == "B2")
            c = Channel::B2;
        else
            throw io_error("unknown channel tag: " + chan);
        log.push_back({time, window, c});
    }
    return log;
}

EventLog import_event_log_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open " + path);
    return import_event_log(is);
}

} // namespace fbshom::montecarlo
