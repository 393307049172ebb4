#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fbshom/correlation.hpp"

using namespace fbshom;
using namespace fbshom::correlation;
using spectral::two_pi;

namespace {
const double kLinewidth = two_pi * 270e6;

fbs::TwoPhotonState fbs_output(double detuning, double strength = std::numbers::pi / 8.0,
                               double linewidth = kLinewidth) {
    spectral::ResonatorSpec spec;
    spec.pump_frequency = two_pi * 233.75e12;
    spec.linewidth = linewidth;
    // wider-than-default grid: the shifted-sector tails need the extra span to
    // hold the numeric curves at the 1e-4 level
    auto jsa = spectral::build_ring_jsa(spec, {0.0, 256.0 * linewidth, 8192});
    jsa = spectral::apply_envelope_offset(jsa, detuning);
    return fbs::apply_fbs_two_photon(fbs::make_two_photon_state(jsa),
                                     {strength, 0.0, 0.0, 0.0, 1.0});
}

std::vector<double> oracle_axis(double linewidth) {
    // |tau| <= 5/dw, 401 samples
    std::vector<double> tau(401);
    for (int k = 0; k < 401; ++k) tau[k] = (k - 200) * (5.0 / linewidth) / 200.0;
    return tau;
}

double max_rel_error(const G2Curve& num, const std::vector<double>& exact) {
    double worst = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        if (exact[i] == 0.0) continue; // exact zeros of the interference pattern
        worst = std::max(worst, std::abs(num.values[i] - exact[i]) / exact[i]);
    }
    return worst;
}
} // namespace

TEST_CASE("analytic curves: closed-form anchor points") {
    const auto tau = default_tau_axis();
    SUBCASE("zero detuning at full visibility is identically zero") {
        const auto c = g2_cross_analytic(kLinewidth, 0.0, 1.0, tau);
        for (double v : c.values) CHECK(v == 0.0);
    }
    SUBCASE("alpha = 0 is the half-height double exponential") {
        const auto c = g2_cross_analytic(kLinewidth, two_pi * 5e9, 0.0, tau);
        const auto ref = g2_pumps_off_analytic(kLinewidth, tau);
        for (std::size_t i = 0; i < tau.size(); ++i)
            CHECK(c.values[i] == doctest::Approx(ref.values[i] / 2.0).epsilon(1e-12));
    }
    SUBCASE("beating zeros at multiples of 2 pi / detuning") {
        const double d = two_pi * 300e6;
        std::vector<double> zeros{2 * std::numbers::pi / d, 4 * std::numbers::pi / d};
        const auto c = g2_cross_analytic(kLinewidth, d, 1.0, zeros);
        for (double v : c.values) CHECK(v < 1e-24);
    }
    SUBCASE("pumps-off curve: peak, 1/e point, decay") {
        const std::vector<double> pts{0.0, 1.0 / kLinewidth, 1e-6};
        const auto c = g2_pumps_off_analytic(kLinewidth, pts, 3.0);
        CHECK(c.values[0] == doctest::Approx(3.0));
        CHECK(c.values[1] == doctest::Approx(3.0 / std::numbers::e).epsilon(1e-12));
        CHECK(c.values[2] < 1e-12);
    }
    CHECK_THROWS_AS(g2_cross_analytic(kLinewidth, 0.0, 1.5, tau), invalid_parameter);
    CHECK_THROWS_AS(g2_pumps_off_analytic(-1.0, tau), invalid_parameter);
}

TEST_CASE("numeric G2 reproduces the pumps-off double exponential") {
    spectral::ResonatorSpec spec;
    spec.pump_frequency = two_pi * 233.75e12;
    const auto jsa = spectral::build_ring_jsa(spec, spectral::default_grid(kLinewidth));
    const auto state = fbs::make_two_photon_state(jsa);
    const auto tau = oracle_axis(kLinewidth);
    const auto num = g2_numeric(state, CurveKind::cross_rb, tau);
    std::vector<double> exact(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) exact[i] = std::exp(-kLinewidth * std::abs(tau[i]));
    CHECK(max_rel_error(num, exact) < 1e-4);
}

TEST_CASE("numeric G2 reproduces quantum beating after the 50:50 FBS") {
    for (double det_hz : {300e6, 600e6}) {
        const double d = two_pi * det_hz;
        const auto out = fbs_output(d);
        const auto tau = oracle_axis(kLinewidth);
        const auto num = g2_numeric(out, CurveKind::cross_rb, tau);
        std::vector<double> exact(tau.size());
        for (std::size_t i = 0; i < tau.size(); ++i) {
            const double s = std::sin(d * tau[i] / 2.0);
            exact[i] = std::exp(-kLinewidth * std::abs(tau[i])) * s * s;
        }
        CHECK(max_rel_error(num, exact) < 1e-4);
    }
}

TEST_CASE("oracle equivalence over random linewidth/detuning pairs") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ulw(150e6, 500e6), udet(100e6, 1200e6);
    for (int i = 0; i < 20; ++i) {
        const double lw = two_pi * ulw(rng);
        const double d = two_pi * udet(rng);
        const auto out = fbs_output(d, std::numbers::pi / 8.0, lw);
        const auto tau = oracle_axis(lw);
        const auto num = g2_numeric(out, CurveKind::cross_rb, tau);
        std::vector<double> exact(tau.size());
        for (std::size_t j = 0; j < tau.size(); ++j) {
            const double s = std::sin(d * tau[j] / 2.0);
            exact[j] = std::exp(-lw * std::abs(tau[j])) * s * s;
        }
        CHECK(max_rel_error(num, exact) < 1e-4);
    }
}

TEST_CASE("perfect HOM null in the numeric path") {
    const auto out = fbs_output(0.0);
    const auto num = g2_numeric(out, CurveKind::cross_rb, default_tau_axis());
    double peak = 0.0;
    for (double v : num.values) peak = std::max(peak, v);
    CHECK(peak <= 1e-8); // pumps-off peak is 1 in these units
}

TEST_CASE("null degrades quadratically in splitter imbalance") {
    for (double eps : {0.01, 0.02, 0.05}) {
        const auto out = fbs_output(0.0, std::numbers::pi / 8.0 + eps);
        const std::vector<double> zero{0.0};
        const auto num = g2_numeric(out, CurveKind::cross_rb, zero);
        const auto [u, m] = fbs::splitter_amplitudes(
            {std::numbers::pi / 8.0 + eps, 0.0, 0.0, 0.0, 1.0});
        const double imbalance = std::norm(u) - std::norm(m);
        CHECK(num.values[0] ==
              doctest::Approx(imbalance * imbalance).epsilon(1e-6 + 10 * eps * eps));
    }
}

TEST_CASE("cross curves are even in tau") {
    const auto out = fbs_output(two_pi * 300e6);
    const auto tau = default_tau_axis();
    const auto num = g2_numeric(out, CurveKind::cross_rb, tau);
    const std::size_t n = tau.size();
    double peak = 0.0;
    for (double v : num.values) peak = std::max(peak, v);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(num.values[i] - num.values[n - 1 - i]) < 1e-9 * peak);
}

TEST_CASE("bunched-sector curve and weights") {
    SUBCASE("ideal enhancement factor 2 at zero detuning") {
        const auto out = fbs_output(0.0);
        const auto [u, m] =
            fbs::splitter_amplitudes({std::numbers::pi / 8.0, 0.0, 0.0, 0.0, 1.0});
        const double incoherent = std::norm(u) * std::norm(m);
        CHECK(out.sector_weight_bb() / incoherent == doctest::Approx(2.0).epsilon(1e-10));
    }
    SUBCASE("no conversion, empty sector, warning flag") {
        const auto out = fbs_output(0.0, 0.0);
        const auto c = g2_auto_bunched(out, CurveKind::auto_bb, default_tau_axis());
        CHECK(c.warning_empty_sector);
        for (double v : c.values) CHECK(v == 0.0);
    }
    SUBCASE("large detuning approaches the incoherent 1/4") {
        const auto out = fbs_output(two_pi * 5e9);
        CHECK(out.sector_weight_bb() == doctest::Approx(0.25).epsilon(1e-2));
    }
}

TEST_CASE("jitter convolution") {
    const auto tau = default_tau_axis();
    SUBCASE("sigma zero is the identity") {
        const auto c = g2_cross_analytic(kLinewidth, two_pi * 300e6, 1.0, tau);
        const auto out = convolve_jitter(c, 0.0);
        CHECK(out.values == c.values);
    }
    SUBCASE("cosine contrast damps by exp(-d^2 s^2 / 2)") {
        // pure cosine on a long padded axis so edge handling stays out of the way
        const double d = two_pi * 300e6;
        const double sigma = 100e-12;
        G2Curve c;
        c.tau.resize(200001);
        c.values.resize(c.tau.size());
        for (std::size_t i = 0; i < c.tau.size(); ++i) {
            c.tau[i] = (static_cast<double>(i) - 100000.0) * 20e-12;
            c.values[i] = 1.0 + std::cos(d * c.tau[i]);
        }
        const auto out = convolve_jitter(c, sigma);
        const double expect = std::exp(-d * d * sigma * sigma / 2.0);
        // contrast at tau = 0 relative to the unit baseline
        const double got = out.values[100000] - 1.0;
        CHECK(got == doctest::Approx(expect).epsilon(1e-3));
        CHECK(expect == doctest::Approx(0.983).epsilon(1e-3));
    }
    SUBCASE("5 GHz fringes wash out at 100 ps jitter") {
        const double d = two_pi * 5e9;
        auto c = g2_cross_analytic(kLinewidth, d, 1.0, tau);
        auto flat = g2_cross_analytic(kLinewidth, d, 0.0, tau);
        const auto out = convolve_jitter(c, 100e-12);
        // away from the edges the result hugs the alpha = 0 curve; the
        // reference gets the same envelope smoothing so only the fringes differ
        const auto flat_out = convolve_jitter(flat, 100e-12);
        double worst = 0.0;
        for (std::size_t i = 100; i + 100 < tau.size(); ++i)
            worst = std::max(worst, std::abs(out.values[i] - flat_out.values[i]));
        CHECK(worst < 0.05 * flat.values[tau.size() / 2]);
    }
    SUBCASE("integral preserved") {
        const auto c = g2_cross_analytic(kLinewidth, two_pi * 300e6, 1.0, tau);
        const auto out = convolve_jitter(c, 40e-12);
        CHECK(out.integral() == doctest::Approx(c.integral()).epsilon(1e-6));
    }
    SUBCASE("boundary leakage is rejected") {
        G2Curve c;
        c.tau = tau;
        c.values.assign(tau.size(), 1.0); // flat curve, mass at the edges
        CHECK_THROWS_AS(convolve_jitter(c, 100e-12), boundary_error);
    }
}

TEST_CASE("tau axis beyond the Nyquist range is rejected") {
    const auto out = fbs_output(0.0);
    const std::vector<double> tau{1.0}; // one second is far outside any grid range
    CHECK_THROWS_AS(g2_numeric(out, CurveKind::cross_rb, tau), aliasing_error);
}

TEST_CASE("curve CSV export") {
    const auto c = g2_pumps_off_analytic(kLinewidth, {0.0, 1e-9});
    std::stringstream ss;
    export_curve_csv(c, ss);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "tau_s,value,kind,source");
    std::getline(ss, line);
    CHECK(line.find("cross_RB,analytic") != std::string::npos);
}
