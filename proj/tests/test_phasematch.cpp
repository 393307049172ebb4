#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fbshom/phasematch.hpp"
#include "fbshom/spectral.hpp"

using namespace fbshom;
using namespace fbshom::phasematch;
using spectral::two_pi;

namespace {
ProcessPlacement symmetric_placement(double d, double omega) {
    ProcessPlacement p;
    p.quantum_center = -d;
    p.pump_center = d;
    p.separation = omega;
    p.length = 100.0;
    p.gamma_power = std::numbers::pi / 4.0 / 100.0; // gamma P L = pi/4, full conversion
    return p;
}
} // namespace

TEST_CASE("pump separation from the resonator comb") {
    CHECK(pump_separation_from_fsr(201.275e9, 2) == two_pi * 805.100e9);
    CHECK(pump_separation_from_fsr(201.275e9, 1) / two_pi == doctest::Approx(402.55e9));
    CHECK(pump_separation_from_fsr(100e9, 1) / two_pi == doctest::Approx(200e9));
    CHECK_THROWS_AS(pump_separation_from_fsr(-1.0, 2), invalid_parameter);
    CHECK_THROWS_AS(pump_separation_from_fsr(100e9, 0), invalid_parameter);
}

TEST_CASE("symmetry null: beta2 = 0 kills the target mismatch exactly") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 1000; ++i) {
        DispersionProfile prof;
        prof.beta3 = (u(rng) - 5.0) * 1e-40;
        const double d = u(rng) * 1e13;
        const double om = u(rng) * 1e12;
        CHECK(delta_beta(prof, symmetric_placement(d, om)) == 0.0);
    }
    // the cancellation is an odd-order property: quartic dispersion breaks it
    DispersionProfile quartic;
    quartic.beta4 = 1e-55;
    CHECK(delta_beta(quartic, symmetric_placement(1e13, 5e12)) != 0.0);
}

TEST_CASE("quadratic dispersion gives delta-beta = 2 beta2 D Omega") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.5, 5.0);
    for (int i = 0; i < 100; ++i) {
        DispersionProfile prof;
        prof.beta2 = (u(rng) - 2.75) * 1e-27;
        const double d = u(rng) * 1e13;
        const double om = u(rng) * 1e12;
        const double got = delta_beta(prof, symmetric_placement(d, om));
        CHECK(got == doctest::Approx(2.0 * prof.beta2 * d * om).epsilon(1e-10));
    }
}

TEST_CASE("degenerate separation limit") {
    DispersionProfile prof;
    prof.beta2 = 1e-27;
    prof.beta3 = 1e-40;
    // Omega -> 0 makes the quartet degenerate; use the raw frequency form
    CHECK(delta_beta_frequencies(prof, -1e13, 1e13, -1e13, 1e13) == 0.0);
}

TEST_CASE("antisymmetry: reflecting the placement flips the cubic term") {
    DispersionProfile prof;
    prof.beta3 = 0.7e-40;
    // asymmetric bands so the cubic term survives
    const double wr = -1.3e13, wb = -0.5e13, wp1 = 1.9e13;
    const double wp2 = wp1 - (wb - wr);
    const double fwd = delta_beta_frequencies(prof, wr, wp1, wb, wp2);
    const double rev = delta_beta_frequencies(prof, -wr, -wp1, -wb, -wp2);
    CHECK(fwd != 0.0);
    CHECK(rev == doctest::Approx(-fwd).epsilon(1e-12));
}

TEST_CASE("target mismatch grows linearly in band asymmetry") {
    DispersionProfile prof;
    prof.beta3 = 1.2e-40;
    const double d = 1.1e13, om = 5.06e12;
    auto db_at = [&](double shift) {
        auto p = symmetric_placement(d, om);
        p.quantum_center += shift;
        return delta_beta(prof, p);
    };
    const double g1 = (db_at(1e9) - db_at(-1e9)) / 2e9;
    const double g2 = (db_at(1e10) - db_at(-1e10)) / 2e10;
    CHECK(g1 != 0.0);
    CHECK(g2 == doctest::Approx(g1).epsilon(1e-4));
}

TEST_CASE("sideband suppression at the zero-GVD point") {
    const auto prof = default_dsf_profile(two_pi * 192e12);
    auto pl = symmetric_placement(two_pi * 2e12, pump_separation_from_fsr(201.275e9, 2));
    SUBCASE("target matched, sidebands mismatched") {
        const auto rows = sideband_suppression(prof, pl);
        REQUIRE(rows.size() == 3);
        CHECK(rows[0].name == "target");
        CHECK(rows[0].matched);
        CHECK(rows[0].mismatch == 0.0);
        CHECK(rows[0].efficiency == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(!rows[i].matched);
            CHECK(std::abs(rows[i].mismatch) > 0.0);
            CHECK(rows[i].efficiency < rows[0].efficiency);
        }
        CHECK(rows[1].omega_out == doctest::Approx(pl.omega_r() - pl.separation));
        CHECK(rows[2].omega_out == doctest::Approx(pl.omega_b() + pl.separation));
    }
    SUBCASE("dispersionless fiber has no selectivity") {
        DispersionProfile flat;
        const auto rows = sideband_suppression(flat, pl);
        for (const auto& r : rows) {
            CHECK(r.mismatch == 0.0);
            CHECK(r.efficiency == doctest::Approx(rows[0].efficiency));
        }
    }
    SUBCASE("sideband at the first conversion null") {
        // pick L so the red_down sideband sits at gL = pi
        const auto probe = sideband_suppression(prof, pl);
        const double dbs = std::abs(probe[1].mismatch);
        REQUIRE(dbs > 0.0);
        pl.length = 2.0 * std::numbers::pi / dbs;
        pl.gamma_power = 1e-9; // gamma P << delta-beta
        const auto rows = sideband_suppression(prof, pl);
        CHECK(rows[1].efficiency < 1e-6);
    }
}

TEST_CASE("placement validation") {
    DispersionProfile prof;
    auto p = symmetric_placement(1e13, 1e12);
    p.separation = 0.0;
    CHECK_THROWS_AS(delta_beta(prof, p), invalid_parameter);
    p = symmetric_placement(1e13, 1e12);
    p.length = 0.0;
    CHECK_THROWS_AS(delta_beta(prof, p), invalid_parameter);
    p = symmetric_placement(0.0, 1e12); // quantum and pump bands coincide
    CHECK_THROWS_AS(delta_beta(prof, p), invalid_parameter);
    CHECK_THROWS_AS(
        delta_beta_frequencies(prof, 0.0, 1e13, 1e13, 1e9), invalid_parameter);
}

TEST_CASE("design CSV layout") {
    const auto prof = default_dsf_profile(two_pi * 192e12);
    const auto rows =
        sideband_suppression(prof, symmetric_placement(two_pi * 2e12, two_pi * 805.1e9));
    std::stringstream ss;
    export_design_csv(rows, ss);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "process,omega_in_rad_s,omega_out_rad_s,delta_beta_rad_m,efficiency,matched");
    std::getline(ss, line);
    CHECK(line.substr(0, 7) == "target,");
    CHECK(line.back() == '1');
}
