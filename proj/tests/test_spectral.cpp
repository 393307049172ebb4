#include "doctest.h"

#include <cmath>
#include <sstream>

#include "fbshom/spectral.hpp"

using namespace fbshom;
using namespace fbshom::spectral;

namespace {
const double kLinewidth = two_pi * 270e6;
ResonatorSpec default_spec() {
    ResonatorSpec s;
    s.pump_frequency = two_pi * 233.75e12; // ~1283 nm pump
    return s;
}
} // namespace

TEST_CASE("lorentzian lineshape values") {
    // peak: |l(0)|^2 = 2/dw
    CHECK(std::norm(lorentzian_lineshape(0.0, kLinewidth)) ==
          doctest::Approx(2.0 / kLinewidth).epsilon(1e-12));
    // half width at half maximum
    CHECK(std::norm(lorentzian_lineshape(kLinewidth / 2.0, kLinewidth)) ==
          doctest::Approx(1.0 / kLinewidth).epsilon(1e-12));
    // far detuning ratio 1/(1+400)
    const double ratio = std::norm(lorentzian_lineshape(10.0 * kLinewidth, kLinewidth)) /
                         std::norm(lorentzian_lineshape(0.0, kLinewidth));
    CHECK(ratio == doctest::Approx(1.0 / 401.0).epsilon(1e-12));
    CHECK_THROWS_AS(lorentzian_lineshape(0.0, -1.0), invalid_parameter);
}

TEST_CASE("resonator spec invariants") {
    auto s = default_spec();
    CHECK(s.envelope_separation() == doctest::Approx(2.0 * 2 * two_pi * 201.275e9));
    CHECK(s.envelope_separation() / two_pi == doctest::Approx(805.1e9).epsilon(1e-12));
    s.signal_index = 1;
    CHECK_THROWS_AS(s.validate(), invalid_parameter);
    s.idler_index = 1;
    CHECK_NOTHROW(s.validate());
    s.linewidth = 0.0;
    CHECK_THROWS_AS(s.validate(), invalid_parameter);
}

TEST_CASE("grid invariants enforced") {
    CHECK_THROWS_AS((FrequencyGrid{0.0, 10 * kLinewidth, 4096}.validate_for_linewidth(kLinewidth)),
                    resolution_error);
    CHECK_THROWS_AS((FrequencyGrid{0.0, 128 * kLinewidth, 128}.validate_for_linewidth(kLinewidth)),
                    resolution_error);
    CHECK_NOTHROW(default_grid(kLinewidth).validate_for_linewidth(kLinewidth));
}

TEST_CASE("ring JSA: normalization, peak and symmetry") {
    const auto spec = default_spec();
    const auto jsa = build_ring_jsa(spec, default_grid(kLinewidth));
    CHECK(jsa.norm() == doctest::Approx(1.0).epsilon(1e-12));
    // peak at the center of the grid
    std::size_t imax = 0;
    double vmax = 0;
    for (std::size_t k = 0; k < jsa.amplitude.size(); ++k)
        if (std::norm(jsa.amplitude[k]) > vmax) {
            vmax = std::norm(jsa.amplitude[k]);
            imax = k;
        }
    const std::size_t n = jsa.amplitude.size();
    CHECK((imax == n / 2 || imax == n / 2 - 1));
    // |phi(nu)|^2 even, exact on the symmetric grid
    for (std::size_t k = 0; k < n; ++k)
        CHECK(std::norm(jsa.amplitude[k]) ==
              doctest::Approx(std::norm(jsa.amplitude[n - 1 - k])).epsilon(1e-12));
}

TEST_CASE("ring JSA: resolution convergence") {
    const auto spec = default_spec();
    const auto a = build_ring_jsa(spec, {0.0, 128 * kLinewidth, 4096});
    const auto b = build_ring_jsa(spec, {0.0, 128 * kLinewidth, 8192});
    // peak |phi|^2 * spacing-normalized density converges
    auto peak_density = [](const JointSpectralAmplitude& j) {
        double vmax = 0;
        for (const auto& v : j.amplitude) vmax = std::max(vmax, std::norm(v));
        return vmax;
    };
    CHECK(peak_density(a) == doctest::Approx(peak_density(b)).epsilon(1e-6));
    CHECK(a.norm() == doctest::Approx(b.norm()).epsilon(1e-12));
}

TEST_CASE("envelope offset is pure relabeling") {
    const auto jsa = build_ring_jsa(default_spec(), default_grid(kLinewidth));
    const auto same = apply_envelope_offset(jsa, 0.0);
    CHECK(same.amplitude == jsa.amplitude);
    CHECK(same.envelope_offset == 0.0);
    const auto off = apply_envelope_offset(jsa, two_pi * 300e6);
    CHECK(off.amplitude == jsa.amplitude);
    CHECK(off.envelope_offset == doctest::Approx(two_pi * 300e6));
    CHECK(off.norm() == doctest::Approx(jsa.norm()).epsilon(1e-15));
    CHECK_THROWS_AS(apply_envelope_offset(jsa, jsa.grid.span / 2.0), resolution_error);
}

TEST_CASE("JSA text round trip is exact") {
    auto jsa = build_ring_jsa(default_spec(), {0.0, 128 * kLinewidth, 4096});
    jsa = apply_envelope_offset(jsa, two_pi * 123.456e6);
    std::stringstream ss;
    export_jsa(jsa, ss);
    const auto back = import_jsa(ss);
    REQUIRE(back.amplitude.size() == jsa.amplitude.size());
    CHECK(back.grid.center == jsa.grid.center);
    CHECK(back.grid.span == jsa.grid.span);
    CHECK(back.envelope_offset == jsa.envelope_offset);
    CHECK(back.pump_frequency == jsa.pump_frequency);
    for (std::size_t k = 0; k < jsa.amplitude.size(); ++k)
        CHECK(back.amplitude[k] == jsa.amplitude[k]);
}
