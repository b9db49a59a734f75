#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ringqed/errors.hpp"
#include "ringqed/steady.hpp"

using namespace ringqed;
using constants::two_pi;

namespace {
const CavityParams P = CavityParams::experiment_defaults();
const double K = P.wavenumber();
const double DELTA30 = two_pi * 30e6;

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

double total_flux(const CollectiveCoupling& c, double delta, double atom_detuning) {
    const auto m = steady_modes(P, c, DriveConfig{delta, atom_detuning, 1.0});
    return P.kappa_out * (std::norm(m.forward) + std::norm(m.backward));
}
} // namespace

TEST_CASE("two-mode steady state agrees with the un-eliminated linear system") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> pos(0.0, 3e-6), det(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 9;
        std::vector<double> xs(static_cast<std::size_t>(n));
        for (double& x : xs) x = pos(rng);
        const AtomArray a(xs);
        const DriveConfig d{two_pi * 300e3 * det(rng), two_pi * 40e6 * det(rng), 1.0};
        const auto m = steady_modes(P, a, d);
        const auto ref = oracle::full_steady_state(P, a, d);
        CHECK(rel(m.forward, ref.forward) < 1e-9);
        if (std::abs(ref.backward) > 1e-8 * std::abs(ref.forward)) {
            CHECK(rel(m.backward, ref.backward) < 1e-9);
        }
        const auto atoms = atomic_amplitudes(P, a, d, m);
        for (std::size_t j = 0; j < xs.size(); ++j) {
            CHECK(rel(atoms.coherences[j], ref.coherences[j]) < 1e-9);
        }
    }
}

TEST_CASE("eigenmode closed form matches the transformed two-mode solution") {
    for (double s : {0.2, 0.6, 0.9, 1.0}) {
        const auto a = with_target_s(6, s, P.wavelength);
        const auto c = collective_coupling(P, a);
        for (double delta : {-50e3, 0.0, 80e3, 170e3}) {
            const DriveConfig d{two_pi * delta, DELTA30, 1.0};
            const auto e = steady_eigenmodes(P, c, d);
            const auto t = to_eigenmodes(steady_modes(P, c, d), c.structure_factor);
            CHECK(std::abs(e.bright - t.bright) < 1e-10 * std::abs(t.bright));
            CHECK(std::abs(e.dark - t.dark) < 1e-10 * std::abs(t.dark) + 1e-14);
        }
    }
}

TEST_CASE("basis change is unitary and invertible") {
    const StructureFactor s = std::polar(0.7, 1.1);
    const ModeAmplitudes m{{0.3, -0.2}, {-1.1, 0.4}};
    const auto e = to_eigenmodes(m, s);
    CHECK(std::norm(e.bright) + std::norm(e.dark) ==
          doctest::Approx(std::norm(m.forward) + std::norm(m.backward)).epsilon(1e-14));
    const auto back = from_eigenmodes(e, s);
    CHECK(std::abs(back.forward - m.forward) < 1e-15);
    CHECK(std::abs(back.backward - m.backward) < 1e-15);
    CHECK_THROWS_AS(to_eigenmodes(m, StructureFactor{0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(steady_eigenmodes(P, uniform_coupling(3, 0.0), DriveConfig{}), ValidationError);
}

TEST_CASE("resonance shifts at the operating point") {
    const auto s0 = resonance_shifts(P, 4, 0.0, DELTA30);
    CHECK(std::abs(s0.bright / two_pi - 84.119e3) < 1.0);
    CHECK(s0.bright == s0.dark);
    const auto s1 = resonance_shifts(P, 4, 1.0, DELTA30);
    CHECK(std::abs(s1.bright / two_pi - 168.238e3) < 1.0);
    CHECK(s1.dark == 0.0);
    CHECK(std::abs(resonance_shifts(P, 9, 1.0, DELTA30).bright / two_pi - 378.536e3) < 1.0);
    CHECK(std::abs(relative_broadenings(P, 4, 0.9, DELTA30).dark - 0.050655) < 1e-6);
    CHECK(broadenings(P, 4, 1.0, DELTA30).dark == 0.0);
    CHECK(broadenings(P, 4, 0.9, DELTA30).dark ==
          doctest::Approx(P.kappa * relative_broadenings(P, 4, 0.9, DELTA30).dark).epsilon(1e-14));
}

TEST_CASE("transmission peaks sit at the predicted shifts with the predicted widths") {
    for (double s : {0.5, 0.9, 1.0}) {
        const auto c = uniform_coupling(4, s);
        const auto shifts = resonance_shifts(P, 4, s, DELTA30);
        const auto widths = broadenings(P, 4, s, DELTA30);
        // Each eigenmode flux on its own is an exact Lorentzian.
        auto dark = [&](double x) {
            return std::norm(steady_eigenmodes(P, c, DriveConfig{x, DELTA30, 1.0}).dark);
        };
        auto bright = [&](double x) {
            return std::norm(steady_eigenmodes(P, c, DriveConfig{x, DELTA30, 1.0}).bright);
        };
        const double span = 20.0 * P.kappa;
        const double dark_peak = oracle::argmax(dark, -span, span);
        const double bright_peak = oracle::argmax(bright, -span, span);
        CHECK(std::abs(dark_peak - shifts.dark) < 1e-6 * P.kappa);
        CHECK(std::abs(bright_peak - shifts.bright) < 1e-6 * P.kappa);
        CHECK(oracle::fwhm(dark, dark_peak, P.kappa) ==
              doctest::Approx(P.kappa + widths.dark).epsilon(1e-6));
        CHECK(oracle::fwhm(bright, bright_peak, P.kappa) ==
              doctest::Approx(P.kappa + widths.bright).epsilon(1e-6));
    }
    // With |S| = 1 the total spectrum near zero is the bare cavity line.
    const auto c = uniform_coupling(4, 1.0);
    auto total = [&](double x) { return total_flux(c, x, DELTA30); };
    const double peak = oracle::argmax(total, -2.0 * P.kappa, 2.0 * P.kappa);
    CHECK(std::abs(peak) < 1e-3 * P.kappa);
}

TEST_CASE("dark mode at |S| = 1 leaves the atoms unexcited") {
    const auto a = lattice(4, 0.5 * P.wavelength, P.wavelength);
    const auto s = structure_factor(a, K);
    const DriveConfig d{0.0, DELTA30, 1.0};
    const auto bright = atomic_amplitudes(P, a, d, from_eigenmodes({Complex{1.0, 0.0}, 0.0}, s));
    const auto dark = atomic_amplitudes(P, a, d, from_eigenmodes({0.0, Complex{1.0, 0.0}}, s));
    CHECK(bright.total_excitation > 0.0);
    CHECK(dark.total_excitation < 1e-24 * bright.total_excitation);
    // The dark standing wave has nodes on the atoms.
    const auto m = from_eigenmodes({0.0, Complex{1.0, 0.0}}, s);
    for (double x : a.positions()) CHECK(std::abs(intracavity_field(m, x, K)) < 1e-12);
}

TEST_CASE("no atoms or no coupling reduces to the empty cavity") {
    CavityParams p = P;
    p.g = 0.0;
    const auto a = lattice(3, 0.5 * p.wavelength, p.wavelength);
    const DriveConfig d{0.0, DELTA30, 1.0};
    const auto m = steady_modes(p, a, d);
    // Empty-cavity resonance: a = i sqrt(kappa_in) E / (-kappa/2)
    CHECK(std::abs(m.forward - Complex{0.0, -2.0 * std::sqrt(p.kappa_in) / p.kappa}) < 1e-15);
    CHECK(m.backward == Complex{0.0, 0.0});
    const auto none = steady_modes(P, AtomArray{}, d);
    CHECK(std::abs(none.forward - Complex{0.0, -2.0 * std::sqrt(P.kappa_in) / P.kappa}) < 1e-15);
}

TEST_CASE("transverse offsets reduce the effective atom number") {
    const AtomArray a({0.0, 0.5 * P.wavelength}, {{0.0, 0.0}, {*P.waist_y, 0.0}});
    const auto c = collective_coupling(P, a);
    CHECK(c.atom_number == doctest::Approx(1.0 + std::exp(-2.0)).epsilon(1e-14));
    CHECK(std::abs(c.abs_s() - 1.0) < 1e-12);
    CavityParams no_waist = P;
    no_waist.waist_y.reset();
    CHECK_THROWS_AS(collective_coupling(no_waist, a), ValidationError);
    const auto g = atom_couplings(P, a);
    CHECK(g[1] == doctest::Approx(P.g * std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("drive validation") {
    CHECK_THROWS_AS(steady_modes(P, uniform_coupling(1, 1.0), DriveConfig{NAN, 0.0, 1.0}),
                    ValidationError);
    CHECK_THROWS_AS(steady_modes(P, uniform_coupling(1, 1.0), DriveConfig{0.0, 0.0, -1.0}),
                    ValidationError);
}
