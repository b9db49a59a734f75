#include "doctest.h"

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "ringqed/dynamics.hpp"
#include "ringqed/errors.hpp"

using namespace ringqed;
using constants::two_pi;

namespace {
const CavityParams P = CavityParams::experiment_defaults();

std::vector<double> log_samples(double t0, double t1, int n) {
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = t0 * std::pow(t1 / t0, double(i) / (n - 1));
    return t;
}

double mode_error(Complex f, Complex b, const oracle::FullSteady& ref) {
    return std::sqrt(std::norm(f - ref.forward) + std::norm(b - ref.backward)) /
           std::sqrt(std::norm(ref.forward) + std::norm(ref.backward));
}
} // namespace

TEST_CASE("reduced equations relax to the closed-form steady state") {
    const auto a = with_target_s(4, 0.9, P.wavelength);
    const DriveConfig d{two_pi * 20e3, two_pi * 30e6, 1.0};
    IntegratorConfig cfg;
    cfg.t_end = 80.0 / P.kappa;
    const auto t = integrate_reduced(P, a, d, cfg);
    const auto ss = steady_modes(P, a, d);
    const auto& f = t.final_state();
    CHECK(std::abs(f.forward - ss.forward) < 1e-7 * std::abs(ss.forward));
    CHECK(std::abs(f.backward - ss.backward) < 1e-7 * std::abs(ss.forward));
    CHECK(t.times.front() == 0.0);
    CHECK(t.times.back() == cfg.t_end);
}

TEST_CASE("full equations relax to the un-eliminated steady state") {
    const auto a = with_target_s(3, 0.6, P.wavelength);
    const DriveConfig d{two_pi * 10e3, two_pi * 10e6, 1.0};
    IntegratorConfig cfg;
    cfg.t_end = 60.0 / P.kappa;
    const auto t = integrate_full(P, a, d, cfg);
    const auto ref = oracle::full_steady_state(P, a, d);
    const auto& f = t.final_state();
    CHECK(mode_error(f.forward, f.backward, ref) < 1e-6);
    for (std::size_t j = 0; j < ref.coherences.size(); ++j) {
        CHECK(std::abs(f.coherences[j] - ref.coherences[j]) < 1e-6 * std::abs(ref.coherences[j]));
    }
}

TEST_CASE("rotating atomic frame gives the same trajectory") {
    const auto a = lattice(2, 0.5 * P.wavelength, P.wavelength);
    const DriveConfig d{0.0, two_pi * 5e6, 1.0};
    IntegratorConfig cfg;
    cfg.t_end = 5.0 / P.kappa;
    cfg.sample_times = {1e-6, 1e-5, 1e-4};
    const auto lab = integrate_full(P, a, d, cfg);
    cfg.rotating_frame = true;
    const auto rot = integrate_full(P, a, d, cfg);
    REQUIRE(lab.times.size() == rot.times.size());
    for (std::size_t i = 0; i < lab.times.size(); ++i) {
        CHECK(lab.times[i] == rot.times[i]);
        const double scale = std::abs(lab.states[i].forward) + 1e-12;
        CHECK(std::abs(lab.states[i].forward - rot.states[i].forward) < 1e-6 * scale);
    }
}

TEST_CASE("adiabatic elimination improves with atom detuning") {
    const auto a = with_target_s(4, 0.9, P.wavelength);
    IntegratorConfig cfg;
    cfg.t_end = 20.0 / P.kappa;
    cfg.sample_times = log_samples(1e-9, cfg.t_end, 400);
    double previous = INFINITY;
    for (double mhz : {5.0, 10.0, 20.0, 40.0}) {
        const DriveConfig d{0.0, two_pi * mhz * 1e6, 1.0};
        const double dev =
            max_relative_deviation(integrate_full(P, a, d, cfg), integrate_reduced(P, a, d, cfg));
        CHECK(dev < previous);
        previous = dev;
    }
    CHECK(previous < 1e-3);
}

TEST_CASE("sample times are honoured and validated") {
    const auto a = lattice(1, 0.5 * P.wavelength, P.wavelength);
    const DriveConfig d{0.0, two_pi * 30e6, 1.0};
    IntegratorConfig cfg;
    cfg.t_end = 1e-5;
    cfg.sample_times = {2e-6, 5e-6, 7.5e-6};
    const auto t = integrate_reduced(P, a, d, cfg);
    CHECK(t.times == std::vector<double>{0.0, 2e-6, 5e-6, 7.5e-6, 1e-5});

    IntegratorConfig bad = cfg;
    bad.t_end = -1.0;
    CHECK_THROWS_AS(integrate_reduced(P, a, d, bad), ValidationError);
    bad = cfg;
    bad.max_steps = 3;
    CHECK_THROWS_AS(integrate_full(P, a, d, bad), NumericalError);
    FullState wrong{Complex{}, Complex{}, {}};
    CHECK_THROWS_AS(integrate_full(P, a, d, cfg, wrong), ValidationError);
}

TEST_CASE("weak drive keeps the atoms in linear response") {
    const auto a = lattice(4, 0.5 * P.wavelength, P.wavelength);
    const DriveConfig d{0.0, two_pi * 30e6, 1.0};
    IntegratorConfig cfg;
    cfg.t_end = 10.0 / P.kappa;
    const auto t = integrate_full(P, a, d, cfg);
    CHECK(weak_excitation_check(t) < 0.1);
    CHECK(weak_excitation_check(t) >= t.peak_excitation);

    std::ostringstream os;
    write_trajectory_csv(os, t);
    CHECK(os.str().rfind("t,re_forward,im_forward,re_backward,im_backward,re_sigma0", 0) == 0);
}

TEST_CASE("a state starting at the steady state stays there") {
    const auto a = with_target_s(2, 0.5, P.wavelength);
    const DriveConfig d{0.0, two_pi * 20e6, 1.0};
    const auto ref = oracle::full_steady_state(P, a, d);
    IntegratorConfig cfg;
    cfg.t_end = 2.0 / P.kappa;
    const auto t = integrate_full(P, a, d, cfg, FullState{ref.forward, ref.backward, ref.coherences});
    CHECK(mode_error(t.final_state().forward, t.final_state().backward, ref) < 1e-8);
}
