// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "ringqed/dynamics.hpp"
#include "ringqed/metrics.hpp"
#include "ringqed/params.hpp"
#include "ringqed/spectra.hpp"
#include "ringqed/sweep.hpp"

using namespace ringqed;
using constants::two_pi;

namespace {

const CavityParams P = CavityParams::experiment_defaults();
const double DELTA30 = two_pi * 30e6;

// Tolerances, pinned.
constexpr double tol_machine = 1e-12;
constexpr double tol_dark_fwhm = 1e-3;       // criterion 1
constexpr double tol_factor_two = 1e-12;     // criterion 2
constexpr double tol_threshold = 0.10;       // criterion 3
constexpr double tol_closed_form = 1e-9;     // criterion 4
constexpr double tol_sigma_nm = 1.0;         // criterion 5
constexpr double tol_finesse = 0.02;         // criterion 6
constexpr double tol_budget = 0.02;
constexpr double tol_length = 1e-4;
constexpr double tol_c0 = 0.8;
constexpr double tol_c0_half = 0.4;
constexpr double tol_fitted_c = 0.1;
constexpr double tol_elimination = 1e-3;     // criterion 7
constexpr double tol_phase = 1e-9;           // criterion 8
constexpr double tol_ellipse_clean = 1e-8;
constexpr double tol_ellipse_noisy = 0.02;
constexpr double tol_center = 1.0 / 100.0;   // criterion 9, in units of kappa
constexpr double tol_width = 0.02;
constexpr double tol_single = 1e-3;
constexpr double tol_period = 1e-3;          // criterion 10

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [x]");
        pass = pass && ok;
    }
};

std::string num(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Outcome dark_mode_exactness() {
    Outcome o;
    const auto a = lattice(4, 0.5 * P.wavelength, P.wavelength);
    const auto c = collective_coupling(P, a);
    const auto shifts = resonance_shifts(P, c.atom_number, c.abs_s(), DELTA30);
    const auto widths = broadenings(P, c.atom_number, c.abs_s(), DELTA30);
    o.require(std::abs(shifts.dark) <= tol_machine * shifts.bright,
              "dark shift/bright shift = " + num(shifts.dark / shifts.bright));
    o.require(std::abs(widths.dark) <= tol_machine * widths.bright,
              "dark broadening/bright = " + num(widths.dark / widths.bright));

    const auto s = scan(P, c, DELTA30, -6.0 * P.kappa, 6.0 * P.kappa, 2401);
    const auto e = eigenmode_fluxes(P, c, DELTA30, s.deltas);
    const auto fit = fit_lorentzian(s.deltas, e.dark);
    o.require(std::abs(fit.center) <= tol_dark_fwhm * P.kappa,
              "dark peak at " + num(fit.center / P.kappa) + " kappa");
    o.require(rel(fit.fwhm, P.kappa) <= tol_dark_fwhm,
              "dark FWHM/kappa = " + num(fit.fwhm / P.kappa, 9));
    return o;
}

Outcome factor_two() {
    Outcome o;
    double worst = 0.0;
    for (int n : {1, 2, 4, 9}) {
        for (double mhz : {5.0, 30.0, 80.0}) {
            const double d = two_pi * mhz * 1e6;
            const double ratio = resonance_shifts(P, n, 1.0, d).bright /
                                 resonance_shifts(P, n, 0.0, d).bright;
            worst = std::max(worst, std::abs(ratio - 2.0) / 2.0);
        }
    }
    o.require(worst <= tol_factor_two, "max |ratio/2 - 1| = " + num(worst));
    return o;
}

Outcome purity_benchmark() {
    Outcome o;
    const auto r = purity_vs_n(P, 20, 0.9);
    double min_purity = 1.0;
    for (std::size_t i = 0; i < r.purity.x.size(); ++i) {
        if (r.purity.x[i] >= 5) min_purity = std::min(min_purity, r.purity.y[i]);
    }
    o.require(min_purity > 0.98, "min D(N>=5) = " + num(min_purity));
    const double nc09 = purity_threshold_nc(P, 0.9);
    const double nc06 = purity_threshold_nc(P, 0.6);
    o.require(std::abs(nc09 - 32.0) <= tol_threshold * 32.0, "NC* (|S|=0.9) = " + num(nc09, 4));
    o.require(std::abs(nc06 - 295.0) <= tol_threshold * 295.0, "NC* (|S|=0.6) = " + num(nc06, 4));
    // Just above the crossing both targets hold at once.
    const double c = cooperativity(P);
    for (const auto& [nc, s] : {std::pair{nc09 * 1.01, 0.9}, std::pair{nc06 * 1.01, 0.6}}) {
        const double delta = detuning_on_broadening_contour(P, nc / c, s, 0.05);
        const double d = dark_purity(P, nc / c, s, delta).purity;
        const double w = relative_broadenings(P, nc / c, s, delta).dark;
        o.require(d > 0.98 && w <= 0.05 * (1 + 1e-12), "D=" + num(d, 4) + " at NC=" + num(nc, 4));
    }
    return o;
}

Outcome conversion() {
    Outcome o;
    const auto [dark, bright] = conversion_vs_n(P, 20, 0.9);
    const double bound = 1.0 / (1.05 * 1.05);
    double min_n2 = 1.0, max_all = 0.0;
    for (std::size_t i = 0; i < dark.x.size(); ++i) {
        if (dark.x[i] >= 2) min_n2 = std::min(min_n2, dark.y[i]);
        max_all = std::max(max_all, dark.y[i]);
    }
    o.require(min_n2 >= 0.8, "min chi_norm(N>=2) = " + num(min_n2));
    o.require(max_all <= bound, "max chi_norm = " + num(max_all) + " <= " + num(bound));

    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const double n = 1.0 + 29.0 * u(rng);
        const double s = 0.01 + 0.99 * u(rng);
        const double delta = two_pi * (0.5e6 + 100e6 * u(rng));
        const double exact = conversion_direct(P, uniform_coupling(n, s), delta).chi;
        const double closed = conversion_closed_form(P, n, s, delta).chi;
        worst = std::max(worst, rel(closed, exact));
    }
    o.require(worst <= tol_closed_form, "closed form vs solver max rel = " + num(worst));
    return o;
}

Outcome thermal_statistics() {
    Outcome o;
    const double sigma = thermal_sigma(ThermalModel::experiment_defaults());
    o.require(std::abs(sigma * 1e9 - 31.0) <= tol_sigma_nm, "sigma = " + num(sigma * 1e9, 5) + " nm");

    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> n8{8};
    const auto curve = thermal_s_curve(P.wavelength, 31e-9, n8, 1000, 1);
    o.require(curve.y[0] >= 0.87 && curve.y[0] <= 0.92, "<|S|>(N=8) = " + num(curve.y[0], 4));

    const double dw = oracle::gaussian_debye_waller(P.wavenumber(), 31e-9);
    const std::vector<int> big{20000};
    const auto plateau = thermal_s_curve(P.wavelength, 31e-9, big, 200, 2);
    const double z = std::abs(plateau.y[0] - dw) / (*plateau.y_err)[0];
    o.require(z <= 3.0, "<|S|>(N=20000) = " + num(plateau.y[0], 5) + " vs " + num(dw, 5) +
                            " (" + num(z, 3) + " SE)");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < 10.0, "runtime " + num(secs, 3) + " s");
    return o;
}

Outcome cavity_constants() {
    Outcome o;
    const double f = finesse(*P.fsr, P.kappa);
    o.require(rel(f, 4.4e4) <= tol_finesse, "F = " + num(f, 6));
    const double budget = mirror_budget(f) * 1e6;
    o.require(rel(budget, 144.0) <= tol_budget, "mirror budget = " + num(budget, 5) + " ppm");
    const double length = cavity_length(*P.fsr);
    o.require(rel(length, 0.20365) <= tol_length, "L = " + num(length * 1e3, 7) + " mm");
    const auto c0 = c0_from_geometry(f, P.wavenumber(), *P.waist_y, *P.waist_z);
    o.require(std::abs(c0.closed_transition - 22.9) <= tol_c0, "C0 = " + num(c0.closed_transition, 4));
    o.require(std::abs(c0.linear_polarization - 11.5) <= tol_c0_half,
              "C0/2 = " + num(c0.linear_polarization, 4));
    // Agreement with the shift-fitted C = 12.5(1), in combined standard errors.
    const double combined = std::hypot(tol_c0_half, tol_fitted_c);
    const double z = std::abs(c0.linear_polarization - 12.5) / combined;
    o.require(z <= 3.0, "C0/2 vs C=12.5(1): " + num(z, 3) + " sigma");
    return o;
}

Outcome adiabatic_elimination() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int n = 1; n <= 9; ++n) {
        const auto a = n == 1 ? lattice(1, 0.5 * P.wavelength, P.wavelength)
                              : with_target_s(n, 0.9, P.wavelength);
        const auto c = collective_coupling(P, a);
        const DriveConfig d{resonance_shifts(P, n, c.abs_s(), DELTA30).dark, DELTA30, 1.0};
        IntegratorConfig cfg;
        cfg.t_end = 100.0 / P.kappa;
        const auto full = integrate_full(P, a, d, cfg);
        const auto ss = steady_modes(P, c, d);
        const auto& f = full.final_state();
        const double err = std::sqrt(std::norm(f.forward - ss.forward) + std::norm(f.backward - ss.backward)) /
                           std::sqrt(std::norm(ss.forward) + std::norm(ss.backward));
        worst = std::max(worst, err);
    }
    o.require(worst <= tol_elimination, "max rel steady-state error (N<=9) = " + num(worst));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < 30.0, "runtime " + num(secs, 3) + " s");

    const auto a = with_target_s(4, 0.9, P.wavelength);
    IntegratorConfig cfg;
    cfg.t_end = 100.0 / P.kappa;
    for (int i = 0; i < 400; ++i) cfg.sample_times.push_back(1e-9 * std::pow(cfg.t_end / 1e-9, i / 399.0));
    std::vector<double> devs;
    for (double mhz : {5.0, 10.0, 20.0, 40.0}) {
        const DriveConfig d{0.0, two_pi * mhz * 1e6, 1.0};
        devs.push_back(max_relative_deviation(integrate_full(P, a, d, cfg), integrate_reduced(P, a, d, cfg)));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < devs.size(); ++i) monotone = monotone && devs[i] < devs[i - 1];
    o.require(monotone, "deviation 5/10/20/40 MHz = " + num(devs[0], 3) + ", " + num(devs[1], 3) + ", " +
                            num(devs[2], 3) + ", " + num(devs[3], 3));
    return o;
}

Outcome phase_law() {
    Outcome o;
    const auto a = with_target_s(4, 0.9, P.wavelength);
    double worst = 0.0;
    for (double x : {0.1, 1.0, 2.5}) {
        const double X = x * P.wavelength;
        const auto r = phase_shift(P, a, X, DELTA30);
        worst = std::max(worst, std::abs(r.delta_phi - 2.0 * P.wavenumber() * X));
    }
    o.require(worst <= tol_phase, "max |dphi - 2kX| = " + num(worst) + " rad");

    double clean = 0.0;
    for (double dphi : {0.4, 1.3, 2.2}) {
        clean = std::max(clean, std::abs(ellipse_fit(interference_correlation(dphi, 200, 5)).delta_phi - dphi));
    }
    o.require(clean <= tol_ellipse_clean, "noiseless ellipse error = " + num(clean));

    double noisy = 0.0;
    for (double dphi : {0.4, 1.3, 2.2}) {
        double sum = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            sum += std::abs(ellipse_fit(interference_correlation(dphi, 200, seed, 0.02)).delta_phi - dphi);
        }
        noisy = std::max(noisy, sum / 100.0);
    }
    o.require(noisy <= tol_ellipse_noisy, "mean |error| at noise 0.02 = " + num(noisy, 3) + " rad");
    return o;
}

Outcome fitting_pipeline() {
    Outcome o;
    const auto c = uniform_coupling(4, 1.0);
    const auto shifts = resonance_shifts(P, 4, 1.0, DELTA30);
    const auto widths = broadenings(P, 4, 1.0, DELTA30);
    const auto s = scan(P, c, DELTA30, -8.0 * P.kappa, shifts.bright + 10.0 * P.kappa, 2001);
    const auto fit = fit_double_lorentzian(s);
    const double dc = std::abs(fit.dark().center - shifts.dark) / P.kappa;
    const double bc = std::abs(fit.bright().center - shifts.bright) / P.kappa;
    o.require(dc <= tol_center && bc <= tol_center,
              "center errors " + num(dc, 3) + ", " + num(bc, 3) + " kappa");
    const double dw = rel(fit.dark().fwhm, P.kappa + widths.dark);
    const double bw = rel(fit.bright().fwhm, P.kappa + widths.bright);
    o.require(dw <= tol_width && bw <= tol_width, "width errors " + num(dw, 3) + ", " + num(bw, 3));

    std::vector<double> x(501), y(501);
    const double center = 0.3, fwhm = 0.8, area = 2.5, offset = 0.1;
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = -5.0 + 0.02 * static_cast<double>(i);
        const double h = 0.5 * fwhm;
        y[i] = offset + area * (h / constants::pi) / ((x[i] - center) * (x[i] - center) + h * h);
    }
    const auto single = fit_lorentzian(x, y);
    const double worst = std::max({rel(single.center, center), rel(single.fwhm, fwhm),
                                   rel(single.area, area), rel(single.offset, offset)});
    o.require(worst <= tol_single, "single round trip max rel = " + num(worst));
    return o;
}

Outcome fringe_calibration() {
    Outcome o;
    std::vector<double> sep;
    for (int i = 0; i < 1200; ++i) sep.push_back(i * P.wavelength / 120.0);
    const auto f = fringe_scan(P, DELTA30, sep);
    const double period = dominant_period(f);
    o.require(rel(period, 0.5 * P.wavelength) <= tol_period,
              "period = " + num(period / P.wavelength, 7) + " lambda");
    auto flux = [&](double s) {
        const double v[1] = {s};
        return fringe_scan(P, DELTA30, v).y[0];
    };
    double worst = 0.0;
    for (int m = 1; m <= 5; ++m) {
        const double centre = 0.5 * m * P.wavelength;
        const double found = oracle::argmax(flux, centre - 0.2 * P.wavelength, centre + 0.2 * P.wavelength);
        worst = std::max(worst, std::abs(found - centre) / P.wavelength);
    }
    o.require(worst <= 1e-4, "max |peak - m lambda/2| = " + num(worst) + " lambda");
    return o;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "dark-mode exactness", dark_mode_exactness},
        {2, "bright/dark factor two", factor_two},
        {3, "purity benchmark", purity_benchmark},
        {4, "conversion efficiency", conversion},
        {5, "thermal statistics", thermal_statistics},
        {6, "derived cavity constants", cavity_constants},
        {7, "adiabatic elimination", adiabatic_elimination},
        {8, "phase law", phase_law},
        {9, "fitting pipeline", fitting_pipeline},
        {10, "fringe calibration", fringe_calibration},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failures;
        std::printf("criterion %2d %s  %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
