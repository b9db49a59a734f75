#include "ringqed_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "ringqed/constants.hpp"
#include "ringqed/dynamics.hpp"
#include "ringqed/format.hpp"
#include "ringqed/io.hpp"
#include "ringqed/metrics.hpp"
#include "ringqed/random.hpp"
#include "ringqed/spectra.hpp"
#include "ringqed/sweep.hpp"

namespace ringqed::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using constants::two_pi;

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return v;
}

// Rates in CurveSeries come out in rad/s; files report Hz.
CurveSeries x_to_hz(CurveSeries s, std::string label) {
    for (double& x : s.x) x /= two_pi;
    s.x_label = std::move(label);
    return s;
}

CurveSeries relabel(CurveSeries s, std::string label) {
    s.label = std::move(label);
    return s;
}

// Collects the files of one run and writes the sidecar last.
class Artifacts {
public:
    Artifacts(fs::path dir, std::string stem) : dir_(std::move(dir)), stem_(std::move(stem)) {}

    void csv(const std::string& part, const std::function<void(std::ostream&)>& write) {
        const std::string name = stem_ + (part.empty() ? "" : "_" + part) + ".csv";
        std::ostringstream body;
        write(body);
        put(name, body.str());
        files_.push_back(name);
    }

    void curves(const std::string& part, const std::vector<CurveSeries>& series) {
        csv(part, [&](std::ostream& os) { write_curves_csv(os, series); });
    }

    void finish(const std::string& command, const std::vector<std::string>& args, const RunConfig& cfg,
                const std::string& summary) {
        json j;
        j["command"] = command;
        j["arguments"] = args;
        j["config"] = dump_config(cfg);
        j["metrics"] = metrics;
        j["summary"] = summary;
        j["files"] = files_;
        put(stem_ + ".json", j.dump(2) + "\n");
    }

    const std::string& stem() const { return stem_; }
    json metrics = json::object();
    // Set by checks whose artifacts are still worth keeping when they fail.
    std::optional<std::string> failure;

private:
    void put(const std::string& name, const std::string& text) {
        std::ofstream f(dir_ / name, std::ios::binary);
        f << text;
        if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    }

    fs::path dir_;
    std::string stem_;
    std::vector<std::string> files_;
};

void write_scan(std::ostream& os, const SpectrumScan& s) { write_scan_csv(os, s); }

json fit_json(const LorentzianFit& f) {
    return json{{"center_hz", f.center / two_pi}, {"fwhm_hz", f.fwhm / two_pi}, {"area", f.area},
                {"offset", f.offset}};
}

// Probe window that shows both resonances with room for their wings.
std::pair<double, double> auto_window(const CavityParams& p, const CollectiveCoupling& c, double atom_detuning) {
    const auto shifts = resonance_shifts(p, c.atom_number, std::min(c.abs_s(), 1.0), atom_detuning);
    const auto widths = broadenings(p, c.atom_number, std::min(c.abs_s(), 1.0), atom_detuning);
    const double margin = 8.0 * p.kappa + 4.0 * std::max(widths.bright, widths.dark);
    const double lo = std::min({0.0, shifts.bright, shifts.dark});
    const double hi = std::max({0.0, shifts.bright, shifts.dark});
    return {lo - margin, hi + margin};
}

// Scan plus fit; returns the summary fragment.
std::string spectrum_into(Artifacts& art, const std::string& part, const CavityParams& p,
                          const AtomArray& a, const RunConfig& cfg, json& m) {
    const auto c = collective_coupling(p, a);
    const double atom_detuning = two_pi * cfg.atom_detuning_hz;
    auto [lo, hi] = auto_window(p, c, atom_detuning);
    if (cfg.delta_min_hz) {
        lo = two_pi * *cfg.delta_min_hz;
        hi = two_pi * *cfg.delta_max_hz;
    }
    const auto s = scan(p, a, atom_detuning, lo, hi, cfg.points, cfg.e_in);
    art.csv(part, [&](std::ostream& os) { write_scan(os, s); });

    const auto shifts = resonance_shifts(p, c.atom_number, std::min(c.abs_s(), 1.0), atom_detuning);
    const auto widths = broadenings(p, c.atom_number, std::min(c.abs_s(), 1.0), atom_detuning);
    m["atom_number"] = c.atom_number;
    m["abs_s"] = c.abs_s();
    m["theory"] = {{"bright_shift_hz", shifts.bright / two_pi},
                   {"dark_shift_hz", shifts.dark / two_pi},
                   {"bright_fwhm_hz", (p.kappa + widths.bright) / two_pi},
                   {"dark_fwhm_hz", (p.kappa + widths.dark) / two_pi}};
    if (c.abs_s() > 1e-9) {
        try {
            const auto fit = fit_double_lorentzian(s);
            m["fit"] = {{"bright", fit_json(fit.bright())}, {"dark", fit_json(fit.dark())}};
            return "dark " + fixed(fit.dark().center / two_pi / 1e3, 3) + " kHz (FWHM " +
                   fixed(fit.dark().fwhm / two_pi / 1e3, 3) + " kHz), bright " +
                   fixed(fit.bright().center / two_pi / 1e3, 3) + " kHz (FWHM " +
                   fixed(fit.bright().fwhm / two_pi / 1e3, 3) + " kHz)";
        } catch (const ValidationError&) {
            // Peaks not resolved; fall through to a single Lorentzian.
        }
    }
    const auto fit = fit_lorentzian(s, Channel::total);
    m["fit"] = {{"single", fit_json(fit)}};
    return "peak " + fixed(fit.center / two_pi / 1e3, 3) + " kHz (FWHM " + fixed(fit.fwhm / two_pi / 1e3, 3) +
           " kHz)";
}

std::string cmd_spectrum(Artifacts& art, const RunConfig& cfg) {
    const auto p = cfg.cavity();
    const auto a = cfg.atoms.build(cfg.wavelength);
    return "spectrum: N=" + std::to_string(a.size()) + " " + spectrum_into(art, "", p, a, cfg, art.metrics);
}

std::string cmd_purity(Artifacts& art, const RunConfig& cfg) {
    const auto p = cfg.cavity();
    const auto r = purity_vs_n(p, cfg.n_max, cfg.abs_s, cfg.level);
    art.curves("", {r.purity, r.bright_broadening, r.dark_broadening,
                    r.detuning.scaled(1.0 / two_pi, "atom_detuning_hz")});
    double min_d = 1.0;
    for (std::size_t i = 0; i < r.purity.x.size(); ++i) {
        if (r.purity.x[i] >= 5) min_d = std::min(min_d, r.purity.y[i]);
    }
    art.metrics["abs_s"] = cfg.abs_s;
    art.metrics["level"] = cfg.level;
    art.metrics["min_purity_n_ge_5"] = min_d;
    std::string summary = "purity: |S|=" + fixed(cfg.abs_s, 3) + " on dk/k=" + fixed(cfg.level, 3) +
                          " contour, min D(N>=5)=" + fixed(min_d, 4);
    if (cfg.abs_s > 0.0 && cfg.abs_s < 1.0) {
        const double nc = purity_threshold_nc(p, cfg.abs_s, cfg.level, cfg.purity_target);
        art.metrics["threshold_nc"] = nc;
        summary += ", NC*=" + fixed(nc, 1);
    }
    // The configured array at the configured detuning.
    const auto c = collective_coupling(p, cfg.atoms.build(cfg.wavelength));
    if (c.abs_s() > 1e-9 && cfg.atom_detuning_hz != 0.0) {
        const auto d = dark_purity(p, c.atom_number, std::min(c.abs_s(), 1.0), two_pi * cfg.atom_detuning_hz);
        art.metrics["array"] = {{"atom_number", c.atom_number}, {"abs_s", c.abs_s()}, {"purity", d.purity}};
    }
    return summary;
}

std::string contour_into(Artifacts& art, const std::string& part, const CavityParams& p, double abs_s,
                         const RunConfig& cfg, json& m) {
    const auto c = purity_contour(p, abs_s, {cfg.nc_min, cfg.nc_max},
                                  {two_pi * cfg.detuning_min_hz, two_pi * cfg.detuning_max_hz},
                                  cfg.resolution, cfg.level, cfg.threads);
    art.csv(part.empty() ? "" : part, [&](std::ostream& os) {
        os << "nc,atom_detuning_hz,purity,dark_broadening\n";
        for (std::size_t iy = 0; iy < c.purity.ny(); ++iy) {
            for (std::size_t ix = 0; ix < c.purity.nx(); ++ix) {
                os << format_double(c.purity.x_axis.values[ix]) << ','
                   << format_double(c.purity.y_axis.values[iy] / two_pi) << ','
                   << format_double(c.purity.at(ix, iy)) << ',' << format_double(c.broadening.at(ix, iy))
                   << '\n';
            }
        }
    });
    std::vector<Polyline> lines = c.level_curve;
    for (auto& line : lines) {
        for (auto& pt : line) pt.y /= two_pi;
    }
    art.csv(part.empty() ? "level" : part + "_level", [&](std::ostream& os) { write_polylines_csv(os, lines); });
    m["abs_s"] = abs_s;
    m["level"] = cfg.level;
    m["resolution"] = cfg.resolution;
    m["level_polylines"] = lines.size();
    std::string summary = "|S|=" + fixed(abs_s, 2) + " " + std::to_string(cfg.resolution) + "x" +
                          std::to_string(cfg.resolution) + " grid";
    if (abs_s > 0.0 && abs_s < 1.0) {
        const double nc = purity_threshold_nc(p, abs_s, cfg.level, cfg.purity_target);
        m["threshold_nc"] = nc;
        summary += ", NC*=" + fixed(nc, 1);
    }
    return summary;
}

std::string cmd_contour(Artifacts& art, const RunConfig& cfg) {
    return "contour: " + contour_into(art, "", cfg.cavity(), cfg.abs_s, cfg, art.metrics);
}

std::string cmd_conversion(Artifacts& art, const RunConfig& cfg) {
    const auto p = cfg.cavity();
    const auto [dark, bright] = conversion_vs_n(p, cfg.n_max, cfg.abs_s, cfg.level);
    art.curves("", {dark, bright});
    double min_dark = 1.0, max_dark = 0.0, max_bright = 0.0;
    for (std::size_t i = 0; i < dark.x.size(); ++i) {
        if (dark.x[i] >= 2) min_dark = std::min(min_dark, dark.y[i]);
        max_dark = std::max(max_dark, dark.y[i]);
        max_bright = std::max(max_bright, bright.y[i]);
    }
    art.metrics["min_dark_n_ge_2"] = min_dark;
    art.metrics["max_dark"] = max_dark;
    art.metrics["max_bright"] = max_bright;
    art.metrics["bound"] = 1.0 / ((1.0 + cfg.level) * (1.0 + cfg.level));
    return "conversion: dark chi/(eta_in eta_out) " + fixed(min_dark, 4) + ".." + fixed(max_dark, 4) +
           " (N>=2), bright max " + fixed(max_bright, 4);
}

std::string phase_into(Artifacts& art, const std::string& part, const RunConfig& cfg, json& m) {
    const auto p = cfg.cavity();
    const auto a = cfg.atoms.build(cfg.wavelength);
    const double atom_detuning = two_pi * cfg.atom_detuning_hz;
    double worst = 0.0;
    art.csv(part, [&](std::ostream& os) {
        os << "displacement_lambda,delta_phi,two_k_x,forward_phase_change\n";
        for (double x : cfg.displacements) {
            const auto r = phase_shift(p, a, x * cfg.wavelength, atom_detuning);
            const double expected = 2.0 * p.wavenumber() * x * cfg.wavelength;
            worst = std::max(worst, std::abs(r.delta_phi - expected));
            os << format_double(x) << ',' << format_double(r.delta_phi) << ',' << format_double(expected) << ','
               << format_double(r.forward_phase_change) << '\n';
        }
    });
    m["max_phase_error"] = worst;

    // Correlation ellipses and the phase recovered from each.
    const std::uint64_t stream = stream_id("phase");
    json fits = json::array();
    double worst_fit = 0.0;
    art.csv(part.empty() ? "ellipse" : part + "_ellipse", [&](std::ostream& os) {
        os << "delta_phi,cos_phi1,cos_phi2\n";
        for (std::size_t i = 0; i < cfg.phase_differences.size(); ++i) {
            const double dphi = cfg.phase_differences[i];
            const auto pts = interference_correlation(dphi, cfg.samples, derive_seed(cfg.seed, stream, i),
                                                      cfg.point_noise);
            const auto fit = ellipse_fit(pts);
            worst_fit = std::max(worst_fit, std::abs(fit.delta_phi - dphi));
            fits.push_back({{"delta_phi", dphi}, {"fitted", fit.delta_phi}, {"degenerate", fit.degenerate}});
            for (const auto& pt : pts) {
                os << format_double(dphi) << ',' << format_double(pt.cos_phi1) << ','
                   << format_double(pt.cos_phi2) << '\n';
            }
        }
    });
    m["ellipse_fits"] = fits;
    m["max_ellipse_error"] = worst_fit;
    return "max |dphi - 2kX| = " + sci(worst) + " rad, ellipse max error " + sci(worst_fit) + " rad";
}

std::string cmd_phase(Artifacts& art, const RunConfig& cfg) {
    return "phase: " + phase_into(art, "", cfg, art.metrics);
}

CurveSeries thermal_curve(const RunConfig& cfg, double sigma, std::uint64_t seed) {
    return thermal_s_curve(cfg.wavelength, sigma, cfg.atom_numbers, cfg.trials, seed, cfg.threads);
}

std::string cmd_thermal(Artifacts& art, const RunConfig& cfg) {
    const double sigma = cfg.position_spread();
    const auto curve = thermal_curve(cfg, sigma, derive_seed(cfg.seed, stream_id("thermal-s")));
    art.curves("", {curve});
    const double k = constants::two_pi / cfg.wavelength;
    const double dw = std::exp(-2.0 * k * k * sigma * sigma);
    art.metrics["sigma_m"] = sigma;
    art.metrics["debye_waller"] = dw;
    art.metrics["largest_n_mean_abs_s"] = curve.y.back();
    return "thermal-s: sigma=" + fixed(sigma * 1e9, 3) + " nm, <|S|>(N=" + std::to_string(cfg.atom_numbers.back()) +
           ")=" + fixed(curve.y.back(), 4) + " vs exp(-2k^2 sigma^2)=" + fixed(dw, 4);
}

std::string cmd_fringe(Artifacts& art, const RunConfig& cfg) {
    const auto p = cfg.cavity();
    std::vector<double> sep(static_cast<std::size_t>(cfg.separation_points));
    for (std::size_t i = 0; i < sep.size(); ++i) {
        sep[i] = cfg.separation_max * cfg.wavelength * static_cast<double>(i) / static_cast<double>(sep.size());
    }
    const auto f = fringe_scan(p, two_pi * cfg.atom_detuning_hz, sep);
    art.curves("", {f});
    const double period = dominant_period(f) / cfg.wavelength;
    art.metrics["period_lambda"] = period;
    return "fringe: period = " + fixed(period, 6) + " lambda";
}

std::string cmd_waists(Artifacts& art, const RunConfig& cfg) {
    const auto p = cfg.cavity();
    const auto offsets = linspace(-cfg.offset_max, cfg.offset_max, cfg.offset_points);
    const double atom_detuning = two_pi * cfg.atom_detuning_hz;
    const auto y = waist_scan(p, atom_detuning, TransverseAxis::y, offsets);
    const auto z = waist_scan(p, atom_detuning, TransverseAxis::z, offsets);
    art.curves("", {y.scaled(1.0 / two_pi, "bright_shift_hz"), z.scaled(1.0 / two_pi, "bright_shift_hz")});
    const double wy = fit_waist(y), wz = fit_waist(z);
    art.metrics["waist_y_m"] = wy;
    art.metrics["waist_z_m"] = wz;
    return "waists: w_y = " + fixed(wy * 1e6, 3) + " um, w_z = " + fixed(wz * 1e6, 3) + " um";
}

std::string dispersive_into(Artifacts& art, const std::string& part, const CavityParams& p, double n, double s,
                            const RunConfig& cfg, json& m) {
    auto deltas = linspace(two_pi * cfg.dispersive_min_hz, two_pi * cfg.dispersive_max_hz, cfg.dispersive_points);
    const auto [bright, dark] = dispersive_shift_scan(p, n, s, deltas);
    art.curves(part, {x_to_hz(bright.scaled(1.0 / two_pi, "shift_hz"), "atom_detuning_hz"),
                      x_to_hz(dark.scaled(1.0 / two_pi, "shift_hz"), "atom_detuning_hz")});
    const auto op = resonance_shifts(p, n, s, two_pi * cfg.atom_detuning_hz);
    m["atom_number"] = n;
    m["abs_s"] = s;
    m["operating_point"] = {{"atom_detuning_hz", cfg.atom_detuning_hz},
                            {"bright_shift_hz", op.bright / two_pi},
                            {"dark_shift_hz", op.dark / two_pi}};
    return "N=" + fixed(n, 0) + " |S|=" + fixed(s, 3) + ", at " + fixed(cfg.atom_detuning_hz / 1e6, 1) +
           " MHz bright " + fixed(op.bright / two_pi / 1e3, 3) + " kHz, dark " + fixed(op.dark / two_pi / 1e3, 3) +
           " kHz";
}

std::string cmd_dispersive(Artifacts& art, const RunConfig& cfg) {
    const auto p = cfg.cavity();
    const auto c = collective_coupling(p, cfg.atoms.build(cfg.wavelength));
    return "dispersive: " + dispersive_into(art, "", p, c.atom_number, std::min(c.abs_s(), 1.0), cfg, art.metrics);
}

// Tolerance on the steady-state agreement of the full and reduced models.
constexpr double elimination_tolerance = 1e-3;

std::string cmd_dynamics(Artifacts& art, const RunConfig& cfg) {
    const auto p = cfg.cavity();
    const double atom_detuning = two_pi * cfg.atom_detuning_hz;
    double worst = 0.0;
    art.csv("", [&](std::ostream& os) {
        os << "atom_number,abs_s,steady_state_error,trajectory_deviation,peak_excitation\n";
        for (int n = 1; n <= cfg.n_max; ++n) {
            const auto a = n == 1 ? lattice(1, 0.5 * cfg.wavelength, cfg.wavelength)
                                  : with_target_s(n, cfg.abs_s, cfg.wavelength);
            const auto c = collective_coupling(p, a);
            const DriveConfig d{resonance_shifts(p, n, c.abs_s(), atom_detuning).dark, atom_detuning, cfg.e_in};
            IntegratorConfig ic;
            ic.t_end = cfg.t_end_kappa / p.kappa;
            const auto full = integrate_full(p, a, d, ic);
            const auto reduced = integrate_reduced(p, a, d, ic);
            const auto ss = steady_modes(p, c, d);
            const auto& f = full.final_state();
            const double err = std::sqrt(std::norm(f.forward - ss.forward) + std::norm(f.backward - ss.backward)) /
                               std::sqrt(std::norm(ss.forward) + std::norm(ss.backward));
            worst = std::max(worst, err);
            os << n << ',' << format_double(c.abs_s()) << ',' << format_double(err) << ','
               << format_double(max_relative_deviation(full, reduced)) << ','
               << format_double(weak_excitation_check(full)) << '\n';
        }
    });
    art.metrics["max_steady_state_error"] = worst;
    art.metrics["tolerance"] = elimination_tolerance;
    const std::string summary = "dynamics-check: max relative deviation full vs reduced = " + sci(worst);
    art.metrics["passed"] = worst < elimination_tolerance;
    if (!(worst < elimination_tolerance)) art.failure = summary + " exceeds " + sci(elimination_tolerance);
    return summary;
}

std::string reproduce(Artifacts& art, const RunConfig& cfg, const std::string& fig) {
    const auto p = cfg.cavity();
    const double atom_detuning = two_pi * cfg.atom_detuning_hz;
    json& m = art.metrics;
    if (fig == "fig2") {
        // (a) empty cavity, |S| = 0 and |S| = 1 spectra for four atoms.
        const AtomArray empty;
        RunConfig wide = cfg;
        const auto s0 = with_target_s(4, 0.0, cfg.wavelength);
        const auto s1 = lattice(4, 0.5 * cfg.wavelength, cfg.wavelength);
        const auto c1 = collective_coupling(p, s1);
        auto [lo, hi] = auto_window(p, c1, atom_detuning);
        if (!cfg.delta_min_hz) {
            wide.delta_min_hz = lo / two_pi;
            wide.delta_max_hz = hi / two_pi;
        }
        const auto bare = scan(p, uniform_coupling(0, 0.0), atom_detuning, two_pi * *wide.delta_min_hz,
                               two_pi * *wide.delta_max_hz, wide.points, wide.e_in);
        art.csv("a_empty", [&](std::ostream& os) { write_scan(os, bare); });
        spectrum_into(art, "a_s0", p, s0, wide, m["a_s0"]);
        const std::string a1 = spectrum_into(art, "a_s1", p, s1, wide, m["a_s1"]);
        // (b) shifts versus |S|, (c) versus N at |S| = 1 and 0.9.
        const auto grid = linspace(0.0, 1.0, 101);
        const auto [b_bright, b_dark] = shifts_vs_s(p, 4, atom_detuning, grid);
        const auto [c_bright, c_dark] = shifts_vs_n(p, cfg.n_max, atom_detuning, 1.0);
        const auto [d_bright, d_dark] = shifts_vs_n(p, cfg.n_max, atom_detuning, 0.9);
        art.curves("", {relabel(b_bright.scaled(1.0 / two_pi, "shift_hz"), "b_bright"),
                        relabel(b_dark.scaled(1.0 / two_pi, "shift_hz"), "b_dark"),
                        relabel(c_bright.scaled(1.0 / two_pi, "shift_hz"), "c_bright_s1"),
                        relabel(c_dark.scaled(1.0 / two_pi, "shift_hz"), "c_dark_s1"),
                        relabel(d_bright.scaled(1.0 / two_pi, "shift_hz"), "c_bright_s0.9"),
                        relabel(d_dark.scaled(1.0 / two_pi, "shift_hz"), "c_dark_s0.9")});
        m["bright_shift_n_max_hz"] = c_bright.y.back() / two_pi;
        return "reproduce fig2: |S|=1 " + a1 + "; bright shift at N=" + std::to_string(cfg.n_max) + " " +
               fixed(c_bright.y.back() / two_pi / 1e3, 3) + " kHz";
    }
    if (fig == "fig3") {
        const std::string a = contour_into(art, "grid", p, cfg.abs_s, cfg, m["a"]);
        const auto r = purity_vs_n(p, cfg.n_max, cfg.abs_s, cfg.level);
        art.curves("", {r.purity, r.bright_broadening, r.dark_broadening,
                        r.detuning.scaled(1.0 / two_pi, "atom_detuning_hz")});
        double min_d = 1.0;
        for (std::size_t i = 0; i < r.purity.x.size(); ++i) {
            if (r.purity.x[i] >= 5) min_d = std::min(min_d, r.purity.y[i]);
        }
        m["min_purity_n_ge_5"] = min_d;
        return "reproduce fig3: " + a + ", min D(N>=5)=" + fixed(min_d, 4);
    }
    if (fig == "fig4") return "reproduce fig4: " + cmd_conversion(art, cfg).substr(std::string("conversion: ").size());
    if (fig == "fig5") return "reproduce fig5: " + phase_into(art, "", cfg, m);
    if (fig == "figS2") {
        const std::string b = dispersive_into(art, "", p, 4, cfg.abs_s, cfg, m["b"]);
        const std::string sc =
            spectrum_into(art, "c", p, with_target_s(4, cfg.abs_s, cfg.wavelength), cfg, m["c"]);
        return "reproduce figS2: " + b + "; spectrum " + sc;
    }
    if (fig == "figS4") return "reproduce figS4: " + cmd_fringe(art, cfg).substr(std::string("fringe: ").size());
    if (fig == "figS5") {
        // Sideband-cooled (configured) and 30 uK atoms.
        const std::uint64_t stream = stream_id("thermal-s");
        const double sigma_cold = cfg.position_spread();
        ThermalModel hot = cfg.thermal();
        hot.temperature = 30e-6;
        const double sigma_hot = thermal_sigma(hot);
        auto cold = thermal_curve(cfg, sigma_cold, derive_seed(cfg.seed, stream, 0));
        auto warm = thermal_curve(cfg, sigma_hot, derive_seed(cfg.seed, stream, 1));
        cold.label = "sigma_" + fixed(sigma_cold * 1e9, 1) + "nm";
        warm.label = "sigma_" + fixed(sigma_hot * 1e9, 1) + "nm";
        art.curves("", {cold, warm});
        m["sigma_m"] = {sigma_cold, sigma_hot};
        m["largest_n_mean_abs_s"] = {cold.y.back(), warm.y.back()};
        return "reproduce figS5: <|S|>(N=" + std::to_string(cfg.atom_numbers.back()) + ") = " +
               fixed(cold.y.back(), 3) + " (" + fixed(sigma_cold * 1e9, 1) + " nm), " + fixed(warm.y.back(), 3) +
               " (" + fixed(sigma_hot * 1e9, 1) + " nm)";
    }
    if (fig == "figS6") {
        const std::string a = contour_into(art, "", p, 0.9, cfg, m["a"]);
        const std::string b = contour_into(art, "b", p, 0.6, cfg, m["b"]);
        return "reproduce figS6: " + a + "; " + b;
    }
    throw ValidationError("unknown figure '" + fig + "'");
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names{"spectrum", "purity", "contour", "conversion",
                                                "phase", "thermal-s", "fringe", "waists",
                                                "dispersive", "dynamics-check", "reproduce"};
    return names;
}

const std::vector<std::string>& figure_names() {
    static const std::vector<std::string> names{"fig2", "fig3", "fig4", "fig5", "figS2", "figS4", "figS5", "figS6"};
    return names;
}

std::string artifact_stem(const std::string& command, const std::vector<std::string>& args,
                          const RunConfig& cfg) {
    RunConfig canonical = cfg;
    canonical.out = ".";
    canonical.threads = 1;
    std::string key = command;
    for (const auto& a : args) key += '\n' + a;
    key += '\n' + dump_config(canonical);
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(fnv1a(key)));
    std::string stem = command;
    for (const auto& a : args) stem += "_" + a;
    return stem + "_" + hex;
}

int run_subcommand(const std::string& command, const std::vector<std::string>& args, const RunConfig& cfg,
                   std::ostream& out, std::ostream& err) {
    using Handler = std::string (*)(Artifacts&, const RunConfig&);
    static const std::map<std::string, Handler> handlers{
        {"spectrum", cmd_spectrum}, {"purity", cmd_purity},         {"contour", cmd_contour},
        {"conversion", cmd_conversion}, {"phase", cmd_phase},       {"thermal-s", cmd_thermal},
        {"fringe", cmd_fringe},     {"waists", cmd_waists},         {"dispersive", cmd_dispersive},
        {"dynamics-check", cmd_dynamics}};
    try {
        const bool is_reproduce = command == "reproduce";
        if (!is_reproduce && !handlers.count(command)) throw ValidationError("unknown subcommand '" + command + "'");
        if (is_reproduce) {
            if (args.size() != 1) throw ValidationError("reproduce needs exactly one figure name");
            const auto& figs = figure_names();
            if (std::find(figs.begin(), figs.end(), args[0]) == figs.end()) {
                throw ValidationError("unknown figure '" + args[0] + "'");
            }
        } else if (!args.empty()) {
            throw ValidationError(command + " takes no arguments");
        }
        cfg.validate();
        std::error_code ec;
        fs::create_directories(cfg.out, ec);
        if (ec) throw ValidationError("cannot create output directory " + cfg.out + ": " + ec.message());

        Artifacts art(cfg.out, artifact_stem(command, args, cfg));
        const std::string summary = is_reproduce ? reproduce(art, cfg, args[0]) : handlers.at(command)(art, cfg);
        art.finish(command, args, cfg, summary);
        out << summary << " [" << (fs::path(cfg.out) / (art.stem() + ".json")).string() << "]\n";
        if (art.failure) {
            err << "numerical failure: " << *art.failure << '\n';
            return exit_numerical;
        }
        return exit_ok;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }
}

} // namespace ringqed::cli
