#include "ringqed/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "ringqed/array.hpp"
#include "ringqed/constants.hpp"
#include "ringqed/errors.hpp"
#include "ringqed/levmar.hpp"
#include "ringqed/parallel.hpp"
#include "ringqed/random.hpp"

namespace ringqed {
namespace {

CurveSeries make_series(std::string label, std::string x_label, std::string y_label,
                        std::size_t n) {
    CurveSeries s;
    s.label = std::move(label);
    s.x_label = std::move(x_label);
    s.y_label = std::move(y_label);
    s.x.reserve(n);
    s.y.reserve(n);
    return s;
}

void check_range(const Range& r, const char* what) {
    if (!(r.lo > 0.0) || !(r.hi > r.lo) || !std::isfinite(r.hi)) {
        throw ValidationError(std::string(what) + " range needs 0 < lo < hi");
    }
}

} // namespace

void CurveSeries::validate() const {
    if (x.size() != y.size()) throw ValidationError("curve x and y lengths differ");
    if (y_err && y_err->size() != y.size()) throw ValidationError("curve y_err length differs");
}

CurveSeries CurveSeries::scaled(double factor, std::string new_y_label) const {
    CurveSeries s = *this;
    s.y_label = std::move(new_y_label);
    for (double& v : s.y) v *= factor;
    if (s.y_err) {
        for (double& v : *s.y_err) v *= std::abs(factor);
    }
    return s;
}

std::pair<CurveSeries, CurveSeries> shifts_vs_s(const CavityParams& p, double atom_number,
                                                double atom_detuning, std::span<const double> s_grid) {
    auto bright = make_series("bright", "abs_s", "shift_rad_s", s_grid.size());
    auto dark = make_series("dark", "abs_s", "shift_rad_s", s_grid.size());
    for (double s : s_grid) {
        const auto shifts = resonance_shifts(p, atom_number, s, atom_detuning);
        bright.x.push_back(s);
        bright.y.push_back(shifts.bright);
        dark.x.push_back(s);
        dark.y.push_back(shifts.dark);
    }
    return {std::move(bright), std::move(dark)};
}

std::pair<CurveSeries, CurveSeries> shifts_vs_n(const CavityParams& p, int n_max,
                                                double atom_detuning, double abs_s) {
    if (n_max < 0) throw ValidationError("n_max must be >= 0");
    const auto n = static_cast<std::size_t>(n_max) + 1;
    auto bright = make_series("bright", "atom_number", "shift_rad_s", n);
    auto dark = make_series("dark", "atom_number", "shift_rad_s", n);
    for (int k = 0; k <= n_max; ++k) {
        const auto shifts = resonance_shifts(p, k, abs_s, atom_detuning);
        bright.x.push_back(k);
        bright.y.push_back(shifts.bright);
        dark.x.push_back(k);
        dark.y.push_back(shifts.dark);
    }
    return {std::move(bright), std::move(dark)};
}

double detuning_on_broadening_contour(const CavityParams& p, double atom_number, double abs_s,
                                      double level) {
    if (!(level > 0.0)) throw ValidationError("contour level must be > 0");
    // N C (1 - |S|) gamma^2 / (4 Delta^2 + gamma^2) = level
    const double reach = atom_number * cooperativity(p) * (1.0 - abs_s);
    if (!(reach > level)) {
        throw ValidationError("dark broadening never reaches the contour level at this N and |S|");
    }
    return 0.5 * p.gamma * std::sqrt(reach / level - 1.0);
}

PurityContour purity_contour(const CavityParams& p, double abs_s, Range nc, Range atom_detuning,
                             int resolution, double level, unsigned threads) {
    check_range(nc, "NC");
    check_range(atom_detuning, "detuning");
    if (resolution < 2) throw ValidationError("resolution must be >= 2");
    const double c = cooperativity(p);
    if (!(c > 0.0)) throw ValidationError("purity contour needs C > 0");

    PurityContour out;
    out.level = level;
    out.purity.x_axis = Axis::logarithmic("NC", "", nc.lo, nc.hi, resolution);
    out.purity.y_axis = Axis::logarithmic("atom_detuning", "rad/s", atom_detuning.lo,
                                          atom_detuning.hi, resolution);
    out.broadening.x_axis = out.purity.x_axis;
    out.broadening.y_axis = out.purity.y_axis;
    const auto cells = static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution);
    out.purity.values.assign(cells, 0.0);
    out.broadening.values.assign(cells, 0.0);

    const auto& xs = out.purity.x_axis.values;
    const auto& ys = out.purity.y_axis.values;
    parallel_for(static_cast<std::size_t>(resolution), threads, [&](std::size_t iy) {
        for (std::size_t ix = 0; ix < xs.size(); ++ix) {
            const double n = xs[ix] / c;
            out.purity.at(ix, iy) = dark_purity(p, n, abs_s, ys[iy]).purity;
            out.broadening.at(ix, iy) = relative_broadenings(p, n, abs_s, ys[iy]).dark;
        }
    });
    out.level_curve = iso_contour(out.broadening, level);
    return out;
}

double purity_threshold_nc(const CavityParams& p, double abs_s, double level,
                           double purity_target) {
    if (!(abs_s > 0.0) || !(abs_s < 1.0)) throw ValidationError("threshold needs 0 < |S| < 1");
    if (!(purity_target > 0.0) || !(purity_target < 1.0)) {
        throw ValidationError("purity target must lie in (0, 1)");
    }
    const double c = cooperativity(p);
    if (!(c > 0.0)) throw ValidationError("threshold needs C > 0");
    auto purity_at = [&](double nc) {
        const double n = nc / c;
        return dark_purity(p, n, abs_s, detuning_on_broadening_contour(p, n, abs_s, level)).purity;
    };
    double lo = std::log(level / (1.0 - abs_s) * (1.0 + 1e-6));
    double hi = std::log(1e9);
    if (purity_at(std::exp(hi)) < purity_target) {
        throw NumericalError("purity target not reached on the contour below NC = 1e9");
    }
    if (purity_at(std::exp(lo)) >= purity_target) return std::exp(lo);
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        (purity_at(std::exp(mid)) >= purity_target ? hi : lo) = mid;
    }
    return std::exp(hi);
}

PurityVsN purity_vs_n(const CavityParams& p, int n_max, double abs_s, double level) {
    if (n_max < 1) throw ValidationError("n_max must be >= 1");
    const auto n = static_cast<std::size_t>(n_max);
    PurityVsN out{make_series("purity", "atom_number", "purity", n),
                  make_series("bright", "atom_number", "relative_broadening", n),
                  make_series("dark", "atom_number", "relative_broadening", n),
                  make_series("detuning", "atom_number", "atom_detuning_rad_s", n)};
    for (int k = 1; k <= n_max; ++k) {
        const double delta = detuning_on_broadening_contour(p, k, abs_s, level);
        const auto widths = relative_broadenings(p, k, abs_s, delta);
        for (auto* s : {&out.purity, &out.bright_broadening, &out.dark_broadening, &out.detuning}) {
            s->x.push_back(k);
        }
        out.purity.y.push_back(dark_purity(p, k, abs_s, delta).purity);
        out.bright_broadening.y.push_back(widths.bright);
        out.dark_broadening.y.push_back(widths.dark);
        out.detuning.y.push_back(delta);
    }
    return out;
}

std::pair<CurveSeries, CurveSeries> conversion_vs_n(const CavityParams& p, int n_max, double abs_s,
                                                    double contour_level) {
    if (n_max < 1) throw ValidationError("n_max must be >= 1");
    if (!(contour_level > 0.0)) throw ValidationError("contour level must be > 0");
    const auto n = static_cast<std::size_t>(n_max);
    auto dark = make_series("dark", "atom_number", "chi_normalized", n);
    auto bright = make_series("bright", "atom_number", "chi_normalized", n);
    for (int k = 1; k <= n_max; ++k) {
        const double delta = detuning_on_broadening_contour(p, k, abs_s, contour_level);
        const auto c = uniform_coupling(k, abs_s);
        dark.x.push_back(k);
        dark.y.push_back(conversion_direct(p, c, delta, Resonance::dark).chi_normalized);
        bright.x.push_back(k);
        bright.y.push_back(conversion_direct(p, c, delta, Resonance::bright).chi_normalized);
    }
    return {std::move(dark), std::move(bright)};
}

CurveSeries thermal_s_curve(double wavelength, double sigma, std::span<const int> atom_numbers,
                            int trials, std::uint64_t seed, unsigned threads) {
    if (trials < 2) throw ValidationError("need at least 2 trials for error bars");
    if (!(sigma >= 0.0)) throw ValidationError("sigma must be >= 0");
    for (int n : atom_numbers) {
        if (n < 1) throw ValidationError("atom numbers must be >= 1");
    }
    const double k = constants::two_pi / wavelength;
    const auto nt = static_cast<std::size_t>(trials);
    const std::uint64_t stream = stream_id("thermal-s");

    auto out = make_series("thermal", "atom_number", "mean_abs_s", atom_numbers.size());
    out.y_err.emplace();
    std::vector<double> samples(nt);
    for (int n : atom_numbers) {
        const AtomArray base = lattice(n, 0.5 * wavelength, wavelength);
        const std::uint64_t per_n = derive_seed(seed, stream, static_cast<std::uint64_t>(n));
        parallel_for(nt, threads, [&](std::size_t t) {
            const auto a = sample_thermal(base, sigma, derive_seed(per_n, stream, t));
            samples[t] = std::abs(structure_factor(a, k));
        });
        double mean = 0.0;
        for (double v : samples) mean += v;
        mean /= static_cast<double>(nt);
        double var = 0.0;
        for (double v : samples) var += (v - mean) * (v - mean);
        var /= static_cast<double>(nt - 1);
        out.x.push_back(n);
        out.y.push_back(mean);
        out.y_err->push_back(std::sqrt(var / static_cast<double>(nt)));
    }
    return out;
}

CurveSeries fringe_scan(const CavityParams& p, double atom_detuning,
                        std::span<const double> separations) {
    auto out = make_series("fringe", "separation_m", "total_flux", separations.size());
    const DriveConfig drive{0.0, atom_detuning, 1.0};
    for (double s : separations) {
        const auto m = steady_modes(p, AtomArray({0.0, s}), drive);
        out.x.push_back(s);
        out.y.push_back(p.kappa_out * (std::norm(m.forward) + std::norm(m.backward)));
    }
    return out;
}

double dominant_period(const CurveSeries& s) {
    s.validate();
    const std::size_t n = s.x.size();
    if (n < 8) throw ValidationError("period estimate needs at least 8 samples");
    const double dx = (s.x.back() - s.x.front()) / static_cast<double>(n - 1);
    if (!(dx > 0.0)) throw ValidationError("samples must be increasing");
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(s.x[i] - s.x[i - 1] - dx) > 1e-6 * dx) {
            throw ValidationError("period estimate needs uniform sampling");
        }
    }
    double mean = 0.0;
    for (double v : s.y) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double hann = 0.5 - 0.5 * std::cos(constants::two_pi * static_cast<double>(i) /
                                                 static_cast<double>(n - 1));
        w[i] = hann * (s.y[i] - mean);
    }
    auto power = [&](double f) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            acc += w[i] * std::polar(1.0, -constants::two_pi * f * static_cast<double>(i) * dx);
        }
        return std::norm(acc);
    };
    const double span = dx * static_cast<double>(n - 1);
    const double f_min = 1.0 / span, f_max = 0.5 / dx;
    const double df = f_min / 8.0;
    double best_f = f_min, best_p = -1.0;
    for (double f = f_min; f <= f_max; f += df) {
        const double pw = power(f);
        if (pw > best_p) {
            best_p = pw;
            best_f = f;
        }
    }
    // Golden-section refinement around the coarse maximum.
    double a = std::max(f_min, best_f - df), b = std::min(f_max, best_f + df);
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a), d = a + r * (b - a);
    double pc = power(c), pd = power(d);
    for (int i = 0; i < 200 && b - a > 1e-13 * best_f; ++i) {
        if (pc > pd) {
            b = d;
            d = c;
            pd = pc;
            c = b - r * (b - a);
            pc = power(c);
        } else {
            a = c;
            c = d;
            pc = pd;
            d = a + r * (b - a);
            pd = power(d);
        }
    }
    return 1.0 / (0.5 * (a + b));
}

CurveSeries waist_scan(const CavityParams& p, double atom_detuning, TransverseAxis axis,
                       std::span<const double> offsets) {
    auto out = make_series(axis == TransverseAxis::y ? "waist_y" : "waist_z", "offset_m",
                           "bright_shift_rad_s", offsets.size());
    for (double r : offsets) {
        const TransverseOffset t = axis == TransverseAxis::y ? TransverseOffset{r, 0.0}
                                                             : TransverseOffset{0.0, r};
        const auto c = collective_coupling(p, AtomArray({0.0}, {t}));
        out.x.push_back(r);
        out.y.push_back(resonance_shifts(p, c.atom_number, c.abs_s(), atom_detuning).bright);
    }
    return out;
}

double fit_waist(const CurveSeries& s) {
    s.validate();
    if (s.x.size() < 3) throw ValidationError("waist fit needs at least 3 points");
    std::size_t peak = 0;
    for (std::size_t i = 1; i < s.y.size(); ++i) {
        if (std::abs(s.y[i]) > std::abs(s.y[peak])) peak = i;
    }
    const double amp0 = s.y[peak];
    if (amp0 == 0.0) throw ValidationError("waist scan is identically zero");
    // Initial width: the offset whose value is closest to e^-2 of the peak.
    double w0 = 0.0, best = INFINITY;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double miss = std::abs(s.y[i] / amp0 - std::exp(-2.0));
        if (miss < best && s.x[i] != 0.0) {
            best = miss;
            w0 = std::abs(s.x[i]);
        }
    }
    if (!(w0 > 0.0)) throw ValidationError("waist scan needs nonzero offsets");

    // Parameters [amplitude / amp0, log(w / w0)].
    const auto m = s.x.size();
    auto residuals = [&](const std::vector<double>& q, std::vector<double>& r, std::vector<double>* jac) {
        const double amp = q[0] * amp0;
        const double w = w0 * std::exp(q[1]);
        for (std::size_t i = 0; i < m; ++i) {
            const double e = std::exp(-2.0 * s.x[i] * s.x[i] / (w * w));
            r[i] = (amp * e - s.y[i]) / amp0;
            if (jac) {
                (*jac)[2 * i] = e;
                (*jac)[2 * i + 1] = q[0] * e * 4.0 * s.x[i] * s.x[i] / (w * w);
            }
        }
    };
    const auto fit = levenberg_marquardt(residuals, {1.0, 0.0}, m, {});
    if (!fit.converged) throw NumericalError("waist fit did not converge");
    return w0 * std::exp(fit.params[1]);
}

std::pair<CurveSeries, CurveSeries> dispersive_shift_scan(const CavityParams& p, double atom_number,
                                                          double abs_s,
                                                          std::span<const double> atom_detunings) {
    auto bright = make_series("bright", "atom_detuning_rad_s", "shift_rad_s", atom_detunings.size());
    auto dark = make_series("dark", "atom_detuning_rad_s", "shift_rad_s", atom_detunings.size());
    for (double d : atom_detunings) {
        const auto shifts = resonance_shifts(p, atom_number, abs_s, d);
        bright.x.push_back(d);
        bright.y.push_back(shifts.bright);
        dark.x.push_back(d);
        dark.y.push_back(shifts.dark);
    }
    return {std::move(bright), std::move(dark)};
}

} // namespace ringqed
