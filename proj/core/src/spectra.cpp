#include "ringqed/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "ringqed/constants.hpp"
#include "ringqed/format.hpp"
#include "ringqed/levmar.hpp"
#include "ringqed/random.hpp"

namespace ringqed {
namespace {

using constants::pi;
using constants::two_pi;

// Area-normalised Lorentzian and its partial derivatives with respect to
// center and log(fwhm).
struct LorentzTerms {
    double value, d_center, d_log_width;
};

LorentzTerms lorentz(double x, double center, double width) {
    const double dx = x - center;
    const double denom = dx * dx + 0.25 * width * width;
    const double value = width / (two_pi * denom);
    const double d_center = width * dx / (pi * denom * denom);
    const double d_width = 1.0 / (two_pi * denom) - width * width / (4.0 * pi * denom * denom);
    return {value, d_center, width * d_width};
}

std::vector<double> resolve_weights(std::span<const double> weights, std::size_t n) {
    if (weights.empty()) return std::vector<double>(n, 1.0);
    if (weights.size() != n) throw ValidationError("weights must match the data length");
    std::vector<double> w(weights.begin(), weights.end());
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("weights must be finite and >= 0");
    }
    return w;
}

void check_xy(std::span<const double> x, std::span<const double> y, std::size_t min_points) {
    if (x.size() != y.size()) throw ValidationError("x and y must have equal length");
    if (x.size() < min_points) {
        throw ValidationError("need at least " + std::to_string(min_points) + " points to fit");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw ValidationError("non-finite data");
        if (i > 0 && !(x[i] > x[i - 1])) throw ValidationError("x must be strictly increasing");
    }
}

// Full width at half maximum around index `peak`, measured above `base`,
// searching at most to `left_limit` / `right_limit`. Returns 0 if neither
// side crosses.
double half_max_width(std::span<const double> x, std::span<const double> y, std::size_t peak,
                      double base, std::size_t left_limit, std::size_t right_limit) {
    const double half = base + 0.5 * (y[peak] - base);
    std::optional<double> left, right;
    for (std::size_t i = peak; i > left_limit; --i) {
        if (y[i - 1] <= half) {
            const double t = (y[i] - half) / (y[i] - y[i - 1]);
            left = x[i] - t * (x[i] - x[i - 1]);
            break;
        }
    }
    for (std::size_t i = peak; i + 1 <= right_limit; ++i) {
        if (y[i + 1] <= half) {
            const double t = (y[i] - half) / (y[i] - y[i + 1]);
            right = x[i] + t * (x[i + 1] - x[i]);
            break;
        }
    }
    if (left && right) return *right - *left;
    if (left) return 2.0 * (x[peak] - *left);
    if (right) return 2.0 * (*right - x[peak]);
    return 0.0;
}

double rms_of(std::span<const double> x, std::span<const double> y, auto&& model) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = model(x[i]) - y[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(x.size()));
}

struct Scaling {
    double x0, xs, ys;
};

// Single-peak fit on normalised data; params are [center, log fwhm, area, offset].
LorentzianFit fit_single_normalised(std::span<const double> x, std::span<const double> y,
                                    const std::vector<double>& w, std::vector<double> guess,
                                    const Scaling& sc) {
    const std::size_t m = x.size();
    std::vector<double> xn(m), yn(m);
    for (std::size_t i = 0; i < m; ++i) {
        xn[i] = (x[i] - sc.x0) / sc.xs;
        yn[i] = y[i] / sc.ys;
    }
    ResidualFn fn = [&](const std::vector<double>& p, std::vector<double>& r,
                        std::vector<double>* jac) {
        const double width = std::exp(p[1]);
        for (std::size_t i = 0; i < m; ++i) {
            const auto l = lorentz(xn[i], p[0], width);
            const double sw = std::sqrt(w[i]);
            r[i] = sw * (p[3] + p[2] * l.value - yn[i]);
            if (jac) {
                double* row = jac->data() + i * 4;
                row[0] = sw * p[2] * l.d_center;
                row[1] = sw * p[2] * l.d_log_width;
                row[2] = sw * l.value;
                row[3] = sw;
            }
        }
    };
    const auto res = levenberg_marquardt(fn, std::move(guess), m);
    LorentzianFit fit;
    fit.center = sc.x0 + sc.xs * res.params[0];
    fit.fwhm = sc.xs * std::exp(res.params[1]);
    fit.area = sc.ys * sc.xs * res.params[2];
    fit.offset = sc.ys * res.params[3];
    fit.residual_rms = rms_of(x, y, fit);
    if (!res.converged) {
        throw FitError("Lorentzian fit did not converge in 200 iterations",
                       {fit.center, fit.fwhm, fit.area, fit.offset}, fit.residual_rms);
    }
    return fit;
}

std::vector<std::size_t> local_maxima(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = y.size();
    std::vector<double> s(y.begin(), y.end());
    for (std::size_t i = 1; i + 1 < n; ++i) s[i] = (y[i - 1] + y[i] + y[i + 1]) / 3.0;
    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (s[i] > s[i - 1] && s[i] >= s[i + 1]) peaks.push_back(i);
    }
    std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) {
        if (s[a] != s[b]) return s[a] > s[b];
        return std::abs(x[a]) < std::abs(x[b]);
    });
    return peaks;
}

} // namespace

std::vector<double> SpectrumScan::total() const {
    std::vector<double> t(forward.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = forward[i] + backward[i];
    return t;
}

void SpectrumScan::validate() const {
    if (forward.size() != deltas.size() || backward.size() != deltas.size()) {
        throw ValidationError("spectrum columns must have equal length");
    }
    for (std::size_t i = 1; i < deltas.size(); ++i) {
        if (!(deltas[i] > deltas[i - 1])) throw ValidationError("deltas must be strictly increasing");
    }
}

SpectrumScan scan(const CavityParams& p, const CollectiveCoupling& c, double atom_detuning,
                  double delta_min, double delta_max, int points, double e_in) {
    if (points < 3) throw ValidationError("a scan needs at least 3 points");
    if (!(delta_max > delta_min)) throw ValidationError("delta_max must exceed delta_min");
    SpectrumScan s;
    const auto n = static_cast<std::size_t>(points);
    s.deltas.resize(n);
    s.forward.resize(n);
    s.backward.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double delta =
            delta_min + (delta_max - delta_min) * static_cast<double>(i) / static_cast<double>(n - 1);
        const auto m = steady_modes(p, c, DriveConfig{delta, atom_detuning, e_in});
        s.deltas[i] = delta;
        s.forward[i] = p.kappa_out * std::norm(m.forward);
        s.backward[i] = p.kappa_out * std::norm(m.backward);
    }
    return s;
}

SpectrumScan scan(const CavityParams& p, const AtomArray& a, double atom_detuning,
                  double delta_min, double delta_max, int points, double e_in) {
    return scan(p, collective_coupling(p, a), atom_detuning, delta_min, delta_max, points, e_in);
}

SpectrumScan add_shot_noise(const SpectrumScan& s, double dwell_time, std::uint64_t seed) {
    if (!(dwell_time > 0.0)) throw ValidationError("dwell_time must be > 0");
    s.validate();
    SpectrumScan out = s;
    Rng rng(seed);
    auto draw = [&](double flux) {
        const double mean = flux * dwell_time;
        if (!(mean > 0.0)) return 0.0;
        std::poisson_distribution<long long> counts(mean);
        return static_cast<double>(counts(rng)) / dwell_time;
    };
    for (std::size_t i = 0; i < out.deltas.size(); ++i) {
        out.forward[i] = draw(s.forward[i]);
        out.backward[i] = draw(s.backward[i]);
    }
    return out;
}

EigenFluxes eigenmode_fluxes(const CavityParams& p, const CollectiveCoupling& c,
                             double atom_detuning, std::span<const double> deltas, double e_in) {
    const double s = c.abs_s();
    const Complex phase = s > 0.0 ? c.structure_factor / s : Complex{1.0, 0.0};
    const Complex response =
        c.atom_number * p.g * p.g / Complex{-0.5 * p.gamma, atom_detuning};
    const Complex source = Complex{0.0, 1.0} * phase * std::sqrt(p.kappa_in) * e_in / std::sqrt(2.0);
    EigenFluxes out;
    out.bright.reserve(deltas.size());
    out.dark.reserve(deltas.size());
    for (double delta : deltas) {
        const Complex bare{-0.5 * p.kappa, delta};
        out.bright.push_back(p.kappa_out * std::norm(source / (bare + response * (1.0 + s))));
        out.dark.push_back(p.kappa_out * std::norm(source / (bare + response * (1.0 - s))));
    }
    return out;
}

double LorentzianFit::peak(double delta) const {
    const double dx = delta - center;
    return area * (fwhm / two_pi) / (dx * dx + 0.25 * fwhm * fwhm);
}

double DoubleLorentzianFit::operator()(double delta) const {
    return offset + components[0].peak(delta) + components[1].peak(delta);
}

LorentzianFit fit_lorentzian(std::span<const double> x, std::span<const double> y,
                             std::span<const double> weights) {
    check_xy(x, y, 5);
    const auto w = resolve_weights(weights, x.size());
    const std::size_t n = x.size();
    const std::size_t peak =
        static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    const double base = *std::min_element(y.begin(), y.end());
    const double height = y[peak] - base;
    if (!(height > 0.0)) throw ValidationError("data has no peak to fit");
    double width = half_max_width(x, y, peak, base, 0, n - 1);
    if (!(width > 0.0)) width = 0.25 * (x.back() - x.front());

    const Scaling sc{x[peak], width, std::max(std::abs(y[peak]), std::abs(base))};
    const double area = height * pi * width / 2.0;
    return fit_single_normalised(x, y, w,
                                 {0.0, 0.0, area / (sc.xs * sc.ys), base / sc.ys}, sc);
}

LorentzianFit fit_lorentzian(const SpectrumScan& s, Channel channel) {
    s.validate();
    switch (channel) {
    case Channel::forward: return fit_lorentzian(s.deltas, s.forward);
    case Channel::backward: return fit_lorentzian(s.deltas, s.backward);
    case Channel::total: {
        const auto t = s.total();
        return fit_lorentzian(s.deltas, t);
    }
    }
    throw ValidationError("unknown channel");
}

DoubleLorentzianFit fit_double_lorentzian(std::span<const double> x, std::span<const double> y,
                                          std::span<const double> weights) {
    check_xy(x, y, 8);
    const auto w = resolve_weights(weights, x.size());
    const std::size_t n = x.size();
    const double base = *std::min_element(y.begin(), y.end());

    // Initial guesses: [center, width, height above base] for each peak.
    struct PeakGuess {
        double center, width, height;
    };
    std::array<PeakGuess, 2> g{};
    const auto peaks = local_maxima(x, y);
    if (peaks.size() >= 2) {
        std::size_t i0 = std::min(peaks[0], peaks[1]);
        std::size_t i1 = std::max(peaks[0], peaks[1]);
        // Search for half-max crossings only outward and up to the valley.
        const std::size_t valley = static_cast<std::size_t>(
            std::min_element(y.begin() + static_cast<std::ptrdiff_t>(i0),
                             y.begin() + static_cast<std::ptrdiff_t>(i1) + 1) - y.begin());
        double w0 = half_max_width(x, y, i0, base, 0, valley);
        double w1 = half_max_width(x, y, i1, base, valley, n - 1);
        const double sep = x[i1] - x[i0];
        if (!(w0 > 0.0)) w0 = 0.5 * sep;
        if (!(w1 > 0.0)) w1 = 0.5 * sep;
        g[0] = {x[i0], w0, y[i0] - base};
        g[1] = {x[i1], w1, y[i1] - base};
    } else {
        // One visible maximum: fit it, then seed the second peak at the
        // largest positive residual.
        const auto single = fit_lorentzian(x, y, weights);
        std::size_t best = 0;
        double best_resid = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - single(x[i]);
            if (r > best_resid) {
                best_resid = r;
                best = i;
            }
        }
        const double h1 = 2.0 * single.area / (pi * single.fwhm);
        g[0] = {single.center, single.fwhm, h1};
        g[1] = {x[best], single.fwhm, std::max(best_resid, 0.1 * h1)};
        if (g[1].center < g[0].center) std::swap(g[0], g[1]);
    }

    const Scaling sc{0.5 * (g[0].center + g[1].center),
                     std::max({g[0].width, g[1].width, 1e-300}),
                     std::max(std::abs(*std::max_element(y.begin(), y.end())), std::abs(base))};
    std::vector<double> xn(n), yn(n);
    for (std::size_t i = 0; i < n; ++i) {
        xn[i] = (x[i] - sc.x0) / sc.xs;
        yn[i] = y[i] / sc.ys;
    }
    std::vector<double> guess;
    for (const auto& pg : g) {
        guess.push_back((pg.center - sc.x0) / sc.xs);
        guess.push_back(std::log(pg.width / sc.xs));
        guess.push_back(pg.height * pi * pg.width / 2.0 / (sc.xs * sc.ys));
    }
    guess.push_back(base / sc.ys);

    ResidualFn fn = [&](const std::vector<double>& p, std::vector<double>& r,
                        std::vector<double>* jac) {
        const double wa = std::exp(p[1]), wb = std::exp(p[4]);
        for (std::size_t i = 0; i < n; ++i) {
            const auto la = lorentz(xn[i], p[0], wa);
            const auto lb = lorentz(xn[i], p[3], wb);
            const double sw = std::sqrt(w[i]);
            r[i] = sw * (p[6] + p[2] * la.value + p[5] * lb.value - yn[i]);
            if (jac) {
                double* row = jac->data() + i * 7;
                row[0] = sw * p[2] * la.d_center;
                row[1] = sw * p[2] * la.d_log_width;
                row[2] = sw * la.value;
                row[3] = sw * p[5] * lb.d_center;
                row[4] = sw * p[5] * lb.d_log_width;
                row[5] = sw * lb.value;
                row[6] = sw;
            }
        }
    };
    const auto res = levenberg_marquardt(fn, guess, n);

    DoubleLorentzianFit fit;
    fit.offset = sc.ys * res.params[6];
    for (std::size_t k = 0; k < 2; ++k) {
        auto& c = fit.components[k];
        c.center = sc.x0 + sc.xs * res.params[3 * k];
        c.fwhm = sc.xs * std::exp(res.params[3 * k + 1]);
        c.area = sc.ys * sc.xs * res.params[3 * k + 2];
        c.offset = fit.offset;
    }
    if (fit.components[1].center < fit.components[0].center) {
        std::swap(fit.components[0], fit.components[1]);
    }
    fit.residual_rms = rms_of(x, y, fit);
    for (auto& c : fit.components) c.residual_rms = fit.residual_rms;
    if (!res.converged) {
        std::vector<double> last;
        for (const auto& c : fit.components) {
            last.insert(last.end(), {c.center, c.fwhm, c.area});
        }
        last.push_back(fit.offset);
        throw FitError("double Lorentzian fit did not converge in 200 iterations", last,
                       fit.residual_rms);
    }

    const auto& c0 = fit.components[0];
    const auto& c1 = fit.components[1];
    if (!(c1.center - c0.center > 0.5 * (c0.fwhm + c1.fwhm))) {
        throw ValidationError("peaks are not resolved: separation below the combined half-width");
    }
    fit.bright_index = c0.fwhm >= c1.fwhm ? 0 : 1;
    fit.dark_index = 1 - fit.bright_index;
    const double dark_center = fit.dark().center;
    fit.n_bright = fit.bright().peak(dark_center);
    fit.n_dark = fit.dark().peak(dark_center);
    return fit;
}

DoubleLorentzianFit fit_double_lorentzian(const SpectrumScan& s) {
    s.validate();
    const auto t = s.total();
    return fit_double_lorentzian(s.deltas, t);
}

void write_scan_csv(std::ostream& os, const SpectrumScan& s) {
    s.validate();
    os << "delta_hz,n_plus,n_minus,n_total\n";
    for (std::size_t i = 0; i < s.deltas.size(); ++i) {
        os << format_double(s.deltas[i] / two_pi) << ',' << format_double(s.forward[i]) << ','
           << format_double(s.backward[i]) << ',' << format_double(s.forward[i] + s.backward[i])
           << '\n';
    }
}

SpectrumScan read_scan_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("empty spectrum CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "delta_hz,n_plus,n_minus,n_total") {
        throw ValidationError("unexpected spectrum CSV header: " + line);
    }
    SpectrumScan s;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::istringstream in(line);
        in.imbue(std::locale::classic());
        double v[4];
        char comma = 0;
        if (!(in >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3])) {
            throw ValidationError("malformed spectrum CSV line " + std::to_string(line_no));
        }
        s.deltas.push_back(v[0] * two_pi);
        s.forward.push_back(v[1]);
        s.backward.push_back(v[2]);
    }
    s.validate();
    return s;
}

} // namespace ringqed
